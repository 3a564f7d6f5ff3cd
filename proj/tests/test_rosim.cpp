#include <gtest/gtest.h>

#include <cmath>

#include "ringtrng/error.hpp"
#include "ringtrng/ingest.hpp"
#include "ringtrng/maurer.hpp"
#include "ringtrng/measures.hpp"
#include "ringtrng/rosim.hpp"
#include "ringtrng/seed.hpp"
#include "support.hpp"

using namespace ringtrng;

namespace {

EroConfig counter(double f1, double f2, double fref, double jitter, std::uint64_t seed) {
  EroConfig c;
  c.f1_hz = f1;
  c.f2_hz = f2;
  c.fref_hz = fref;
  c.jitter_rel = jitter;
  c.extraction = Extraction::Counter;
  c.seed = seed;
  return c;
}

std::vector<double> as_doubles(const std::vector<std::uint64_t>& v) {
  return {v.begin(), v.end()};
}

}  // namespace

TEST(Seed, MixIsDeterministicAndSpreads) {
  EXPECT_EQ(mix_seed(1, 2), mix_seed(1, 2));
  EXPECT_NE(mix_seed(1, 2), mix_seed(1, 3));
  EXPECT_NE(mix_seed(1, 2), mix_seed(2, 2));
  EXPECT_NE(mix_seed(0, 0), 0u);
}

TEST(Config, Validation) {
  EXPECT_NO_THROW(validate(presets::counter_default()));
  EXPECT_NO_THROW(validate(presets::ideal_noiseless()));
  auto c = presets::counter_default();
  c.fref_hz = 140e6;
  EXPECT_TRUE(invalid_reason(c).has_value());
  EXPECT_THROW(validate(c), Error);
  c = presets::counter_default();
  c.f1_hz = -1;
  EXPECT_THROW(validate(c), Error);
  c = presets::counter_default();
  c.xor_depth = 0;
  EXPECT_THROW(validate(c), Error);
  c = presets::counter_default();
  c.jitter_rel = -0.1;
  EXPECT_THROW(validate(c), Error);
  EXPECT_EQ(parse_extraction("sampling"), Extraction::Sampling);
  EXPECT_THROW(parse_extraction("parity"), Error);
}

TEST(Oscillator, NoiselessGrid) {
  const auto e = oscillator_edges(100e6, 0.0, 1e-6, 3);
  ASSERT_GE(e.size(), 99u);
  EXPECT_GE(e[0], 0.0);
  EXPECT_LT(e[0], 10e-9);
  for (std::size_t i = 0; i < e.size(); ++i) EXPECT_NEAR(e[i], e[0] + static_cast<double>(i) * 10e-9, 1e-18);
}

TEST(Oscillator, MeanGapMatchesPeriod) {
  JitteredOscillator osc(150e6, 0.05, 17);
  const double first = osc.next_edge();
  double last = first;
  for (int i = 0; i < 100'000; ++i) last = osc.next_edge();
  EXPECT_NEAR((last - first) / 100'000, 1.0 / 150e6, 1e-3 / 150e6);
}

TEST(Oscillator, EdgesIncrease) {
  const auto e = oscillator_edges(200e6, 0.3, 1e-5, 5);
  for (std::size_t i = 1; i < e.size(); ++i) EXPECT_GT(e[i], e[i - 1]);
}

TEST(Oscillator, CountAllanVarianceGrowsWithJitter) {
  double prev = -1.0;
  for (double jitter : {0.01, 0.05, 0.2}) {
    const auto sim = simulate(counter(192.5e6, 136.5e6, 10e6, jitter, 4), 20'000);
    const double av = allan_variance(as_doubles(sim.counters1));
    EXPECT_GT(av, prev) << jitter;
    prev = av;
  }
}

TEST(Counter, NoiselessExactRatio) {
  auto c = counter(200e6, 200e6, 100e6, 0.0, 1);
  c.zero_phase = true;
  const auto sim = simulate_counter(c, 1000);
  ASSERT_EQ(sim.counters1.size(), 1000u);
  for (std::size_t i = 0; i < 1000; ++i) {
    EXPECT_EQ(sim.counters1[i], 2u);
    EXPECT_EQ(sim.counters2[i], 2u);
    EXPECT_FALSE(sim.bits[i]);
  }
}

TEST(Counter, NoiselessCountsHaveZeroAllanVarianceAtIntegerRatio) {
  auto c = counter(150e6, 100e6, 50e6, 0.0, 9);
  const auto sim = simulate_counter(c, 500);
  EXPECT_DOUBLE_EQ(allan_variance(as_doubles(sim.counters1)), 0.0);
  EXPECT_DOUBLE_EQ(allan_variance(as_doubles(sim.counters2)), 0.0);
}

TEST(Counter, MeanCountsMatchRatios) {
  const auto sim = simulate(presets::counter_default(), 100'000);
  const double m1 = oracle::mean_of(as_doubles(sim.counters1));
  const double m2 = oracle::mean_of(as_doubles(sim.counters2));
  EXPECT_NEAR(m1, 192.5 / 50, 0.01);
  EXPECT_NEAR(m2, 136.5 / 50, 0.01);
}

TEST(Counter, BitsAreLsbXorOfCounts) {
  const auto sim = simulate(presets::counter_default(), 5000);
  ASSERT_EQ(sim.bits.size(), 5000u);
  const auto bits = differential_bits({sim.counters1, "a"}, {sim.counters2, "b"});
  EXPECT_EQ(bits, sim.bits);
}

TEST(Sampling, SynchronousSamplingIsConstant) {
  EroConfig c;
  c.extraction = Extraction::Ideal;
  c.f1_hz = 100e6;
  c.f2_hz = 1e3;  // effectively frozen over the run
  c.fref_hz = 100e6;
  c.jitter_rel = 0.0;
  c.zero_phase = true;
  const auto sim = simulate_ideal(c, 400);
  // f2 is high throughout the first half-period (5e-4 s); the sampled level of
  // oscillator 1 at its own rising edge is always high.
  for (std::size_t i = 0; i < sim.bits.size(); ++i) EXPECT_FALSE(sim.bits[i]);
}

TEST(Sampling, RequiresMatchingMode) {
  EXPECT_THROW(simulate_sampling(presets::counter_default(), 10), Error);
  auto c = presets::counter_default();
  c.extraction = Extraction::Sampling;
  EXPECT_THROW(simulate_counter(c, 10), Error);
}

TEST(Ideal, PeriodicRunStatistics) {
  const auto sim = simulate(presets::ideal_noiseless(), 100'000);
  const auto r = runs(sim.bits);
  EXPECT_NEAR(r.mean, 1.22, 0.01);
  EXPECT_NEAR(r.sd, 0.41, 0.01);
  EXPECT_FALSE(maurer_test(sim.bits, {7, 1280, 0}).pass);
  // 192.5 / 136.5 = 55 / 39: the noiseless output repeats every 39 samples.
  for (std::size_t i = 0; i + 39 < 2000; ++i) ASSERT_EQ(sim.bits[i], sim.bits[i + 39]) << i;
}

TEST(Ideal, DeterministicForSameSeed) {
  auto c = presets::ideal_noiseless();
  c.seed = 77;
  EXPECT_EQ(simulate(c, 5000).bits, simulate(c, 5000).bits);
}

TEST(Simulate, SeedsAreReproducibleAndDistinct) {
  auto c = presets::counter_default();
  c.seed = 5;
  const auto a = simulate(c, 2000).bits;
  EXPECT_EQ(a, simulate(c, 2000).bits);
  c.seed = 6;
  EXPECT_NE(a, simulate(c, 2000).bits);
}

TEST(Accumulated, DepthOneIsSingleSource) {
  auto c = presets::counter_default();
  c.seed = 12;
  EXPECT_EQ(simulate_accumulated(c, 3000).bits, simulate_counter(c, 3000).bits);
}

TEST(Accumulated, IndependentSourcesXor) {
  auto c = presets::counter_default();
  c.seed = 21;
  c.xor_depth = 3;
  const auto acc = simulate_accumulated(c, 3000);
  EXPECT_TRUE(acc.counters1.empty());
  // XORing two more sources must change the single-source output.
  auto one = c;
  one.xor_depth = 1;
  const auto first = simulate_counter(one, 3000).bits;
  EXPECT_NE(acc.bits, first);
  EXPECT_EQ(acc.bits.size(), 3000u);
}

TEST(Accumulated, DecimationFoldsConsecutiveBits) {
  auto c = presets::counter_default();
  c.seed = 8;
  c.xor_depth = 4;
  c.accumulation = Accumulation::Decimation;
  const auto dec = simulate_accumulated(c, 1000);
  auto raw_cfg = c;
  raw_cfg.xor_depth = 1;
  const auto raw = simulate_counter(raw_cfg, 4000).bits;
  for (std::size_t i = 0; i < 1000; ++i) {
    const bool want = raw[4 * i] ^ raw[4 * i + 1] ^ raw[4 * i + 2] ^ raw[4 * i + 3];
    ASSERT_EQ(dec.bits[i], want) << i;
  }
}

TEST(Accumulated, XorReducesCorrelation) {
  auto c = presets::counter_default();
  std::vector<double> c2_by_depth;
  for (int depth : {1, 4}) {
    std::vector<double> vals;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      c.seed = 100 + seed;
      c.xor_depth = depth;
      vals.push_back(correlation2_fast(simulate(c, 20'000).bits, 43).value);
    }
    c2_by_depth.push_back(oracle::median_of(vals));
  }
  EXPECT_LT(c2_by_depth[1], c2_by_depth[0]);
}
