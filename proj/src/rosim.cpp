#include "ringtrng/rosim.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

#include "ringtrng/error.hpp"
#include "ringtrng/seed.hpp"

namespace ringtrng {

namespace {

// Stream indices under a source seed.
constexpr std::uint64_t kOsc1Stream = 1;
constexpr std::uint64_t kOsc2Stream = 2;
constexpr std::uint64_t kRefStream = 3;

double uniform01(RandomStream& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Reference edges r_0 = 0, r_{i+1} = r_i + T_ref (1 + ref_jitter g_i).
class ReferenceClock {
 public:
  ReferenceClock(double freq_hz, double jitter_rel, std::uint64_t seed)
      : period_(1.0 / freq_hz), jitter_(jitter_rel), rng_(seed) {}

  double next_edge() {
    if (index_ == 0) {
      ++index_;
      return 0.0;
    }
    if (jitter_ == 0.0) return static_cast<double>(index_++) * period_;
    ++index_;
    double step;
    do {
      step = 1.0 + jitter_ * gauss_(rng_);
    } while (step <= 0.0);
    t_ += period_ * step;
    return t_;
  }

 private:
  double period_;
  double jitter_;
  RandomStream rng_;
  std::normal_distribution<double> gauss_{0.0, 1.0};
  std::uint64_t index_ = 0;
  double t_ = 0.0;
};

// Square wave built on an oscillator's rising edges; high during the first
// half of each (jittered) period.
class LevelTracker {
 public:
  explicit LevelTracker(JitteredOscillator osc) : osc_(std::move(osc)) {
    next_ = osc_.next_edge();
    prev_ = next_ - osc_.period();
  }

  bool level_at(double t) {
    while (next_ <= t) {
      prev_ = next_;
      next_ = osc_.next_edge();
    }
    return (t - prev_) < 0.5 * (next_ - prev_);
  }

 private:
  JitteredOscillator osc_;
  double prev_ = 0.0;
  double next_ = 0.0;
};

class EdgeCounter {
 public:
  explicit EdgeCounter(JitteredOscillator osc) : osc_(std::move(osc)) { next_ = osc_.next_edge(); }

  // Rising edges strictly before t not yet counted.
  std::uint64_t count_before(double t) {
    std::uint64_t c = 0;
    while (next_ < t) {
      ++c;
      next_ = osc_.next_edge();
    }
    return c;
  }

 private:
  JitteredOscillator osc_;
  double next_ = 0.0;
};

struct SourceOutput {
  std::vector<std::uint8_t> bits;
  std::vector<std::uint64_t> c1;
  std::vector<std::uint64_t> c2;
};

SourceOutput run_counter_source(const EroConfig& cfg, std::uint64_t source_seed, std::size_t n_bits) {
  EdgeCounter osc1(JitteredOscillator(cfg.f1_hz, cfg.jitter_rel, mix_seed(source_seed, kOsc1Stream), cfg.zero_phase));
  EdgeCounter osc2(JitteredOscillator(cfg.f2_hz, cfg.jitter_rel, mix_seed(source_seed, kOsc2Stream), cfg.zero_phase));
  ReferenceClock ref(cfg.fref_hz, cfg.ref_jitter_rel, mix_seed(source_seed, kRefStream));

  SourceOutput out;
  out.bits.resize(n_bits);
  out.c1.resize(n_bits);
  out.c2.resize(n_bits);
  double r = ref.next_edge();
  // Nothing is counted before the first reference edge.
  osc1.count_before(r);
  osc2.count_before(r);
  for (std::size_t i = 0; i < n_bits; ++i) {
    r = ref.next_edge();
    out.c1[i] = osc1.count_before(r);
    out.c2[i] = osc2.count_before(r);
    out.bits[i] = static_cast<std::uint8_t>((out.c1[i] ^ out.c2[i]) & 1U);
  }
  return out;
}

SourceOutput run_sampling_source(const EroConfig& cfg, std::uint64_t source_seed, std::size_t n_bits,
                                 bool noiseless) {
  const double jitter = noiseless ? 0.0 : cfg.jitter_rel;
  LevelTracker osc1(JitteredOscillator(cfg.f1_hz, jitter, mix_seed(source_seed, kOsc1Stream), cfg.zero_phase));
  LevelTracker osc2(JitteredOscillator(cfg.f2_hz, jitter, mix_seed(source_seed, kOsc2Stream), cfg.zero_phase));
  ReferenceClock ref(cfg.fref_hz, noiseless ? 0.0 : cfg.ref_jitter_rel, mix_seed(source_seed, kRefStream));

  SourceOutput out;
  out.bits.resize(n_bits);
  for (std::size_t i = 0; i < n_bits; ++i) {
    const double r = ref.next_edge();
    out.bits[i] = static_cast<std::uint8_t>(osc1.level_at(r) != osc2.level_at(r));
  }
  return out;
}

SourceOutput run_source(const EroConfig& cfg, std::uint64_t source_seed, std::size_t n_bits) {
  switch (cfg.extraction) {
    case Extraction::Counter: return run_counter_source(cfg, source_seed, n_bits);
    case Extraction::Sampling: return run_sampling_source(cfg, source_seed, n_bits, false);
    case Extraction::Ideal: return run_sampling_source(cfg, source_seed, n_bits, true);
  }
  throw Error(ErrorKind::InvalidArgument, "unknown extraction mode");
}

SimOutput single_source(const EroConfig& cfg, std::size_t n_bits) {
  if (n_bits == 0) throw Error(ErrorKind::InvalidArgument, "n_bits must be >= 1");
  validate(cfg);
  auto src = run_source(cfg, mix_seed(cfg.seed, 0), n_bits);
  return SimOutput{BitSequence(src.bits), std::move(src.c1), std::move(src.c2), cfg};
}

}  // namespace

std::string_view to_string(Extraction e) {
  switch (e) {
    case Extraction::Counter: return "counter";
    case Extraction::Sampling: return "sampling";
    case Extraction::Ideal: return "ideal";
  }
  return "unknown";
}

Extraction parse_extraction(std::string_view text) {
  if (text == "counter") return Extraction::Counter;
  if (text == "sampling") return Extraction::Sampling;
  if (text == "ideal") return Extraction::Ideal;
  throw Error(ErrorKind::InvalidArgument, fmt::format("unknown extraction mode '{}'", text));
}

std::optional<std::string> invalid_reason(const EroConfig& cfg) {
  if (!(cfg.f1_hz > 0) || !(cfg.f2_hz > 0) || !(cfg.fref_hz > 0)) {
    return "frequencies must be positive";
  }
  if (!(cfg.jitter_rel >= 0) || !(cfg.ref_jitter_rel >= 0)) return "jitter must be nonnegative";
  if (cfg.xor_depth < 1) return "xor depth must be >= 1";
  if (cfg.extraction == Extraction::Counter && !(cfg.fref_hz < std::min(cfg.f1_hz, cfg.f2_hz))) {
    return fmt::format("counter mode needs fref < min(f1, f2), got fref={} f1={} f2={}", cfg.fref_hz,
                       cfg.f1_hz, cfg.f2_hz);
  }
  return std::nullopt;
}

void validate(const EroConfig& cfg) {
  if (auto why = invalid_reason(cfg)) throw Error(ErrorKind::InvalidArgument, *why);
}

namespace presets {

EroConfig ideal_noiseless() {
  EroConfig c;
  c.f1_hz = 192.5e6;
  c.f2_hz = 136.5e6;
  c.fref_hz = 136.5e6;
  c.jitter_rel = 0.0;
  c.extraction = Extraction::Ideal;
  return c;
}

EroConfig counter_default() {
  EroConfig c;
  c.f1_hz = 192.5e6;
  c.f2_hz = 136.5e6;
  c.fref_hz = 50e6;
  c.jitter_rel = 0.05;
  c.extraction = Extraction::Counter;
  return c;
}

}  // namespace presets

JitteredOscillator::JitteredOscillator(double freq_hz, double jitter_rel, std::uint64_t seed,
                                       bool zero_phase)
    : period_(1.0 / freq_hz), jitter_(jitter_rel), rng_(seed) {
  if (!(freq_hz > 0)) throw Error(ErrorKind::InvalidArgument, "oscillator frequency must be positive");
  if (!(jitter_rel >= 0)) throw Error(ErrorKind::InvalidArgument, "jitter must be nonnegative");
  const double phase = uniform01(rng_);
  t0_ = zero_phase ? 0.0 : phase * period_;
  t_ = t0_;
}

double JitteredOscillator::next_edge() {
  if (index_ == 0) {
    ++index_;
    return t0_;
  }
  if (jitter_ == 0.0) {
    // Closed form keeps the noiseless grid free of accumulated rounding.
    return t0_ + static_cast<double>(index_++) * period_;
  }
  ++index_;
  double step;
  do {
    step = 1.0 + jitter_ * gauss_(rng_);
  } while (step <= 0.0);
  t_ += period_ * step;
  return t_;
}

std::vector<double> oscillator_edges(double freq_hz, double jitter_rel, double horizon_s,
                                     std::uint64_t seed) {
  if (!(horizon_s > 0)) throw Error(ErrorKind::InvalidArgument, "horizon must be positive");
  JitteredOscillator osc(freq_hz, jitter_rel, seed);
  std::vector<double> edges;
  edges.reserve(static_cast<std::size_t>(horizon_s * freq_hz * 1.01) + 1);
  for (double t = osc.next_edge(); t < horizon_s; t = osc.next_edge()) edges.push_back(t);
  return edges;
}

SimOutput simulate_counter(const EroConfig& cfg, std::size_t n_bits) {
  if (cfg.extraction != Extraction::Counter) {
    throw Error(ErrorKind::InvalidArgument, "simulate_counter needs extraction=counter");
  }
  return single_source(cfg, n_bits);
}

SimOutput simulate_sampling(const EroConfig& cfg, std::size_t n_bits) {
  if (cfg.extraction != Extraction::Sampling) {
    throw Error(ErrorKind::InvalidArgument, "simulate_sampling needs extraction=sampling");
  }
  return single_source(cfg, n_bits);
}

SimOutput simulate_ideal(const EroConfig& cfg, std::size_t n_bits) {
  EroConfig c = cfg;
  c.extraction = Extraction::Ideal;
  c.jitter_rel = 0.0;
  c.ref_jitter_rel = 0.0;
  return single_source(c, n_bits);
}

SimOutput simulate_accumulated(const EroConfig& cfg, std::size_t n_bits) {
  if (n_bits == 0) throw Error(ErrorKind::InvalidArgument, "n_bits must be >= 1");
  validate(cfg);
  const auto depth = static_cast<std::size_t>(cfg.xor_depth);
  if (depth == 1) return single_source(cfg, n_bits);

  std::vector<std::uint8_t> acc(n_bits, 0);
  if (cfg.accumulation == Accumulation::Independent) {
    for (std::size_t j = 0; j < depth; ++j) {
      const auto src = run_source(cfg, mix_seed(cfg.seed, j), n_bits);
      for (std::size_t i = 0; i < n_bits; ++i) acc[i] ^= src.bits[i];
    }
  } else {
    // Decimation: one source, each output bit folds `depth` consecutive raw bits.
    const auto src = run_source(cfg, mix_seed(cfg.seed, 0), n_bits * depth);
    for (std::size_t i = 0; i < n_bits; ++i) {
      for (std::size_t j = 0; j < depth; ++j) acc[i] ^= src.bits[i * depth + j];
    }
  }
  return SimOutput{BitSequence(acc), {}, {}, cfg};
}

SimOutput simulate(const EroConfig& cfg, std::size_t n_bits) {
  if (cfg.extraction == Extraction::Ideal && cfg.xor_depth == 1) return simulate_ideal(cfg, n_bits);
  return simulate_accumulated(cfg, n_bits);
}

}  // namespace ringtrng
