#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "ringtrng/bitseq.hpp"

namespace ringtrng {

enum class Extraction { Counter, Sampling, Ideal };
enum class Accumulation { Independent, Decimation };

std::string_view to_string(Extraction e);
Extraction parse_extraction(std::string_view text);

/// Elementary ring-oscillator TRNG: two jittered oscillators observed at the
/// edges of a reference clock.
struct EroConfig {
  double f1_hz = 192.5e6;
  double f2_hz = 136.5e6;
  double fref_hz = 50e6;
  // Per-period Gaussian jitter sd as a fraction of the nominal period.
  double jitter_rel = 0.05;
  Extraction extraction = Extraction::Counter;
  int xor_depth = 1;
  std::uint64_t seed = 1;
  // Reference-clock jitter; zero keeps the reference ideal.
  double ref_jitter_rel = 0.0;
  // First rising edges at t = 0 instead of a random phase.
  bool zero_phase = false;
  Accumulation accumulation = Accumulation::Independent;
};

/// Throws InvalidArgument naming the first violated constraint.
void validate(const EroConfig& cfg);

/// Same checks, returns the reason instead of throwing.
std::optional<std::string> invalid_reason(const EroConfig& cfg);

namespace presets {
/// 192.5 MHz / 136.5 MHz oscillators sampled noiselessly at 136.5 MHz.
EroConfig ideal_noiseless();
/// 192.5 MHz / 136.5 MHz oscillators, 50 MHz reference, counter extraction, 5% jitter.
EroConfig counter_default();
}  // namespace presets

using RandomStream = std::mt19937_64;

/// Free-running oscillator with white Gaussian period jitter. Rising edges
/// t_{i+1} = t_i + T (1 + jitter_rel g_i), t_0 uniform in [0, T).
class JitteredOscillator {
 public:
  JitteredOscillator(double freq_hz, double jitter_rel, std::uint64_t seed, bool zero_phase = false);

  /// Next rising edge time in seconds.
  double next_edge();

  double period() const noexcept { return period_; }
  double first_edge() const noexcept { return t0_; }

 private:
  double period_;
  double jitter_;
  RandomStream rng_;
  std::normal_distribution<double> gauss_{0.0, 1.0};
  double t0_ = 0.0;
  double t_ = 0.0;
  std::uint64_t index_ = 0;
};

/// All rising edges in [t_0, horizon).
std::vector<double> oscillator_edges(double freq_hz, double jitter_rel, double horizon_s,
                                     std::uint64_t seed);

struct SimOutput {
  BitSequence bits;
  // Raw per-reference-period counts; filled for single-source counter runs.
  std::vector<std::uint64_t> counters1;
  std::vector<std::uint64_t> counters2;
  EroConfig config;
};

/// X_i = LSB(Count_1[i]) xor LSB(Count_2[i]), Count_j[i] = rising edges of
/// oscillator j in [ref_i, ref_{i+1}).
SimOutput simulate_counter(const EroConfig& cfg, std::size_t n_bits);

/// bit_i = level_1(ref_i) xor level_2(ref_i), square waves with 50% duty.
SimOutput simulate_sampling(const EroConfig& cfg, std::size_t n_bits);

/// Sampling rule with all jitter forced to zero.
SimOutput simulate_ideal(const EroConfig& cfg, std::size_t n_bits);

/// XOR of xor_depth sources using cfg.extraction. Independent sources use
/// seeds mix_seed(cfg.seed, i); source 0 reproduces the single-source output.
SimOutput simulate_accumulated(const EroConfig& cfg, std::size_t n_bits);

/// Dispatches on extraction and xor_depth.
SimOutput simulate(const EroConfig& cfg, std::size_t n_bits);

}  // namespace ringtrng
