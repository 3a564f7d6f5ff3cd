#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ringtrng/bitseq.hpp"

namespace ringtrng {

enum class CorrelationMode { Exact, AcfFast };

/// Mauduit–Sárközy correlation of order k:
///   max over lag vectors D and windows M of (1/M)|sum_{n<=M} e_n e_{n+d_1}...e_{n+d_{k-1}}|
/// Indexing is non-cyclic: M + d_{k-1} <= N. Lags and windows are 1-based.
struct CorrelationReport {
  int order = 2;
  double value = 0.0;
  std::vector<std::size_t> lags;  // d_1 < ... < d_{k-1}
  std::size_t window = 0;         // M
  CorrelationMode mode = CorrelationMode::Exact;
};

struct PatternCounts {
  int k = 1;
  std::size_t window = 0;
  std::vector<std::size_t> counts;  // 2^k entries; pattern s_n..s_{n+k-1}, first bit MSB
};

struct NormalityReport {
  int k = 1;
  double value = 0.0;
  std::uint32_t pattern = 0;
  std::size_t window = 0;
};

/// Search space for correlation_exact.
struct ExactOptions {
  std::size_t max_lag = 0;     // 0 selects N - 1
  std::size_t min_window = 0;  // 0 selects default_min_window(N)
  // Only the longest window M = N - d_{k-1} per lag vector.
  bool maximal_window_only = false;
  // Upper bound on elementary products before BudgetExceeded.
  std::uint64_t budget = 1'000'000'000ULL;
  bool force = false;
};

/// max(ceil(N/2), 16), clamped to N - 1 so at least lag 1 stays feasible.
std::size_t default_min_window(std::size_t n);

/// floor(10 * log10 N), clamped to [1, N - 1]. Default lag range for the
/// off-peak C_2 that reports and sweeps quote.
std::size_t default_report_max_lag(std::size_t n);

/// Number of elementary products correlation_exact would evaluate.
std::uint64_t exact_cost(std::size_t n, int k, const ExactOptions& opt);

PatternCounts pattern_counts(const BitSequence& s, std::size_t window, int k);

NormalityReport normality_measure(const BitSequence& s, int k, std::size_t min_window);

CorrelationReport correlation_exact(const BitSequence& s, int k, const ExactOptions& opt = {});

/// Off-peak C_2 over lags 1..max_lag with maximal windows, via FFT
/// autocorrelation. The lag sums are integers and are recovered exactly.
CorrelationReport correlation2_fast(const BitSequence& s, std::size_t max_lag);

/// Raw autocorrelation sums sum_{n} e_n e_{n+tau} for tau = 0..N-1.
std::vector<std::int64_t> autocorrelation_sums(const BitSequence& s);

/// 2 * P(s_n == s_{n+tau}) - 1 over the N - tau overlapping pairs.
double bitmatch_autocorr(const BitSequence& s, std::size_t lag);

/// (1/(2(m-1))) sum (y_{i+1} - y_i)^2.
double allan_variance(std::span<const double> series);

}  // namespace ringtrng
