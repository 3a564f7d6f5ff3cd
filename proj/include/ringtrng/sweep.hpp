#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ringtrng/bitseq.hpp"
#include "ringtrng/maurer.hpp"
#include "ringtrng/rosim.hpp"

namespace ringtrng {

struct SweepGrid {
  std::vector<double> f1_hz;
  std::vector<double> f2_ratio;
  std::vector<double> fref_hz;
  std::vector<int> xor_depths;
  std::vector<Extraction> extractions;
  std::vector<double> jitter_rel;
  std::size_t n_bits = 100'000;
  std::uint64_t base_seed = 1;
  std::size_t replicates = 1;
};

namespace presets {
/// f1 in {100,150,200,250} MHz, f2/f1 in {0.7,0.9,1.1,1.4}, fref in
/// {50,100,150} MHz, n in {1,2,4,8,16}, counter extraction, 5% jitter.
SweepGrid default_sweep();
}  // namespace presets

struct GridConfig {
  std::size_t config_id = 0;
  EroConfig config;
};

struct BuiltGrid {
  std::vector<GridConfig> configs;
  std::size_t skipped = 0;  // combinations violating EroConfig invariants
};

/// Cartesian product in field order f1, f2_ratio, fref, xor_depth, extraction,
/// jitter (last varies fastest). Valid configs are numbered 0.. and seeded
/// with mix_seed(base_seed, config_id).
BuiltGrid build_grid(const SweepGrid& grid);

/// What every report computes for one bit sequence.
struct MetricOptions {
  std::size_t c2_max_lag = 0;  // 0 selects default_report_max_lag(N)
  MaurerParams maurer{7, 1280, 0};
  int markov_k = 8;
  double z_threshold = 2.0;
  double c2_threshold = 0.01;
};

struct Metrics {
  double c2 = 0.0;
  std::size_t c2_lag = 0;
  std::size_t c2_max_lag = 0;
  MaurerParams maurer{};
  double maurer_ftu = 0.0;
  double maurer_z = 0.0;
  int markov_k = 8;
  double markov_maxdev = 0.0;
  double markov_coverage = 0.0;
  double markov_entropy = 0.0;
  double run_mean = 0.0;
  double run_sd = 0.0;
  double schmidt_k2 = 0.0;
  bool pass_z = false;
  bool pass_c2 = false;
  std::string failure_reason;  // empty when every metric was computed
};

/// Never throws on metric failures; fields that could not be computed are NaN
/// and the reason is collected in failure_reason.
Metrics compute_metrics(const BitSequence& s, const MetricOptions& opt = {});

struct SweepRecord {
  std::size_t config_id = 0;
  EroConfig config;
  std::size_t replicate = 0;
  std::size_t n_bits = 0;
  Metrics metrics;
};

struct SweepOptions {
  std::size_t n_bits = 100'000;
  std::size_t replicates = 1;
  unsigned workers = 0;  // 0 selects hardware concurrency
  MetricOptions metrics;
};

/// Replicate r of a config simulates with seed mix_seed(config.seed, r).
/// Records come back ordered by (config_id, replicate) whatever the schedule.
std::vector<SweepRecord> run_sweep(std::span<const GridConfig> configs, const SweepOptions& opt);

/// Sample Pearson correlation coefficient.
double pearson(std::span<const double> xs, std::span<const double> ys);

/// tanh(atanh(r) +- z / sqrt(n - 3)) with z the two-sided normal quantile.
std::pair<double, double> fisher_ci(double r, std::size_t n, double level = 0.95);

struct CorrelationSummary {
  std::string label;
  std::size_t n = 0;
  double r = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
};

/// Pearson r with Fisher CI for (|Z|, C_2), (Z, C_2) and (|Z|, log10 C_2) over
/// records without failures.
std::vector<CorrelationSummary> summarize_correlations(std::span<const SweepRecord> records);

/// Fixed CSV header, in column order.
const std::vector<std::string>& csv_header();

std::string format_csv(std::span<const SweepRecord> records);
void emit_csv(std::span<const SweepRecord> records, const std::filesystem::path& path);

/// Parses a CSV produced by emit_csv.
std::vector<SweepRecord> parse_csv(std::string_view text);

/// Standalone SVG: C_2 (log axis) against Maurer Z, colour by xor depth,
/// dashed line at the Schmidt bound.
std::string format_scatter(std::span<const SweepRecord> records);
void emit_scatter(std::span<const SweepRecord> records, const std::filesystem::path& path);

}  // namespace ringtrng
