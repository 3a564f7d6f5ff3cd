// ringtrng: command-line front end for the simulator and the randomness measures.
//
// Exit codes: 0 pass, 1 statistical fail (when gating), 2 usage error,
// 3 I/O or format error.

#include <fmt/format.h>

#include <CLI11.hpp>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "ringtrng/bitseq.hpp"
#include "ringtrng/bounds.hpp"
#include "ringtrng/error.hpp"
#include "ringtrng/ingest.hpp"
#include "ringtrng/markov.hpp"
#include "ringtrng/maurer.hpp"
#include "ringtrng/measures.hpp"
#include "ringtrng/rosim.hpp"
#include "ringtrng/sweep.hpp"

namespace {

using ringtrng::BitSequence;
using ringtrng::Error;
using ringtrng::ErrorKind;
using Json = nlohmann::ordered_json;

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::uint64_t default_seed() {
  if (const char* env = std::getenv("RINGTRNG_SEED"); env && *env) {
    try {
      std::size_t used = 0;
      const auto v = std::stoull(env, &used, 0);
      if (used == std::string(env).size()) return v;
    } catch (const std::exception&) {
    }
    throw UsageError(fmt::format("RINGTRNG_SEED is not an unsigned integer: '{}'", env));
  }
  return 1;
}

// Reproducibility header: printed before any result, as "# key = value" lines,
// or as the leading "parameters" object of a JSON document.
struct Header {
  std::string command;
  Json params = Json::object();

  template <class T>
  Header& add(const std::string& key, const T& value) {
    params[key] = value;
    return *this;
  }

  void print() const {
    fmt::print("# ringtrng {}\n", command);
    for (const auto& [k, v] : params.items()) {
      fmt::print("# {} = {}\n", k, v.is_string() ? v.get<std::string>() : v.dump());
    }
  }
};

Json config_json(const ringtrng::EroConfig& c) {
  Json j;
  j["extraction"] = std::string(ringtrng::to_string(c.extraction));
  j["f1_hz"] = c.f1_hz;
  j["f2_hz"] = c.f2_hz;
  j["fref_hz"] = c.fref_hz;
  j["jitter_rel"] = c.jitter_rel;
  j["ref_jitter_rel"] = c.ref_jitter_rel;
  j["xor_depth"] = c.xor_depth;
  j["accumulation"] = c.accumulation == ringtrng::Accumulation::Independent ? "independent" : "decimation";
  j["zero_phase"] = c.zero_phase;
  j["seed"] = c.seed;
  return j;
}

// JSON cannot hold NaN; map it to null.
Json num(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

// --- input handling shared by the analysis subcommands ---

struct Input {
  std::string path;
  std::vector<std::string> counters;

  void attach(CLI::App* cmd, bool allow_counters = true) {
    cmd->add_option("input", path, "Bit file (text 0/1 or packed RTL1)");
    if (allow_counters) {
      cmd->add_option("--counters", counters,
                      "Counter trace(s) instead of a bit file; two traces give differential bits")
          ->expected(1, 2);
    }
  }

  BitSequence load() const {
    if (!counters.empty()) {
      if (!path.empty()) throw UsageError("give either a bit file or --counters, not both");
      const auto a = ringtrng::read_counters(counters[0]);
      if (counters.size() == 1) return ringtrng::counters_to_bits(a);
      return ringtrng::differential_bits(a, ringtrng::read_counters(counters[1]));
    }
    if (path.empty()) throw UsageError("an input bit file is required");
    return ringtrng::read_bits(path);
  }

  std::string describe() const {
    if (counters.empty()) return path;
    return fmt::format("counters:{}", fmt::join(counters, ","));
  }
};

// --- generate ---

struct GenerateArgs {
  std::string preset;
  std::optional<double> f1, f2, fref, jitter, ref_jitter;
  std::string extraction;
  std::string accumulation = "independent";
  int xor_depth = 1;
  std::uint64_t seed = 0;
  std::size_t bits = 100'000;
  std::string out;
  std::string counters_out;
  bool packed = false;
  bool zero_phase = false;
};

ringtrng::EroConfig resolve_config(const GenerateArgs& a, bool seed_given) {
  ringtrng::EroConfig c;
  if (a.preset == "ideal-paper") {
    c = ringtrng::presets::ideal_noiseless();
  } else if (a.preset == "counter-default") {
    c = ringtrng::presets::counter_default();
  } else if (!a.preset.empty()) {
    throw UsageError(fmt::format("unknown preset '{}'", a.preset));
  }
  if (!a.extraction.empty()) c.extraction = ringtrng::parse_extraction(a.extraction);
  if (a.preset.empty() && !a.fref) {
    throw UsageError(fmt::format("--fref is required in {} mode without a preset",
                                 ringtrng::to_string(c.extraction)));
  }
  if (a.f1) c.f1_hz = *a.f1;
  if (a.f2) c.f2_hz = *a.f2;
  if (a.fref) c.fref_hz = *a.fref;
  if (a.jitter) c.jitter_rel = *a.jitter;
  if (a.ref_jitter) c.ref_jitter_rel = *a.ref_jitter;
  c.xor_depth = a.xor_depth;
  c.zero_phase = a.zero_phase;
  if (a.accumulation == "independent") {
    c.accumulation = ringtrng::Accumulation::Independent;
  } else if (a.accumulation == "decimation") {
    c.accumulation = ringtrng::Accumulation::Decimation;
  } else {
    throw UsageError(fmt::format("unknown accumulation '{}'", a.accumulation));
  }
  c.seed = seed_given ? a.seed : default_seed();
  if (auto why = ringtrng::invalid_reason(c)) throw UsageError(*why);
  return c;
}

int run_generate(const GenerateArgs& a, bool seed_given) {
  const auto cfg = resolve_config(a, seed_given);
  if (a.bits == 0) throw UsageError("--bits must be >= 1");
  Header h{"generate"};
  h.add("preset", a.preset.empty() ? "none" : a.preset).add("config", config_json(cfg));
  h.add("bits", a.bits).add("output", a.out.empty() ? "none" : a.out);
  h.add("format", a.packed ? "packed" : "text");
  if (!a.counters_out.empty()) h.add("counters_out", a.counters_out);
  h.print();

  const auto sim = ringtrng::simulate(cfg, a.bits);
  if (!a.out.empty()) {
    if (a.packed) ringtrng::write_packed_bits(a.out, sim.bits);
    else ringtrng::write_text_bits(a.out, sim.bits);
  }
  if (!a.counters_out.empty()) {
    if (sim.counters1.empty()) {
      throw UsageError("counter traces exist only for single-source counter extraction");
    }
    ringtrng::write_counters(a.counters_out + ".1.txt", sim.counters1);
    ringtrng::write_counters(a.counters_out + ".2.txt", sim.counters2);
  }
  const auto r = ringtrng::runs(sim.bits);
  fmt::print("bits: {}\nones: {}\nrun_mean: {:.6f}\nrun_sd: {:.6f}\n", sim.bits.size(),
             sim.bits.popcount(), r.mean, r.sd);
  const std::size_t head = std::min<std::size_t>(64, sim.bits.size());
  std::vector<std::uint8_t> first(head);
  for (std::size_t i = 0; i < head; ++i) first[i] = sim.bits[i];
  fmt::print("head: {}\n", ringtrng::format_bits(BitSequence(first), 0));
  return kExitPass;
}

// --- analyze ---

struct AnalyzeArgs {
  Input input;
  std::size_t max_lag = 0;
  bool full_lags = false;
  int b = 7;
  std::size_t q = 1280;
  std::size_t l = 0;
  int markov_k = 8;
  double z_threshold = 2.0;
  double c2_threshold = 0.01;
  bool no_gate = false;
  bool json = false;
  std::string report;
};

int run_analyze(const AnalyzeArgs& a) {
  const auto s = a.input.load();
  ringtrng::MetricOptions opt;
  opt.c2_max_lag = a.max_lag;
  if (a.full_lags) opt.c2_max_lag = std::max<std::size_t>(s.size() / 2, 1);
  if (!opt.c2_max_lag) opt.c2_max_lag = ringtrng::default_report_max_lag(s.size());
  opt.maurer = {a.b, a.q, a.l};
  opt.markov_k = a.markov_k;
  opt.z_threshold = a.z_threshold;
  opt.c2_threshold = a.c2_threshold;

  Header h{"analyze"};
  h.add("input", a.input.describe()).add("n_bits", s.size()).add("c2_max_lag", opt.c2_max_lag);
  h.add("maurer_b", a.b).add("maurer_q", a.q).add("maurer_l", a.l ? std::to_string(a.l) : "auto");
  h.add("markov_k", a.markov_k).add("z_threshold", a.z_threshold).add("c2_threshold", a.c2_threshold);
  h.add("gate", !a.no_gate);

  const auto m = ringtrng::compute_metrics(s, opt);
  const bool pass = m.pass_c2 && m.pass_z;

  Json rep;
  rep["parameters"] = h.params;
  rep["n_bits"] = s.size();
  rep["ones"] = s.popcount();
  rep["c2"] = {{"value", num(m.c2)}, {"lag", m.c2_lag}, {"max_lag", m.c2_max_lag}, {"pass", m.pass_c2}};
  rep["maurer"] = {{"b", m.maurer.block_length},
                   {"q", m.maurer.init_blocks},
                   {"l", m.maurer.test_blocks},
                   {"f_tu", num(m.maurer_ftu)},
                   {"expected", std::isnan(m.maurer_ftu) ? Json(nullptr) : num(ringtrng::expected_ftu(m.maurer.block_length))},
                   {"z", num(m.maurer_z)},
                   {"pass", m.pass_z}};
  rep["markov"] = {{"k", m.markov_k},
                   {"max_deviation", num(m.markov_maxdev)},
                   {"coverage", num(m.markov_coverage)},
                   {"conditional_entropy", num(m.markov_entropy)}};
  rep["runs"] = {{"mean", num(m.run_mean)}, {"sd", num(m.run_sd)}};
  rep["schmidt_bound_k2"] = num(m.schmidt_k2);
  rep["verdict"] = pass ? "pass" : "fail";
  rep["failure_reason"] = m.failure_reason;

  if (!a.report.empty()) {
    std::ofstream out(a.report, std::ios::trunc);
    if (!out) throw Error(ErrorKind::IoError, "cannot open " + a.report + " for writing");
    out << rep.dump(2) << '\n';
    if (!out) throw Error(ErrorKind::IoError, "write failed: " + a.report);
  }
  if (a.json) {
    fmt::print("{}\n", rep.dump(2));
  } else {
    h.print();
    fmt::print("n_bits: {}  ones: {}\n", s.size(), s.popcount());
    fmt::print("c2_offpeak: {:.6g} (lag {}, lags 1..{})  {}\n", m.c2, m.c2_lag, m.c2_max_lag,
               m.pass_c2 ? "ok" : "FAIL");
    fmt::print("maurer: b={} Q={} L={} f_tu={:.6f} Z={:.4f}  {}\n", m.maurer.block_length,
               m.maurer.init_blocks, m.maurer.test_blocks, m.maurer_ftu, m.maurer_z,
               m.pass_z ? "ok" : "FAIL");
    fmt::print("markov k={}: max_deviation={:.6f} coverage={:.4f} entropy={:.6f}\n", m.markov_k,
               m.markov_maxdev, m.markov_coverage, m.markov_entropy);
    fmt::print("runs: mean={:.4f} sd={:.4f}\n", m.run_mean, m.run_sd);
    fmt::print("schmidt_bound(2, N): {:.6f}\n", m.schmidt_k2);
    if (!m.failure_reason.empty()) fmt::print("failures: {}\n", m.failure_reason);
    fmt::print("verdict: {} (C2 < {} and |Z| < {})\n", pass ? "PASS" : "FAIL", a.c2_threshold,
               a.z_threshold);
  }
  if (a.no_gate) return kExitPass;
  return pass ? kExitPass : kExitFail;
}

// --- maurer ---

struct MaurerArgs {
  Input input;
  int b = 7;
  std::size_t q = 1280;
  std::size_t l = 0;
  double threshold = 2.0;
  bool no_gate = false;
};

int run_maurer(const MaurerArgs& a) {
  const auto s = a.input.load();
  Header h{"maurer"};
  h.add("input", a.input.describe()).add("n_bits", s.size()).add("b", a.b).add("q", a.q);
  h.add("l", a.l ? std::to_string(a.l) : "auto").add("z_threshold", a.threshold).add("gate", !a.no_gate);
  h.print();
  const auto r = ringtrng::maurer_test(s, {a.b, a.q, a.l}, a.threshold);
  fmt::print("L: {}\nf_tu: {:.8f}\nexpected: {:.8f}\nvariance: {:.6e}\nz: {:.6f}\n", r.params.test_blocks,
             r.f_tu, r.expected, r.variance, r.z);
  if (r.incomplete_init) fmt::print("warning: some {}-bit pattern never occurred in the Q init blocks\n", a.b);
  fmt::print("verdict: {}\n", r.pass ? "PASS" : "FAIL");
  if (a.no_gate) return kExitPass;
  return r.pass ? kExitPass : kExitFail;
}

// --- correlation ---

struct CorrelationArgs {
  Input input;
  int k = 2;
  bool exact = false;
  std::size_t max_lag = 0;
  std::size_t min_window = 0;
  bool maximal = false;
  std::uint64_t budget = 1'000'000'000ULL;
  bool force = false;
  int normality_k = 0;
};

int run_correlation(const CorrelationArgs& a) {
  const auto s = a.input.load();
  const bool fast = !a.exact;
  if (fast && a.k != 2) throw UsageError("the FFT route computes C_2 only; use --exact for k > 2");
  Header h{"correlation"};
  h.add("input", a.input.describe()).add("n_bits", s.size()).add("k", a.k);
  h.add("mode", fast ? "acf-fast" : "exact");
  std::size_t max_lag = a.max_lag;
  if (fast) {
    if (!max_lag) max_lag = ringtrng::default_report_max_lag(s.size());
    h.add("max_lag", max_lag);
  } else {
    h.add("max_lag", max_lag ? std::to_string(max_lag) : "N-1");
    h.add("min_window", a.min_window ? a.min_window : ringtrng::default_min_window(s.size()));
    h.add("maximal_window_only", a.maximal).add("budget", a.budget).add("force", a.force);
  }
  h.print();

  ringtrng::CorrelationReport r;
  if (fast) {
    r = ringtrng::correlation2_fast(s, max_lag);
  } else {
    ringtrng::ExactOptions opt;
    opt.max_lag = max_lag;
    opt.min_window = a.min_window;
    opt.maximal_window_only = a.maximal;
    opt.budget = a.budget;
    opt.force = a.force;
    r = ringtrng::correlation_exact(s, a.k, opt);
  }
  fmt::print("C_{}: {:.8f}\nlags: {}\nwindow: {}\n", r.order, r.value, fmt::join(r.lags, ","), r.window);
  if (s.size() >= 2) {
    fmt::print("schmidt_bound: {:.6f}\nalon_bound: {:.6f}\n", ringtrng::schmidt_bound(a.k, s.size()),
               ringtrng::alon_bound(a.k, s.size()));
  }
  if (a.normality_k > 0) {
    const auto nk = ringtrng::normality_measure(
        s, a.normality_k, std::max<std::size_t>(a.min_window, static_cast<std::size_t>(a.normality_k)));
    fmt::print("N_{}: {:.8f} (pattern {}, window {})\n", a.normality_k, nk.value, nk.pattern, nk.window);
  }
  return kExitPass;
}

// --- markov ---

struct MarkovArgs {
  Input input;
  int k = 8;
  bool laplace = false;
  bool table = false;
};

int run_markov(const MarkovArgs& a) {
  const auto s = a.input.load();
  Header h{"markov"};
  h.add("input", a.input.describe()).add("n_bits", s.size()).add("k", a.k).add("laplace", a.laplace);
  h.print();
  const auto t = ringtrng::fit_transition(s, a.k);
  const auto band = ringtrng::sqrtn_band_check(t, s.size());
  fmt::print("contexts: {}\ncoverage: {:.6f}\ntransitions: {}\n", t.contexts(), t.coverage(), t.transitions());
  if (t.transitions() > 0 && t.coverage() > 0) {
    const auto d = ringtrng::max_deviation(t);
    fmt::print("max_deviation: {:.8f} (context {}, next {})\n", d.value, d.context, d.bit);
  }
  fmt::print("conditional_entropy: {:.8f}\n", ringtrng::conditional_entropy(t, a.laplace));
  fmt::print("sqrtn_band: {} (half width {:.6f}, {} offending contexts)\n", band.ok ? "ok" : "violated",
             band.half_width, band.offending.size());
  if (a.table) {
    fmt::print("context,n0,n1,p1\n");
    for (std::size_t c = 0; c < t.contexts(); ++c) {
      const auto p = t.prob(c, 1);
      fmt::print("{},{},{},{}\n", c, t.next_count(c, 0), t.next_count(c, 1),
                 p ? fmt::format("{:.6f}", *p) : std::string("-"));
    }
  }
  return kExitPass;
}

// --- bounds ---

struct BoundsEvalArgs {
  int k = 2;
  std::size_t n = 100'000;
  std::optional<double> ck;
  std::size_t test_blocks = 0;
  std::size_t maurer_window = 0;
  int xor_n = 0;
};

int run_bounds_eval(const BoundsEvalArgs& a) {
  Header h{"bounds eval"};
  h.add("k", a.k).add("n", a.n);
  if (a.ck) h.add("ck", *a.ck);
  if (a.test_blocks) h.add("L", a.test_blocks);
  if (a.maurer_window) h.add("M", a.maurer_window);
  if (a.xor_n) h.add("xor_n", a.xor_n);
  h.print();
  fmt::print("schmidt_bound: {:.8f}\nalon_bound: {:.8f}\n", ringtrng::schmidt_bound(a.k, a.n),
             ringtrng::alon_bound(a.k, a.n));
  if (a.ck) {
    try {
      fmt::print("theorem1_bound: {:.8f}\n", ringtrng::theorem1_bound(a.k, *a.ck));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::PreconditionFailed) throw;
      fmt::print("theorem1_bound: not applicable ({})\n", e.what());
    }
    if (a.test_blocks && a.maurer_window) {
      try {
        const auto t2 = ringtrng::theorem2_bounds(a.k, *a.ck, a.test_blocks, a.maurer_window);
        fmt::print("theorem2_lower: {:.8f}\ntheorem2_upper: {:.8f}\n", t2.lower, t2.upper);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::PreconditionFailed) throw;
        fmt::print("theorem2: not applicable ({})\n", e.what());
      }
    }
    if (a.xor_n) fmt::print("xor_estimate: {:.8e}\n", ringtrng::xor_accumulation_estimate(*a.ck, a.xor_n));
  }
  return kExitPass;
}

int report_check(const ringtrng::BoundCheckResult& r) {
  fmt::print("bound: {}\n", r.bound_name);
  fmt::print("C_k: {:.8f} (lags {}, window {})\n", r.ck, fmt::join(r.correlation.lags, ","), r.correlation.window);
  if (!r.precondition_ok) {
    fmt::print("precondition: failed ({})\nresult: not applicable\n", r.failed_condition);
    return kExitPass;
  }
  fmt::print("bound_values: {}\nmeasured: {:.8f}\n", fmt::join(r.bound_values, ", "), r.measured);
  if (r.satisfied.value_or(true)) {
    fmt::print("result: holds\n");
    return kExitPass;
  }
  fmt::print("result: VIOLATED\nwitness: {}\n", r.witness);
  return kExitFail;
}

struct CheckArgs {
  Input input;
  int k = 2;
  int b = 2;
  std::size_t q = 64;
  std::size_t l = 0;
  std::size_t min_window = 0;
  std::uint64_t budget = 1'000'000'000ULL;
  bool force = false;
};

int run_check_t1(const CheckArgs& a) {
  const auto s = a.input.load();
  Header h{"bounds check-t1"};
  h.add("input", a.input.describe()).add("n_bits", s.size()).add("k", a.k);
  h.add("min_window", a.min_window ? a.min_window : (s.size() + 1) / 2).add("budget", a.budget).add("force", a.force);
  h.print();
  return report_check(ringtrng::theorem1_check(s, a.k, {a.min_window, a.budget, a.force}));
}

int run_check_t2(const CheckArgs& a) {
  const auto s = a.input.load();
  Header h{"bounds check-t2"};
  h.add("input", a.input.describe()).add("n_bits", s.size()).add("b", a.b).add("q", a.q);
  h.add("l", a.l ? std::to_string(a.l) : "auto");
  h.add("min_window", a.min_window ? a.min_window : (s.size() + 1) / 2).add("budget", a.budget).add("force", a.force);
  h.print();
  return report_check(ringtrng::theorem2_check(s, {a.b, a.q, a.l}, {a.min_window, a.budget, a.force}));
}

// --- sweep ---

struct SweepArgs {
  std::string preset = "sweep-paper";
  std::string csv;
  std::string svg;
  std::uint64_t seed = 0;
  std::size_t bits = 100'000;
  std::size_t replicates = 1;
  unsigned workers = 0;
};

int run_sweep_cmd(const SweepArgs& a, bool seed_given) {
  if (a.preset != "sweep-paper") throw UsageError(fmt::format("unknown sweep preset '{}'", a.preset));
  auto grid = ringtrng::presets::default_sweep();
  grid.base_seed = seed_given ? a.seed : default_seed();
  grid.n_bits = a.bits;
  grid.replicates = a.replicates;
  if (a.bits < 2) throw UsageError("--bits must be >= 2");
  const auto built = ringtrng::build_grid(grid);

  Header h{"sweep"};
  h.add("preset", a.preset).add("base_seed", grid.base_seed).add("bits", a.bits);
  h.add("replicates", a.replicates).add("workers", a.workers ? std::to_string(a.workers) : "auto");
  h.add("configs", built.configs.size()).add("skipped", built.skipped);
  h.add("csv", a.csv.empty() ? "none" : a.csv).add("svg", a.svg.empty() ? "none" : a.svg);
  h.print();

  ringtrng::SweepOptions opt;
  opt.n_bits = a.bits;
  opt.replicates = a.replicates;
  opt.workers = a.workers;
  const auto records = ringtrng::run_sweep(built.configs, opt);
  if (!a.csv.empty()) ringtrng::emit_csv(records, a.csv);
  if (!a.svg.empty()) ringtrng::emit_scatter(records, a.svg);

  std::size_t joint = 0, failed = 0;
  for (const auto& r : records) {
    joint += r.metrics.pass_c2 && r.metrics.pass_z;
    failed += !r.metrics.failure_reason.empty();
  }
  fmt::print("records: {}\njoint_pass: {}\nfailed_metrics: {}\n", records.size(), joint, failed);
  for (const auto& c : ringtrng::summarize_correlations(records)) {
    fmt::print("pearson {}: r={:.4f} n={} ci95=[{:.4f}, {:.4f}]\n", c.label, c.r, c.n, c.ci_lo, c.ci_hi);
  }
  return kExitPass;
}

// --- ingest ---

struct IngestArgs {
  std::vector<std::string> traces;
  std::string out;
  bool packed = false;
};

int run_ingest(const IngestArgs& a) {
  Header h{"ingest"};
  h.add("traces", fmt::format("{}", fmt::join(a.traces, ","))).add("output", a.out);
  h.add("mode", a.traces.size() == 2 ? "differential" : "lsb").add("format", a.packed ? "packed" : "text");
  h.print();
  const auto first = ringtrng::read_counters(a.traces[0]);
  const auto bits = a.traces.size() == 1
                        ? ringtrng::counters_to_bits(first)
                        : ringtrng::differential_bits(first, ringtrng::read_counters(a.traces[1]));
  if (a.packed) ringtrng::write_packed_bits(a.out, bits);
  else ringtrng::write_text_bits(a.out, bits);
  fmt::print("bits: {}\nones: {}\n", bits.size(), bits.popcount());
  return kExitPass;
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::IoError:
    case ErrorKind::MalformedBit:
    case ErrorKind::MalformedCounter:
    case ErrorKind::EmptySequence:
    case ErrorKind::LengthMismatch:
      return kExitIo;
    default:
      return kExitUsage;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ring-oscillator TRNG simulator and randomness analysis"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Simulate an ERO and write the bit sequence");
  generate->add_option("--preset", gen.preset, "ideal-paper or counter-default");
  generate->add_option("--f1", gen.f1, "Oscillator 1 frequency [Hz]");
  generate->add_option("--f2", gen.f2, "Oscillator 2 frequency [Hz]");
  generate->add_option("--fref", gen.fref, "Reference clock frequency [Hz]");
  generate->add_option("--jitter", gen.jitter, "Period jitter sd relative to the period");
  generate->add_option("--ref-jitter", gen.ref_jitter, "Reference clock jitter, relative");
  generate->add_option("--extraction", gen.extraction, "counter, sampling or ideal");
  generate->add_option("--xor", gen.xor_depth, "Number of XORed sources")->check(CLI::PositiveNumber);
  generate->add_option("--accumulation", gen.accumulation, "independent or decimation");
  auto* gen_seed = generate->add_option("--seed", gen.seed, "Seed (default RINGTRNG_SEED or 1)");
  generate->add_option("--bits", gen.bits, "Number of output bits");
  generate->add_option("-o,--output", gen.out, "Output bit file");
  generate->add_flag("--packed", gen.packed, "Write the packed binary format");
  generate->add_option("--counters-out", gen.counters_out, "Write counter traces to PREFIX.1.txt and PREFIX.2.txt");
  generate->add_flag("--zero-phase", gen.zero_phase, "Start every oscillator at t = 0");

  AnalyzeArgs an;
  auto* analyze = app.add_subcommand("analyze", "Full report with the joint C2 / Maurer verdict");
  an.input.attach(analyze);
  analyze->add_option("--max-lag", an.max_lag, "C2 lag range (default floor(10 log10 N))");
  analyze->add_flag("--full-lags", an.full_lags, "C2 over lags 1..N/2");
  analyze->add_option("--b", an.b, "Maurer block length");
  analyze->add_option("--q", an.q, "Maurer init blocks");
  analyze->add_option("--l", an.l, "Maurer test blocks (default: all remaining)");
  analyze->add_option("--markov-k", an.markov_k, "Markov memory");
  analyze->add_option("--z-threshold", an.z_threshold);
  analyze->add_option("--c2-threshold", an.c2_threshold);
  analyze->add_flag("--no-gate", an.no_gate, "Exit 0 even when the verdict fails");
  analyze->add_flag("--json", an.json, "Print the structured report as JSON");
  analyze->add_option("--report", an.report, "Also write the JSON report to a file");

  MaurerArgs ma;
  auto* maurer = app.add_subcommand("maurer", "Maurer universal test");
  ma.input.attach(maurer);
  maurer->add_option("--b", ma.b, "Block length");
  maurer->add_option("--q", ma.q, "Init blocks");
  maurer->add_option("--l", ma.l, "Test blocks (default: all remaining)");
  maurer->add_option("--threshold", ma.threshold, "|Z| pass threshold");
  maurer->add_flag("--no-gate", ma.no_gate);

  CorrelationArgs co;
  auto* correlation = app.add_subcommand("correlation", "Correlation measure C_k");
  co.input.attach(correlation);
  correlation->add_option("--k", co.k, "Order");
  correlation->add_flag("--exact", co.exact, "Exhaustive search over lag vectors and windows");
  correlation->add_option("--max-lag", co.max_lag);
  correlation->add_option("--min-window", co.min_window);
  correlation->add_flag("--maximal-window", co.maximal, "Exact mode: only M = N - d_max");
  correlation->add_option("--budget", co.budget, "Exact mode: maximum elementary products");
  correlation->add_flag("--force", co.force, "Exact mode: ignore the budget");
  correlation->add_option("--normality", co.normality_k, "Also report the normality measure N_k");

  MarkovArgs mk;
  auto* markov = app.add_subcommand("markov", "Memory-k transition table");
  mk.input.attach(markov);
  markov->add_option("--k", mk.k, "Memory (context is k-1 bits)");
  markov->add_flag("--laplace", mk.laplace, "Add-one-half smoothing for the entropy");
  markov->add_flag("--table", mk.table, "Print the full table");

  auto* bounds = app.add_subcommand("bounds", "Correlation bounds");
  bounds->require_subcommand(1);
  BoundsEvalArgs be;
  auto* beval = bounds->add_subcommand("eval", "Evaluate bound formulas");
  beval->add_option("--k", be.k);
  beval->add_option("--n", be.n);
  beval->add_option("--ck", be.ck, "Measured C_k");
  beval->add_option("--L", be.test_blocks, "Maurer test blocks");
  beval->add_option("--M", be.maurer_window, "Maurer window (Q+L)*b");
  beval->add_option("--xor-n", be.xor_n, "XOR depth for the C_k^n estimate");
  CheckArgs c1;
  auto* check1 = bounds->add_subcommand("check-t1", "Markov deviation vs the C_k bound");
  c1.input.attach(check1);
  check1->add_option("--k", c1.k);
  check1->add_option("--min-window", c1.min_window);
  check1->add_option("--budget", c1.budget);
  check1->add_flag("--force", c1.force);
  CheckArgs c2;
  auto* check2 = bounds->add_subcommand("check-t2", "Maurer statistic vs the C_b sandwich");
  c2.input.attach(check2);
  check2->add_option("--b", c2.b);
  check2->add_option("--q", c2.q);
  check2->add_option("--l", c2.l);
  check2->add_option("--min-window", c2.min_window);
  check2->add_option("--budget", c2.budget);
  check2->add_flag("--force", c2.force);

  SweepArgs sw;
  auto* sweep = app.add_subcommand("sweep", "Parameter sweep with CSV and scatter output");
  sweep->add_option("--preset", sw.preset, "sweep-paper");
  sweep->add_option("--csv", sw.csv);
  sweep->add_option("--svg", sw.svg);
  auto* sweep_seed = sweep->add_option("--seed", sw.seed, "Base seed (default RINGTRNG_SEED or 1)");
  sweep->add_option("--bits", sw.bits);
  sweep->add_option("--replicates", sw.replicates)->check(CLI::PositiveNumber);
  sweep->add_option("--workers", sw.workers);

  IngestArgs in;
  auto* ingest = app.add_subcommand("ingest", "Convert counter traces to a bit file");
  ingest->add_option("traces", in.traces, "One trace (LSB) or two (differential)")->required()->expected(1, 2);
  ingest->add_option("-o,--output", in.out)->required();
  ingest->add_flag("--packed", in.packed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitUsage;
  }

  try {
    if (*generate) return run_generate(gen, gen_seed->count() > 0);
    if (*analyze) return run_analyze(an);
    if (*maurer) return run_maurer(ma);
    if (*correlation) return run_correlation(co);
    if (*markov) return run_markov(mk);
    if (*beval) return run_bounds_eval(be);
    if (*check1) return run_check_t1(c1);
    if (*check2) return run_check_t2(c2);
    if (*sweep) return run_sweep_cmd(sw, sweep_seed->count() > 0);
    if (*ingest) return run_ingest(in);
  } catch (const UsageError& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitUsage;
  } catch (const Error& e) {
    fmt::print(stderr, "error [{}]: {}\n", ringtrng::to_string(e.kind()), e.what());
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitIo;
  }
  return kExitUsage;
}
