#include "ringtrng/sweep.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <boost/math/distributions/normal.hpp>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <thread>

#include "ringtrng/bounds.hpp"
#include "ringtrng/error.hpp"
#include "ringtrng/markov.hpp"
#include "ringtrng/measures.hpp"
#include "ringtrng/seed.hpp"

namespace ringtrng {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void append_reason(std::string& reasons, std::string_view what, const std::exception& e) {
  if (!reasons.empty()) reasons += "; ";
  reasons += fmt::format("{}: {}", what, e.what());
}

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  return fmt::format("{:.12g}", v);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else if (c == '\n') out += ' ';
    else out += c;
  }
  out += '"';
  return out;
}

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else {
      fields.back() += c;
    }
  }
  return fields;
}

double to_double(const std::string& s) {
  if (s == "nan") return kNaN;
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw Error(ErrorKind::InvalidArgument, "bad number in CSV: " + s);
  return v;
}

std::uint64_t to_u64(const std::string& s) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw Error(ErrorKind::InvalidArgument, "bad integer in CSV: " + s);
  }
  return v;
}

}  // namespace

namespace presets {

SweepGrid default_sweep() {
  SweepGrid g;
  g.f1_hz = {100e6, 150e6, 200e6, 250e6};
  g.f2_ratio = {0.7, 0.9, 1.1, 1.4};
  g.fref_hz = {50e6, 100e6, 150e6};
  g.xor_depths = {1, 2, 4, 8, 16};
  g.extractions = {Extraction::Counter};
  g.jitter_rel = {0.05};
  g.n_bits = 100'000;
  g.base_seed = 1;
  g.replicates = 1;
  return g;
}

}  // namespace presets

BuiltGrid build_grid(const SweepGrid& grid) {
  if (grid.f1_hz.empty() || grid.f2_ratio.empty() || grid.fref_hz.empty() || grid.xor_depths.empty() ||
      grid.extractions.empty() || grid.jitter_rel.empty()) {
    throw Error(ErrorKind::EmptyGrid, "every grid field needs at least one value");
  }
  BuiltGrid out;
  for (double f1 : grid.f1_hz)
    for (double ratio : grid.f2_ratio)
      for (double fref : grid.fref_hz)
        for (int depth : grid.xor_depths)
          for (Extraction ex : grid.extractions)
            for (double jitter : grid.jitter_rel) {
              EroConfig c;
              c.f1_hz = f1;
              c.f2_hz = f1 * ratio;
              c.fref_hz = fref;
              c.xor_depth = depth;
              c.extraction = ex;
              c.jitter_rel = ex == Extraction::Ideal ? 0.0 : jitter;
              if (invalid_reason(c)) {
                ++out.skipped;
                continue;
              }
              const std::size_t id = out.configs.size();
              c.seed = mix_seed(grid.base_seed, id);
              out.configs.push_back({id, c});
            }
  if (out.configs.empty()) throw Error(ErrorKind::EmptyGrid, "no valid configuration in grid");
  return out;
}

Metrics compute_metrics(const BitSequence& s, const MetricOptions& opt) {
  Metrics m;
  m.markov_k = opt.markov_k;
  m.maurer = opt.maurer;
  m.c2 = m.maurer_ftu = m.maurer_z = m.markov_maxdev = kNaN;
  m.markov_coverage = m.markov_entropy = kNaN;
  m.schmidt_k2 = kNaN;

  try {
    m.c2_max_lag = opt.c2_max_lag ? opt.c2_max_lag : default_report_max_lag(s.size());
    const auto c2 = correlation2_fast(s, m.c2_max_lag);
    m.c2 = c2.value;
    m.c2_lag = c2.lags.front();
  } catch (const std::exception& e) {
    append_reason(m.failure_reason, "c2", e);
  }
  try {
    const auto rep = maurer_test(s, opt.maurer, opt.z_threshold);
    m.maurer = rep.params;
    m.maurer_ftu = rep.f_tu;
    m.maurer_z = rep.z;
  } catch (const std::exception& e) {
    append_reason(m.failure_reason, "maurer", e);
  }
  try {
    const auto table = fit_transition(s, opt.markov_k);
    m.markov_maxdev = max_deviation(table).value;
    m.markov_coverage = table.coverage();
    m.markov_entropy = conditional_entropy(table);
  } catch (const std::exception& e) {
    append_reason(m.failure_reason, "markov", e);
  }
  const auto r = runs(s);
  m.run_mean = r.mean;
  m.run_sd = r.sd;
  try {
    m.schmidt_k2 = schmidt_bound(2, s.size());
  } catch (const std::exception& e) {
    append_reason(m.failure_reason, "schmidt", e);
  }
  m.pass_z = std::fabs(m.maurer_z) < opt.z_threshold;
  m.pass_c2 = m.c2 < opt.c2_threshold;
  return m;
}

std::vector<SweepRecord> run_sweep(std::span<const GridConfig> configs, const SweepOptions& opt) {
  if (configs.empty()) throw Error(ErrorKind::EmptyGrid, "no configurations to run");
  if (opt.replicates == 0) throw Error(ErrorKind::InvalidArgument, "replicates must be >= 1");

  const std::size_t total = configs.size() * opt.replicates;
  std::vector<SweepRecord> records(total);
  std::atomic<std::size_t> next{0};

  auto work = [&] {
    for (std::size_t job = next++; job < total; job = next++) {
      const auto& gc = configs[job / opt.replicates];
      SweepRecord& rec = records[job];
      rec.config_id = gc.config_id;
      rec.replicate = job % opt.replicates;
      rec.n_bits = opt.n_bits;
      rec.config = gc.config;
      rec.config.seed = mix_seed(gc.config.seed, rec.replicate);
      try {
        const auto sim = simulate(rec.config, opt.n_bits);
        rec.metrics = compute_metrics(sim.bits, opt.metrics);
      } catch (const std::exception& e) {
        rec.metrics = Metrics{};
        rec.metrics.c2 = rec.metrics.maurer_ftu = rec.metrics.maurer_z = kNaN;
        rec.metrics.markov_maxdev = rec.metrics.run_mean = rec.metrics.run_sd = kNaN;
        rec.metrics.schmidt_k2 = schmidt_bound(2, std::max<std::size_t>(opt.n_bits, 2));
        rec.metrics.failure_reason = fmt::format("simulate: {}", e.what());
      }
    }
  };

  unsigned workers = opt.workers ? opt.workers : std::max(1U, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, total));
  std::vector<std::jthread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  pool.clear();
  return records;
}

double pearson(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw Error(ErrorKind::LengthMismatch, "pearson: length mismatch");
  if (xs.size() < 3) throw Error(ErrorKind::DegenerateInput, "pearson needs at least 3 points");
  const double n = static_cast<double>(xs.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw Error(ErrorKind::DegenerateInput, "pearson: zero variance");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::pair<double, double> fisher_ci(double r, std::size_t n, double level) {
  if (!(std::fabs(r) < 1.0)) throw Error(ErrorKind::DegenerateInput, "fisher_ci needs |r| < 1");
  if (n < 4) throw Error(ErrorKind::DegenerateInput, "fisher_ci needs n >= 4");
  if (!(level > 0.0 && level < 1.0)) throw Error(ErrorKind::InvalidArgument, "level must lie in (0, 1)");
  const double z = boost::math::quantile(boost::math::normal(), 0.5 + level / 2.0);
  const double half = z / std::sqrt(static_cast<double>(n) - 3.0);
  const double centre = std::atanh(r);
  return {std::tanh(centre - half), std::tanh(centre + half)};
}

std::vector<CorrelationSummary> summarize_correlations(std::span<const SweepRecord> records) {
  std::vector<double> c2, log_c2, z, abs_z;
  for (const auto& rec : records) {
    const auto& m = rec.metrics;
    if (!m.failure_reason.empty() || std::isnan(m.c2) || std::isnan(m.maurer_z)) continue;
    c2.push_back(m.c2);
    log_c2.push_back(std::log10(std::max(m.c2, 1e-12)));
    z.push_back(m.maurer_z);
    abs_z.push_back(std::fabs(m.maurer_z));
  }
  std::vector<CorrelationSummary> out;
  auto add = [&](std::string label, const std::vector<double>& xs, const std::vector<double>& ys) {
    CorrelationSummary s{std::move(label), xs.size(), kNaN, kNaN, kNaN};
    try {
      s.r = pearson(xs, ys);
      std::tie(s.ci_lo, s.ci_hi) = fisher_ci(s.r, s.n);
    } catch (const Error&) {
    }
    out.push_back(s);
  };
  add("abs_z_vs_c2", abs_z, c2);
  add("z_vs_c2", z, c2);
  add("abs_z_vs_log10_c2", abs_z, log_c2);
  return out;
}

const std::vector<std::string>& csv_header() {
  static const std::vector<std::string> header = {
      "config_id", "extraction", "f1_hz", "f2_hz", "fref_hz", "jitter_rel", "xor_depth", "replicate",
      "n_bits", "c2_offpeak", "c2_lag", "maurer_b", "maurer_q", "maurer_l", "maurer_ftu", "maurer_z",
      "markov_k", "markov_maxdev", "run_mean", "run_sd", "schmidt_bound_k2", "pass_z", "pass_c2",
      "failure_reason"};
  return header;
}

std::string format_csv(std::span<const SweepRecord> records) {
  std::string out = fmt::format("{}\n", fmt::join(csv_header(), ","));
  for (const auto& r : records) {
    const auto& c = r.config;
    const auto& m = r.metrics;
    out += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
                       r.config_id, to_string(c.extraction), num(c.f1_hz), num(c.f2_hz), num(c.fref_hz),
                       num(c.jitter_rel), c.xor_depth, r.replicate, r.n_bits, num(m.c2), m.c2_lag,
                       m.maurer.block_length, m.maurer.init_blocks, m.maurer.test_blocks,
                       num(m.maurer_ftu), num(m.maurer_z), m.markov_k, num(m.markov_maxdev),
                       num(m.run_mean), num(m.run_sd), num(m.schmidt_k2), m.pass_z ? 1 : 0,
                       m.pass_c2 ? 1 : 0, csv_field(m.failure_reason));
  }
  return out;
}

void emit_csv(std::span<const SweepRecord> records, const std::filesystem::path& path) {
  if (records.empty()) throw Error(ErrorKind::InvalidArgument, "no records to write");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoError, "cannot open " + path.string() + " for writing");
  out << format_csv(records);
  if (!out) throw Error(ErrorKind::IoError, "write failed: " + path.string());
}

std::vector<SweepRecord> parse_csv(std::string_view text) {
  std::vector<SweepRecord> out;
  bool header = true;
  while (!text.empty()) {
    const auto eol = text.find('\n');
    const auto line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    if (line.empty()) continue;
    auto f = split_csv_line(line);
    if (header) {
      if (f != csv_header()) throw Error(ErrorKind::InvalidArgument, "unexpected CSV header");
      header = false;
      continue;
    }
    if (f.size() != csv_header().size()) {
      throw Error(ErrorKind::InvalidArgument, "CSV row has the wrong number of fields");
    }
    SweepRecord r;
    r.config_id = to_u64(f[0]);
    r.config.extraction = parse_extraction(f[1]);
    r.config.f1_hz = to_double(f[2]);
    r.config.f2_hz = to_double(f[3]);
    r.config.fref_hz = to_double(f[4]);
    r.config.jitter_rel = to_double(f[5]);
    r.config.xor_depth = static_cast<int>(to_u64(f[6]));
    r.replicate = to_u64(f[7]);
    r.n_bits = to_u64(f[8]);
    auto& m = r.metrics;
    m.c2 = to_double(f[9]);
    m.c2_lag = to_u64(f[10]);
    m.maurer.block_length = static_cast<int>(to_u64(f[11]));
    m.maurer.init_blocks = to_u64(f[12]);
    m.maurer.test_blocks = to_u64(f[13]);
    m.maurer_ftu = to_double(f[14]);
    m.maurer_z = to_double(f[15]);
    m.markov_k = static_cast<int>(to_u64(f[16]));
    m.markov_maxdev = to_double(f[17]);
    m.run_mean = to_double(f[18]);
    m.run_sd = to_double(f[19]);
    m.schmidt_k2 = to_double(f[20]);
    m.pass_z = f[21] == "1";
    m.pass_c2 = f[22] == "1";
    m.failure_reason = f[23];
    out.push_back(std::move(r));
  }
  return out;
}

std::string format_scatter(std::span<const SweepRecord> records) {
  constexpr double kWidth = 720, kHeight = 480;
  constexpr double kLeft = 70, kRight = 150, kTop = 30, kBottom = 60;
  constexpr double kMinC2 = 1e-4;
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;

  double xmin = -3.0;  // log10 C_2
  double zmin = -3.0, zmax = 3.0;
  double schmidt = kNaN;
  for (const auto& r : records) {
    const auto& m = r.metrics;
    if (!std::isnan(m.schmidt_k2)) schmidt = m.schmidt_k2;
    if (std::isnan(m.c2) || std::isnan(m.maurer_z)) continue;
    xmin = std::min(xmin, std::floor(std::log10(std::max(m.c2, kMinC2))));
    zmin = std::min(zmin, m.maurer_z);
    zmax = std::max(zmax, m.maurer_z);
  }
  const double zpad = 0.05 * (zmax - zmin);
  zmin -= zpad;
  zmax += zpad;
  auto px = [&](double c2) {
    return kLeft + (std::log10(std::max(c2, kMinC2)) - xmin) / (0.0 - xmin) * plot_w;
  };
  auto py = [&](double z) { return kTop + (zmax - z) / (zmax - zmin) * plot_h; };

  static const std::map<int, const char*> palette = {
      {1, "#d62728"}, {2, "#ff7f0e"}, {4, "#2ca02c"}, {8, "#1f77b4"}, {16, "#9467bd"}};
  auto colour = [&](int depth) {
    const auto it = palette.find(depth);
    return it == palette.end() ? "#7f7f7f" : it->second;
  };

  std::string svg = fmt::format(
      "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\">\n"
      "<rect x=\"0\" y=\"0\" width=\"{0}\" height=\"{1}\" fill=\"white\"/>\n"
      "<rect x=\"{2}\" y=\"{3}\" width=\"{4}\" height=\"{5}\" fill=\"none\" stroke=\"black\"/>\n",
      kWidth, kHeight, kLeft, kTop, plot_w, plot_h);

  for (int e = static_cast<int>(xmin); e <= 0; ++e) {
    const double x = px(std::pow(10.0, e));
    svg += fmt::format(
        "<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{0:.2f}\" y2=\"{2:.2f}\" stroke=\"#dddddd\"/>\n"
        "<text x=\"{0:.2f}\" y=\"{3:.2f}\" font-size=\"11\" text-anchor=\"middle\">1e{4}</text>\n",
        x, kTop, kTop + plot_h, kTop + plot_h + 16, e);
  }
  const double zstep = std::pow(10.0, std::floor(std::log10((zmax - zmin) / 4.0)));
  for (double z = std::ceil(zmin / zstep) * zstep; z <= zmax; z += zstep) {
    svg += fmt::format(
        "<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{2:.2f}\" y2=\"{1:.2f}\" stroke=\"#eeeeee\"/>\n"
        "<text x=\"{3:.2f}\" y=\"{4:.2f}\" font-size=\"11\" text-anchor=\"end\">{5:g}</text>\n",
        kLeft, py(z), kLeft + plot_w, kLeft - 6, py(z) + 4, z);
  }
  if (!std::isnan(schmidt)) {
    const double x = px(schmidt);
    svg += fmt::format(
        "<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{0:.2f}\" y2=\"{2:.2f}\" stroke=\"black\" "
        "stroke-dasharray=\"6,4\"/>\n"
        "<text x=\"{3:.2f}\" y=\"{4:.2f}\" font-size=\"11\">Schmidt bound {5:.4f}</text>\n",
        x, kTop, kTop + plot_h, x + 4, kTop + 12, schmidt);
  }
  for (const auto& r : records) {
    const auto& m = r.metrics;
    if (std::isnan(m.c2) || std::isnan(m.maurer_z)) continue;
    svg += fmt::format(
        "<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"4\" fill=\"{}\" fill-opacity=\"0.75\">"
        "<title>config {} rep {}: C2={:.4g} Z={:.3g} n={}</title></circle>\n",
        px(m.c2), py(m.maurer_z), colour(r.config.xor_depth), r.config_id, r.replicate, m.c2,
        m.maurer_z, r.config.xor_depth);
  }
  double ly = kTop + 10;
  svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" font-size=\"12\">XOR depth</text>\n",
                     kLeft + plot_w + 16, ly);
  for (const auto& [depth, col] : palette) {
    ly += 18;
    svg += fmt::format(
        "<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"5\" fill=\"{}\"/>"
        "<text x=\"{:.2f}\" y=\"{:.2f}\" font-size=\"12\">n = {}</text>\n",
        kLeft + plot_w + 22, ly - 4, col, kLeft + plot_w + 32, ly, depth);
  }
  svg += fmt::format(
      "<text x=\"{:.2f}\" y=\"{:.2f}\" font-size=\"13\" text-anchor=\"middle\">off-peak C2 (log scale)</text>\n"
      "<text x=\"16\" y=\"{:.2f}\" font-size=\"13\" text-anchor=\"middle\" "
      "transform=\"rotate(-90 16 {:.2f})\">Maurer Z</text>\n",
      kLeft + plot_w / 2, kHeight - 14, kTop + plot_h / 2, kTop + plot_h / 2);
  svg += "</svg>\n";
  return svg;
}

void emit_scatter(std::span<const SweepRecord> records, const std::filesystem::path& path) {
  if (records.empty()) throw Error(ErrorKind::InvalidArgument, "no records to plot");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoError, "cannot open " + path.string() + " for writing");
  out << format_scatter(records);
  if (!out) throw Error(ErrorKind::IoError, "write failed: " + path.string());
}

}  // namespace ringtrng
