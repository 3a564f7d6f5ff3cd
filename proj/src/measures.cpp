#include "ringtrng/measures.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>
#include <string>

#include "ringtrng/error.hpp"

namespace ringtrng {

namespace {

// FFTW planning is not thread-safe; execution on distinct plans is.
std::mutex& fftw_plan_mutex() {
  static std::mutex m;
  return m;
}

// Exact ordering of |num|/den fractions without division.
struct Fraction {
  std::int64_t num = 0;  // >= 0
  std::int64_t den = 1;  // > 0

  bool greater_than(const Fraction& o) const { return num * o.den > o.num * den; }
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

std::uint64_t binomial(std::uint64_t n, std::uint64_t r) {
  if (r > n) return 0;
  r = std::min(r, n - r);
  long double acc = 1;
  for (std::uint64_t i = 1; i <= r; ++i) acc = acc * static_cast<long double>(n - r + i) / i;
  return static_cast<std::uint64_t>(std::llround(acc));
}

struct ExactSearch {
  const std::vector<std::int8_t>& e;
  std::size_t n;
  int k;
  std::size_t max_lag;
  std::size_t min_window;
  bool maximal_only;

  Fraction best{0, 1};
  std::vector<std::size_t> best_lags;
  std::size_t best_window = 0;
  bool found = false;

  std::vector<std::size_t> lags;

  // `prod` holds prod_{j<depth} e_{n+d_j} times e_n, valid for n < n - d_last.
  void recurse(const std::vector<std::int8_t>& prod, std::size_t first_lag) {
    const int depth = static_cast<int>(lags.size());
    for (std::size_t d = first_lag; d <= max_lag; ++d) {
      if (n - d < min_window) break;
      lags.push_back(d);
      const std::size_t len = n - d;
      if (depth + 1 == k - 1) {
        scan(prod, d, len);
      } else {
        std::vector<std::int8_t> next(len);
        for (std::size_t i = 0; i < len; ++i) next[i] = static_cast<std::int8_t>(prod[i] * e[i + d]);
        recurse(next, d + 1);
      }
      lags.pop_back();
    }
  }

  void scan(const std::vector<std::int8_t>& prod, std::size_t d, std::size_t len) {
    std::int64_t acc = 0;
    if (maximal_only) {
      for (std::size_t i = 0; i < len; ++i) acc += prod[i] * e[i + d];
      consider(Fraction{acc < 0 ? -acc : acc, static_cast<std::int64_t>(len)}, len);
      return;
    }
    Fraction local{0, 1};
    std::size_t local_window = 0;
    for (std::size_t i = 0; i < len; ++i) {
      acc += prod[i] * e[i + d];
      const std::size_t m = i + 1;
      if (m < min_window) continue;
      const Fraction f{acc < 0 ? -acc : acc, static_cast<std::int64_t>(m)};
      if (local_window == 0 || f.greater_than(local)) {
        local = f;
        local_window = m;
      }
    }
    if (local_window) consider(local, local_window);
  }

  // Lag vectors are visited in lexicographic order; strict improvement keeps
  // the smallest (D, M) among ties.
  void consider(const Fraction& f, std::size_t window) {
    if (!found || f.greater_than(best)) {
      best = f;
      best_lags = lags;
      best_window = window;
      found = true;
    }
  }
};

}  // namespace

std::size_t default_min_window(std::size_t n) {
  if (n < 2) return 1;
  const std::size_t w = std::max<std::size_t>((n + 1) / 2, 16);
  return std::min(w, n - 1);
}

std::size_t default_report_max_lag(std::size_t n) {
  if (n < 2) return 1;
  const auto lags = static_cast<std::size_t>(std::floor(10.0 * std::log10(static_cast<double>(n))));
  return std::clamp<std::size_t>(lags, 1, n - 1);
}

std::uint64_t exact_cost(std::size_t n, int k, const ExactOptions& opt) {
  if (n < 2 || k < 2) return 0;
  const std::size_t max_lag = opt.max_lag ? std::min(opt.max_lag, n - 1) : n - 1;
  const std::size_t min_window = opt.min_window ? opt.min_window : default_min_window(n);
  std::uint64_t total = 0;
  // Lag vectors whose last lag is d: choose the other k-2 lags from [1, d-1].
  for (std::size_t d = k - 1; d <= max_lag; ++d) {
    if (n - d < min_window) break;
    const std::uint64_t vectors = binomial(d - 1, static_cast<std::uint64_t>(k - 2));
    const long double add = static_cast<long double>(vectors) * (n - d) * (k - 1);
    if (add > 1.8e19L - total) return UINT64_MAX;
    total += static_cast<std::uint64_t>(add);
  }
  return total;
}

PatternCounts pattern_counts(const BitSequence& s, std::size_t window, int k) {
  if (k < 1 || k > 24) throw Error(ErrorKind::InvalidArgument, "pattern length k out of range");
  if (window < static_cast<std::size_t>(k)) {
    throw Error(ErrorKind::WindowTooSmall, "window M is shorter than k");
  }
  if (window > s.size()) throw Error(ErrorKind::WindowExceedsSequence, "window M exceeds N");
  PatternCounts pc{k, window, std::vector<std::size_t>(std::size_t{1} << k, 0)};
  const std::uint32_t mask = (1U << k) - 1;
  std::uint32_t v = 0;
  for (std::size_t i = 0; i < window; ++i) {
    v = ((v << 1) | static_cast<std::uint32_t>(s[i])) & mask;
    if (i + 1 >= static_cast<std::size_t>(k)) ++pc.counts[v];
  }
  return pc;
}

NormalityReport normality_measure(const BitSequence& s, int k, std::size_t min_window) {
  if (k < 1 || k > 20) throw Error(ErrorKind::InvalidArgument, "pattern length k out of range");
  if (min_window < static_cast<std::size_t>(k)) {
    throw Error(ErrorKind::WindowTooSmall, "min_window is shorter than k");
  }
  if (min_window > s.size()) throw Error(ErrorKind::WindowExceedsSequence, "min_window exceeds N");

  const std::size_t patterns = std::size_t{1} << k;
  const double scale = static_cast<double>(patterns);
  std::vector<std::size_t> counts(patterns, 0);
  const std::uint32_t mask = static_cast<std::uint32_t>(patterns - 1);

  NormalityReport best{k, -1.0, 0, 0};
  std::uint32_t v = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    v = ((v << 1) | static_cast<std::uint32_t>(s[i])) & mask;
    if (i + 1 >= static_cast<std::size_t>(k)) ++counts[v];
    const std::size_t m = i + 1;
    if (m < min_window) continue;
    // |c/M - 2^-k| = |c*2^k - M| / (M*2^k); both parts are exact in double.
    const double den = static_cast<double>(m) * scale;
    for (std::uint32_t p = 0; p < patterns; ++p) {
      const double val = std::fabs(static_cast<double>(counts[p]) * scale - static_cast<double>(m)) / den;
      const bool better = val > best.value ||
                          (val == best.value && p < best.pattern);
      if (better) best = {k, val, p, m};
    }
  }
  return best;
}

CorrelationReport correlation_exact(const BitSequence& s, int k, const ExactOptions& opt) {
  const std::size_t n = s.size();
  if (k < 2) throw Error(ErrorKind::InvalidArgument, "correlation order k must be >= 2");
  if (n < 2) throw Error(ErrorKind::TooShort, "correlation needs at least 2 bits");
  const std::size_t max_lag = opt.max_lag ? opt.max_lag : n - 1;
  if (max_lag > n - 1) throw Error(ErrorKind::InvalidArgument, "max_lag must be <= N - 1");
  const std::size_t min_window = opt.min_window ? opt.min_window : default_min_window(n);
  if (max_lag < static_cast<std::size_t>(k - 1) || n - static_cast<std::size_t>(k - 1) < min_window) {
    throw Error(ErrorKind::WindowExceedsSequence,
                "no lag vector of size k-1 fits with the requested min_window");
  }
  ExactOptions resolved = opt;
  resolved.max_lag = max_lag;
  resolved.min_window = min_window;
  const auto cost = exact_cost(n, k, resolved);
  if (!opt.force && cost > opt.budget) {
    throw Error(ErrorKind::BudgetExceeded,
                "exact C_" + std::to_string(k) + " needs " + std::to_string(cost) +
                    " products, budget is " + std::to_string(opt.budget));
  }

  const auto e = to_signed(s);
  ExactSearch search{e, n, k, max_lag, min_window, opt.maximal_window_only, Fraction{0, 1}, {}, 0, false, {}};
  search.recurse(e, 1);

  CorrelationReport r;
  r.order = k;
  r.value = search.best.value();
  r.lags = search.best_lags;
  r.window = search.best_window;
  r.mode = CorrelationMode::Exact;
  return r;
}

std::vector<std::int64_t> autocorrelation_sums(const BitSequence& s) {
  const std::size_t n = s.size();
  const std::size_t size = 2 * n;
  const std::size_t bins = size / 2 + 1;

  struct FftwFree {
    void operator()(void* p) const { fftw_free(p); }
  };
  std::unique_ptr<double[], FftwFree> buf(fftw_alloc_real(size));
  std::unique_ptr<fftw_complex[], FftwFree> spec(fftw_alloc_complex(bins));
  if (!buf || !spec) throw std::bad_alloc();

  fftw_plan fwd = nullptr;
  fftw_plan inv = nullptr;
  {
    std::lock_guard lock(fftw_plan_mutex());
    fwd = fftw_plan_dft_r2c_1d(static_cast<int>(size), buf.get(), spec.get(), FFTW_ESTIMATE);
    inv = fftw_plan_dft_c2r_1d(static_cast<int>(size), spec.get(), buf.get(), FFTW_ESTIMATE);
  }

  for (std::size_t i = 0; i < n; ++i) buf[i] = s[i] ? -1.0 : 1.0;
  std::fill(buf.get() + n, buf.get() + size, 0.0);
  fftw_execute(fwd);
  for (std::size_t i = 0; i < bins; ++i) {
    const double re = spec[i][0];
    const double im = spec[i][1];
    spec[i][0] = re * re + im * im;
    spec[i][1] = 0.0;
  }
  fftw_execute(inv);

  std::vector<std::int64_t> sums(n);
  const double norm = 1.0 / static_cast<double>(size);
  for (std::size_t t = 0; t < n; ++t) sums[t] = std::llround(buf[t] * norm);

  {
    std::lock_guard lock(fftw_plan_mutex());
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(inv);
  }
  return sums;
}

CorrelationReport correlation2_fast(const BitSequence& s, std::size_t max_lag) {
  const std::size_t n = s.size();
  if (n < 2) throw Error(ErrorKind::TooShort, "correlation needs at least 2 bits");
  if (max_lag < 1 || max_lag > n - 1) {
    throw Error(ErrorKind::InvalidArgument, "max_lag must lie in [1, N - 1]");
  }
  const auto sums = autocorrelation_sums(s);
  Fraction best{-1, 1};
  std::size_t best_lag = 0;
  for (std::size_t t = 1; t <= max_lag; ++t) {
    const Fraction f{sums[t] < 0 ? -sums[t] : sums[t], static_cast<std::int64_t>(n - t)};
    if (best_lag == 0 || f.greater_than(best)) {
      best = f;
      best_lag = t;
    }
  }
  CorrelationReport r;
  r.order = 2;
  r.value = best.value();
  r.lags = {best_lag};
  r.window = n - best_lag;
  r.mode = CorrelationMode::AcfFast;
  return r;
}

double bitmatch_autocorr(const BitSequence& s, std::size_t lag) {
  const std::size_t n = s.size();
  if (lag < 1 || lag > n - 1) throw Error(ErrorKind::InvalidArgument, "lag must lie in [1, N - 1]");
  std::size_t matches = 0;
  for (std::size_t i = 0; i + lag < n; ++i) matches += s[i] == s[i + lag];
  return 2.0 * static_cast<double>(matches) / static_cast<double>(n - lag) - 1.0;
}

double allan_variance(std::span<const double> series) {
  if (series.size() < 2) throw Error(ErrorKind::TooShort, "Allan variance needs at least 2 samples");
  double ss = 0.0;
  for (std::size_t i = 1; i < series.size(); ++i) {
    const double d = series[i] - series[i - 1];
    ss += d * d;
  }
  return ss / (2.0 * static_cast<double>(series.size() - 1));
}

}  // namespace ringtrng
