#include "ringtrng/bounds.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

#include "ringtrng/error.hpp"
#include "ringtrng/markov.hpp"

namespace ringtrng {

namespace {

void check_kn(int k, std::size_t n) {
  if (k < 2) throw Error(ErrorKind::InvalidArgument, "k must be >= 2");
  if (n < 2) throw Error(ErrorKind::InvalidArgument, "N must be >= 2");
}

std::string context_bits(std::size_t c, int width) {
  std::string out;
  for (int i = width - 1; i >= 0; --i) out.push_back(((c >> i) & 1U) ? '1' : '0');
  return out;
}

std::string lags_text(const std::vector<std::size_t>& lags) {
  return fmt::format("({})", fmt::join(lags, ","));
}

ExactOptions exact_for(const BitSequence& s, int k, const CheckOptions& opt) {
  ExactOptions e;
  e.max_lag = s.size() - 1;
  // ceil(N/2), lowered for tiny N so that one lag vector still fits.
  const std::size_t fit = s.size() > static_cast<std::size_t>(k - 1) ? s.size() - static_cast<std::size_t>(k - 1) : 1;
  e.min_window = opt.min_window ? opt.min_window : std::min((s.size() + 1) / 2, fit);
  e.budget = opt.budget;
  e.force = opt.force;
  return e;
}

}  // namespace

double schmidt_bound(int k, std::size_t n) {
  check_kn(k, n);
  const double nd = static_cast<double>(n);
  return std::sqrt(2.0 * k * std::log(nd) / nd);
}

double alon_bound(int k, std::size_t n) {
  check_kn(k, n);
  const double nd = static_cast<double>(n);
  return 5.0 * std::sqrt(k * std::log(nd) / nd);
}

double theorem1_bound(int k, double ck) {
  if (k < 2) throw Error(ErrorKind::InvalidArgument, "k must be >= 2");
  const double scaled = std::ldexp(ck, k - 2);
  if (!(ck >= 0.0) || !(scaled < 1.0)) {
    throw Error(ErrorKind::PreconditionFailed,
                fmt::format("2^(k-2) * C_k < 1 violated: 2^{} * {} = {}", k - 2, ck, scaled));
  }
  return scaled / (1.0 - scaled);
}

Theorem2Bounds theorem2_bounds(int k, double ck, std::size_t test_blocks, std::size_t maurer_window) {
  if (k < 1 || k > 30) throw Error(ErrorKind::InvalidArgument, "k out of range");
  if (test_blocks == 0 || maurer_window == 0) {
    throw Error(ErrorKind::InvalidArgument, "L and M must be positive");
  }
  const double inv = std::ldexp(1.0, -k);  // 2^-k
  const double two_k = std::ldexp(1.0, k);
  const double l = static_cast<double>(test_blocks);
  const double m = static_cast<double>(maurer_window);
  if (!(ck >= 0.0)) throw Error(ErrorKind::PreconditionFailed, "C_k must be nonnegative");
  if (!(ck < inv)) {
    throw Error(ErrorKind::PreconditionFailed, fmt::format("C_k < 2^-k violated: {} >= {}", ck, inv));
  }
  if (!(ck < 0.5)) throw Error(ErrorKind::PreconditionFailed, "C_k < 1/2 violated");
  const double denom = m * (inv + ck);
  const double arg = l * (1.0 - 2.0 * ck) / denom;
  if (!(arg > 1.0)) {
    throw Error(ErrorKind::PreconditionFailed,
                fmt::format("L(1-2C_k)/(M(2^-k+C_k)) > 1 violated: {}", arg));
  }
  Theorem2Bounds b;
  b.lower = (two_k - 2.0 * two_k * ck) / denom * std::log2(arg);
  b.upper = two_k * (std::log2(l / m) - std::log2(inv - ck));
  return b;
}

double xor_accumulation_estimate(double ck, int n) {
  if (!(ck >= 0.0 && ck <= 1.0)) throw Error(ErrorKind::InvalidArgument, "C_k must lie in [0, 1]");
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "n must be >= 1");
  return std::pow(ck, n);
}

BoundCheckResult theorem1_check(const BitSequence& s, int k, const CheckOptions& opt) {
  BoundCheckResult r;
  r.bound_name = fmt::format("theorem1(k={})", k);
  r.correlation = correlation_exact(s, k, exact_for(s, k, opt));
  r.ck = r.correlation.value;

  const auto table = fit_transition(s, k);
  const auto dev = max_deviation(table);
  r.measured = dev.value;

  const double scaled = std::ldexp(r.ck, k - 2);
  if (!(scaled < 1.0)) {
    r.failed_condition = fmt::format("2^(k-2) * C_k = {} >= 1", scaled);
    return r;
  }
  r.precondition_ok = true;
  const double bound = theorem1_bound(k, r.ck);
  r.bound_values = {bound};
  // Slack for rounding only: C_k = 1/3 gives a bound of exactly 1/2.
  r.satisfied = dev.value <= bound + 1e-12;
  if (!*r.satisfied) {
    const auto p = *table.prob(dev.context, dev.bit);
    r.witness = fmt::format(
        "N={} k={} C_k={:.6g} at D={} M={}; context {} -> {} has P={:.6g} "
        "(counts {}/{}), |P-1/2|={:.6g} > bound {:.6g}; bits={}",
        s.size(), k, r.ck, lags_text(r.correlation.lags), r.correlation.window,
        context_bits(dev.context, k - 1), dev.bit, p, table.next_count(dev.context, dev.bit),
        table.next_count(dev.context, 0) + table.next_count(dev.context, 1), dev.value, bound,
        s.size() <= 256 ? format_bits(s, 0).substr(0, s.size()) : std::string("<long>"));
  }
  return r;
}

BoundCheckResult theorem2_check(const BitSequence& s, const MaurerParams& params, const CheckOptions& opt) {
  const auto p = resolve_params(params, s.size());
  validate(p);
  BoundCheckResult r;
  const int k = p.block_length;
  if (k < 2) throw Error(ErrorKind::InvalidArgument, "theorem 2 check needs block length b >= 2");
  r.bound_name = fmt::format("theorem2(b={},Q={},L={})", k, p.init_blocks, p.test_blocks);
  r.correlation = correlation_exact(s, k, exact_for(s, k, opt));
  r.ck = r.correlation.value;
  r.measured = ftu(s, p).f_tu;

  const std::size_t window = p.required_bits();
  try {
    const auto b = theorem2_bounds(k, r.ck, p.test_blocks, window);
    r.bound_values = {b.lower, b.upper};
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::PreconditionFailed) throw;
    r.failed_condition = e.what();
    return r;
  }
  r.precondition_ok = true;
  r.satisfied = r.bound_values[0] <= r.measured && r.measured <= r.bound_values[1];
  if (!*r.satisfied) {
    r.witness = fmt::format("N={} b={} Q={} L={} M={} C_k={:.6g} at D={} M_c={}: f_TU={:.6g} outside [{:.6g}, {:.6g}]",
                            s.size(), k, p.init_blocks, p.test_blocks, window, r.ck,
                            lags_text(r.correlation.lags), r.correlation.window, r.measured,
                            r.bound_values[0], r.bound_values[1]);
  }
  return r;
}

}  // namespace ringtrng
