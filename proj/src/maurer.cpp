#include "ringtrng/maurer.hpp"

#include <cmath>
#include <string>

#include "ringtrng/error.hpp"

namespace ringtrng {

namespace {

struct SpacingMoments {
  long double mean = 0;    // E[log2 A]
  long double second = 0;  // E[(log2 A)^2]
};

// A ~ Geometric(p = 2^-b) on {1, 2, ...}. Terms t_i = p q^{i-1} g(i) with
// g = log2 i or (log2 i)^2 have ratios q g(i+1)/g(i) that decrease in i, so
// once that ratio rho drops below 1 the remaining tail is at most
// t_{I+1} / (1 - rho).
SpacingMoments spacing_moments(int b) {
  constexpr long double kTailTolerance = 1e-13L;
  const long double p = std::ldexp(1.0L, -b);
  const long double q = 1.0L - p;
  SpacingMoments m;
  long double weight = p;  // p q^{i-1}
  for (std::uint64_t i = 1;; ++i) {
    const long double l = std::log2(static_cast<long double>(i));
    m.mean += weight * l;
    m.second += weight * l * l;
    weight *= q;
    if (i < 2) continue;
    const long double l1 = std::log2(static_cast<long double>(i + 1));
    const long double l2 = std::log2(static_cast<long double>(i + 2));
    const long double rho1 = q * l2 / l1;
    const long double rho2 = q * (l2 * l2) / (l1 * l1);
    if (rho2 >= 1.0L) continue;
    const long double tail1 = weight * l1 / (1.0L - rho1);
    const long double tail2 = weight * l1 * l1 / (1.0L - rho2);
    if (tail1 < kTailTolerance && tail2 < kTailTolerance) break;
  }
  return m;
}

void check_block_length(int b) {
  if (b < 1 || b > 16) throw Error(ErrorKind::InvalidArgument, "block length b must lie in [1, 16]");
}

}  // namespace

void validate(const MaurerParams& p) {
  check_block_length(p.block_length);
  if (p.init_blocks < 1) throw Error(ErrorKind::InvalidArgument, "Q must be >= 1");
  if (p.test_blocks < 1) throw Error(ErrorKind::InvalidArgument, "L must be >= 1");
}

MaurerParams resolve_params(MaurerParams p, std::size_t n_bits) {
  check_block_length(p.block_length);
  if (p.test_blocks == 0) {
    const std::size_t blocks = n_bits / static_cast<std::size_t>(p.block_length);
    if (blocks <= p.init_blocks) {
      throw Error(ErrorKind::TooShort,
                  "sequence holds " + std::to_string(blocks) + " blocks, Q alone needs " +
                      std::to_string(p.init_blocks));
    }
    p.test_blocks = blocks - p.init_blocks;
  }
  return p;
}

std::vector<std::uint32_t> block_indices(const BitSequence& s, int b) {
  check_block_length(b);
  const auto width = static_cast<std::size_t>(b);
  if (s.size() < width) throw Error(ErrorKind::TooShort, "sequence shorter than one block");
  std::vector<std::uint32_t> out(s.size() / width);
  std::size_t pos = 0;
  for (auto& v : out) {
    std::uint32_t x = 0;
    for (std::size_t j = 0; j < width; ++j) x = (x << 1) | static_cast<std::uint32_t>(s[pos++]);
    v = x;
  }
  return out;
}

FtuResult ftu(const BitSequence& s, const MaurerParams& p) {
  validate(p);
  if (s.size() < p.required_bits()) {
    throw Error(ErrorKind::TooShort, "Maurer test needs " + std::to_string(p.required_bits()) +
                                         " bits, sequence has " + std::to_string(s.size()));
  }
  auto blocks = block_indices(s, p.block_length);
  blocks.resize(p.init_blocks + p.test_blocks);

  // last[v] = 1-based index of the latest block equal to v, 0 if none yet.
  std::vector<std::size_t> last(std::size_t{1} << p.block_length, 0);
  for (std::size_t n = 1; n <= p.init_blocks; ++n) last[blocks[n - 1]] = n;

  FtuResult r;
  for (auto idx : last) {
    if (idx == 0) {
      r.incomplete_init = true;
      break;
    }
  }

  double sum = 0.0;
  for (std::size_t n = p.init_blocks + 1; n <= p.init_blocks + p.test_blocks; ++n) {
    const auto v = blocks[n - 1];
    const std::size_t a = last[v] ? n - last[v] : n;
    sum += std::log2(static_cast<double>(a));
    last[v] = n;
  }
  r.f_tu = sum / static_cast<double>(p.test_blocks);
  return r;
}

double expected_ftu(int b) {
  check_block_length(b);
  return static_cast<double>(spacing_moments(b).mean);
}

double single_block_variance(int b) {
  check_block_length(b);
  const auto m = spacing_moments(b);
  return static_cast<double>(m.second - m.mean * m.mean);
}

double variance_correction(std::size_t test_blocks, int b) {
  const double bd = b;
  return 0.7 - 0.8 / bd +
         (4.0 + 32.0 / bd) * std::pow(static_cast<double>(test_blocks), -3.0 / bd) / 15.0;
}

double variance_ftu(int b, std::size_t test_blocks) {
  check_block_length(b);
  if (test_blocks < 1) throw Error(ErrorKind::InvalidArgument, "L must be >= 1");
  const double c = variance_correction(test_blocks, b);
  return c * c * single_block_variance(b) / static_cast<double>(test_blocks);
}

MaurerReport maurer_test(const BitSequence& s, MaurerParams p, double z_threshold) {
  p = resolve_params(p, s.size());
  const auto f = ftu(s, p);
  MaurerReport r;
  r.params = p;
  r.f_tu = f.f_tu;
  r.incomplete_init = f.incomplete_init;
  r.expected = expected_ftu(p.block_length);
  r.variance = variance_ftu(p.block_length, p.test_blocks);
  r.z = (r.f_tu - r.expected) / std::sqrt(r.variance);
  r.z_threshold = z_threshold;
  r.pass = std::fabs(r.z) < z_threshold;
  return r;
}

}  // namespace ringtrng
