#include "ringtrng/markov.hpp"

#include <cmath>

#include "ringtrng/error.hpp"

namespace ringtrng {

std::optional<double> TransitionTable::prob(std::size_t c, int bit) const {
  const auto& n = next_.at(c);
  const std::size_t total = n[0] + n[1];
  if (total == 0) return std::nullopt;
  return static_cast<double>(n[bit]) / static_cast<double>(total);
}

double TransitionTable::coverage() const {
  std::size_t seen = 0;
  for (const auto& n : next_) seen += (n[0] + n[1]) > 0;
  return static_cast<double>(seen) / static_cast<double>(next_.size());
}

TransitionTable fit_transition(const BitSequence& s, int k) {
  if (k < 2 || k > 16) throw Error(ErrorKind::InvalidArgument, "Markov memory k must lie in [2, 16]");
  const auto ctx_bits = static_cast<std::size_t>(k - 1);
  if (s.size() < static_cast<std::size_t>(k)) {
    throw Error(ErrorKind::TooShort, "sequence shorter than the memory k");
  }
  TransitionTable t;
  t.k_ = k;
  const std::size_t contexts = std::size_t{1} << ctx_bits;
  t.context_counts_.assign(contexts, 0);
  t.next_.assign(contexts, {0, 0});

  const auto mask = static_cast<std::uint32_t>(contexts - 1);
  std::uint32_t ctx = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto bit = static_cast<std::uint32_t>(s[i]);
    if (i >= ctx_bits) {
      // bits i-k+1 .. i-1 form the context of bit i.
      ++t.next_[ctx][bit];
      ++t.transitions_;
    }
    ctx = ((ctx << 1) | bit) & mask;
    if (i + 1 >= ctx_bits) ++t.context_counts_[ctx];
  }
  return t;
}

Deviation max_deviation(const TransitionTable& t) {
  Deviation best{-1.0, 0, 0};
  for (std::size_t c = 0; c < t.contexts(); ++c) {
    for (int v = 0; v < 2; ++v) {
      const auto p = t.prob(c, v);
      if (!p) continue;
      const double d = std::fabs(*p - 0.5);
      if (d > best.value) best = {d, c, v};
    }
  }
  if (best.value < 0) throw Error(ErrorKind::Undefined, "transition table has no observed context");
  return best;
}

BandCheck sqrtn_band_check(const TransitionTable& t, std::size_t n) {
  BandCheck r;
  r.half_width = static_cast<double>(t.memory()) / std::sqrt(static_cast<double>(n));
  for (std::size_t c = 0; c < t.contexts(); ++c) {
    const auto p = t.prob(c, 1);
    if (p && std::fabs(*p - 0.5) > r.half_width) {
      r.ok = false;
      r.offending.push_back(c);
    }
  }
  return r;
}

double binary_entropy(double p) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

double conditional_entropy(const TransitionTable& t, bool laplace) {
  if (t.transitions() == 0) throw Error(ErrorKind::Undefined, "transition table is empty");
  double h = 0.0;
  for (std::size_t c = 0; c < t.contexts(); ++c) {
    const double n0 = static_cast<double>(t.next_count(c, 0));
    const double n1 = static_cast<double>(t.next_count(c, 1));
    if (n0 + n1 == 0) continue;
    const double w = (n0 + n1) / static_cast<double>(t.transitions());
    const double p1 = laplace ? (n1 + 0.5) / (n0 + n1 + 1.0) : n1 / (n0 + n1);
    h += w * binary_entropy(p1);
  }
  return h;
}

}  // namespace ringtrng
