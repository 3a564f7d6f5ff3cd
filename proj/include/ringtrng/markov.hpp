#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "ringtrng/bitseq.hpp"

namespace ringtrng {

/// Empirical memory-k chain: for every (k-1)-bit context c (first bit most
/// significant), how often it is followed by 0 and by 1. Windows overlap.
class TransitionTable {
 public:
  int memory() const noexcept { return k_; }
  std::size_t contexts() const noexcept { return next_.size(); }

  /// Occurrences of the context anywhere in S, including a final one with no successor.
  std::size_t context_count(std::size_t c) const { return context_counts_.at(c); }
  std::size_t next_count(std::size_t c, int bit) const { return next_.at(c)[bit]; }
  std::size_t transitions() const noexcept { return transitions_; }

  bool observed(std::size_t c) const { return next_count(c, 0) + next_count(c, 1) > 0; }

  /// P(next = bit | context c); nullopt when c was never followed by anything.
  std::optional<double> prob(std::size_t c, int bit) const;

  /// Fraction of the 2^{k-1} contexts that were observed.
  double coverage() const;

  friend TransitionTable fit_transition(const BitSequence& s, int k);

 private:
  int k_ = 2;
  std::vector<std::size_t> context_counts_;
  std::vector<std::array<std::size_t, 2>> next_;
  std::size_t transitions_ = 0;
};

TransitionTable fit_transition(const BitSequence& s, int k);

struct Deviation {
  double value = 0.0;
  std::size_t context = 0;
  int bit = 0;
};

/// max |P(v | c) - 1/2| over observed contexts.
Deviation max_deviation(const TransitionTable& t);

struct BandCheck {
  bool ok = true;
  double half_width = 0.0;  // k / sqrt(N)
  std::vector<std::size_t> offending;
};

/// Every observed probability within 1/2 +- k/sqrt(N).
BandCheck sqrtn_band_check(const TransitionTable& t, std::size_t n);

double binary_entropy(double p);

/// sum_c w_c H(P(1 | c)) with w_c the empirical context frequency, in bits per bit.
/// `laplace` applies add-one-half smoothing to each context's counts.
double conditional_entropy(const TransitionTable& t, bool laplace = false);

}  // namespace ringtrng
