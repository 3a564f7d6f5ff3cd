#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ringtrng/bitseq.hpp"
#include "ringtrng/maurer.hpp"
#include "ringtrng/measures.hpp"

namespace ringtrng {

/// sqrt(2k ln N / N): high-probability ceiling on C_k of a random sequence.
double schmidt_bound(int k, std::size_t n);

/// 5 sqrt(k ln N / N): the older, looser ceiling.
double alon_bound(int k, std::size_t n);

/// 2^{k-2} C_k / (1 - 2^{k-2} C_k), bounding |P(v | context) - 1/2| for a
/// memory-k chain. Requires 2^{k-2} C_k < 1.
double theorem1_bound(int k, double ck);

struct Theorem2Bounds {
  double lower = 0.0;
  double upper = 0.0;
};

/// Sandwich on f_TU from C_k, base-2 logarithms throughout. `maurer_window` is
/// the total Maurer window M = (Q + L) * b.
Theorem2Bounds theorem2_bounds(int k, double ck, std::size_t test_blocks, std::size_t maurer_window);

/// C_k^n.
double xor_accumulation_estimate(double ck, int n);

struct BoundCheckResult {
  std::string bound_name;
  std::vector<double> bound_values;  // theorem 1: {bound}; theorem 2: {lower, upper}
  double measured = 0.0;
  double ck = 0.0;
  CorrelationReport correlation;
  bool precondition_ok = false;
  std::string failed_condition;   // set when !precondition_ok
  std::optional<bool> satisfied;  // only when precondition_ok
  std::string witness;            // set when satisfied == false
};

struct CheckOptions {
  std::size_t min_window = 0;  // 0 selects ceil(N/2)
  std::uint64_t budget = 1'000'000'000ULL;
  bool force = false;
};

/// Exact C_k over lags 1..N-1, fitted memory-k table, max deviation vs theorem1_bound.
BoundCheckResult theorem1_check(const BitSequence& s, int k, const CheckOptions& opt = {});

/// Exact C_b of S vs f_TU(S, p), with k = b.
BoundCheckResult theorem2_check(const BitSequence& s, const MaurerParams& p,
                                const CheckOptions& opt = {});

}  // namespace ringtrng
