#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "ringtrng/bitseq.hpp"

namespace ringtrng {

// Maurer's universal statistical test over non-overlapping b-bit blocks:
// Q initialisation blocks followed by L test blocks, (Q + L) * b bits in all.
struct MaurerParams {
  int block_length = 7;  // b
  std::size_t init_blocks = 1280;  // Q
  std::size_t test_blocks = 0;     // L

  std::size_t required_bits() const {
    return (init_blocks + test_blocks) * static_cast<std::size_t>(block_length);
  }
};

struct FtuResult {
  double f_tu = 0.0;
  // Some b-bit pattern never occurred in the Q init blocks.
  bool incomplete_init = false;
};

struct MaurerReport {
  MaurerParams params;
  double f_tu = 0.0;
  double expected = 0.0;
  double variance = 0.0;
  double z = 0.0;
  double z_threshold = 2.0;
  bool pass = false;
  bool incomplete_init = false;
};

/// Checks 1 <= b <= 16, Q >= 1, L >= 1.
void validate(const MaurerParams& p);

/// Fills L with floor(N/b) - Q when it is zero.
MaurerParams resolve_params(MaurerParams p, std::size_t n_bits);

/// Non-overlapping b-bit blocks, first bit most significant; trailing bits dropped.
std::vector<std::uint32_t> block_indices(const BitSequence& s, int b);

/// (1/L) sum_{n=Q+1}^{Q+L} log2 A_n with 1-based block numbering; A_n is the
/// distance to the previous occurrence of block n's value, or n if none.
FtuResult ftu(const BitSequence& s, const MaurerParams& p);

/// E[f_TU] for an ideal source: sum_i 2^-b (1-2^-b)^{i-1} log2 i.
double expected_ftu(int b);

/// Var[log2 A] for one block of an ideal source.
double single_block_variance(int b);

/// c(L, b) = 0.7 - 0.8/b + (4 + 32/b) L^{-3/b} / 15.
double variance_correction(std::size_t test_blocks, int b);

/// c(L, b)^2 * single_block_variance(b) / L.
double variance_ftu(int b, std::size_t test_blocks);

MaurerReport maurer_test(const BitSequence& s, MaurerParams p, double z_threshold = 2.0);

}  // namespace ringtrng
