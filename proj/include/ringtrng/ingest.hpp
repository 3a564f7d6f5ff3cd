#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ringtrng/bitseq.hpp"

namespace ringtrng {

/// Raw per-reference-period counts, e.g. from a TDC acquisition. Files hold one
/// decimal unsigned integer per line; blank lines are ignored.
struct CounterTrace {
  std::vector<std::uint64_t> values;
  std::string source;
};

CounterTrace parse_counters(std::string_view text, std::string source = "<memory>");
CounterTrace read_counters(const std::filesystem::path& path);

std::string format_counters(std::span<const std::uint64_t> values);
void write_counters(const std::filesystem::path& path, std::span<const std::uint64_t> values);

/// bit_i = value_i mod 2.
BitSequence counters_to_bits(const CounterTrace& trace);

/// LSB(a_i) xor LSB(b_i).
BitSequence differential_bits(const CounterTrace& a, const CounterTrace& b);

}  // namespace ringtrng
