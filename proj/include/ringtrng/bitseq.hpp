#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ringtrng {

/// Immutable binary sequence s_1..s_N, N >= 1.
///
/// Storage is packed 8 bits per byte, LSB-first within each byte; the final
/// byte is zero-padded. All accessors are 0-based and hide the packing.
class BitSequence {
 public:
  /// Builds from one byte per bit; any nonzero byte counts as 1.
  explicit BitSequence(std::span<const std::uint8_t> bits);
  BitSequence(std::initializer_list<int> bits);

  /// Adopts an already-packed buffer. `packed.size()` must be ceil(n/8).
  static BitSequence from_packed(std::vector<std::uint8_t> packed, std::size_t n);

  std::size_t size() const noexcept { return size_; }

  bool operator[](std::size_t i) const noexcept {
    return (bytes_[i >> 3] >> (i & 7)) & 1U;
  }

  std::span<const std::uint8_t> packed() const noexcept { return bytes_; }

  /// One byte (0 or 1) per bit; the form hot loops scan.
  std::vector<std::uint8_t> unpack() const;

  std::size_t popcount() const noexcept;

  friend bool operator==(const BitSequence&, const BitSequence&) = default;

 private:
  BitSequence() = default;

  std::vector<std::uint8_t> bytes_;
  std::size_t size_ = 0;
};

struct RunStats {
  std::vector<std::size_t> run_lengths;
  double mean = 0.0;
  double sd = 0.0;  // population
  std::size_t count = 0;
};

/// Parses ASCII '0'/'1' with arbitrary whitespace.
BitSequence parse_bits(std::string_view text);

/// Renders as '0'/'1' characters, `per_line` bits per line (0 = single line).
std::string format_bits(const BitSequence& s, std::size_t per_line = 64);

/// e_n = (-1)^{s_n}: 0 -> +1, 1 -> -1.
std::vector<std::int8_t> to_signed(const BitSequence& s);

RunStats runs(const BitSequence& s);

/// Element-wise XOR of equally long sequences.
BitSequence xor_sequences(std::span<const BitSequence> seqs);

// Packed file: "RTL1", N as u64 little-endian, ceil(N/8) bytes LSB-first.
inline constexpr std::string_view kPackedMagic = "RTL1";

std::vector<std::uint8_t> encode_packed(const BitSequence& s);
BitSequence decode_packed(std::span<const std::uint8_t> data);

BitSequence read_text_bits(const std::filesystem::path& path);
void write_text_bits(const std::filesystem::path& path, const BitSequence& s);
BitSequence read_packed_bits(const std::filesystem::path& path);
void write_packed_bits(const std::filesystem::path& path, const BitSequence& s);

/// Reads either format, detected by the packed magic.
BitSequence read_bits(const std::filesystem::path& path);

}  // namespace ringtrng
