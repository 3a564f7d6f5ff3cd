#include "ringtrng/bitseq.hpp"

#include <bit>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>

#include "ringtrng/error.hpp"

namespace ringtrng {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::EmptySequence: return "EmptySequence";
    case ErrorKind::MalformedBit: return "MalformedBit";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::WindowTooSmall: return "WindowTooSmall";
    case ErrorKind::WindowExceedsSequence: return "WindowExceedsSequence";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
    case ErrorKind::TooShort: return "TooShort";
    case ErrorKind::Undefined: return "Undefined";
    case ErrorKind::PreconditionFailed: return "PreconditionFailed";
    case ErrorKind::MalformedCounter: return "MalformedCounter";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::EmptyGrid: return "EmptyGrid";
    case ErrorKind::DegenerateInput: return "DegenerateInput";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

BitSequence::BitSequence(std::span<const std::uint8_t> bits) {
  if (bits.empty()) throw Error(ErrorKind::EmptySequence, "bit sequence is empty");
  size_ = bits.size();
  bytes_.assign((size_ + 7) / 8, 0);
  for (std::size_t i = 0; i < size_; ++i) {
    if (bits[i]) bytes_[i >> 3] |= static_cast<std::uint8_t>(1U << (i & 7));
  }
}

BitSequence::BitSequence(std::initializer_list<int> bits) {
  std::vector<std::uint8_t> tmp;
  tmp.reserve(bits.size());
  for (int b : bits) tmp.push_back(b != 0);
  *this = BitSequence(tmp);
}

BitSequence BitSequence::from_packed(std::vector<std::uint8_t> packed, std::size_t n) {
  if (n == 0) throw Error(ErrorKind::EmptySequence, "bit sequence is empty");
  if (packed.size() != (n + 7) / 8) {
    throw Error(ErrorKind::LengthMismatch, "packed buffer size does not match bit count");
  }
  if (n % 8) packed.back() &= static_cast<std::uint8_t>((1U << (n % 8)) - 1);
  BitSequence s;
  s.bytes_ = std::move(packed);
  s.size_ = n;
  return s;
}

std::vector<std::uint8_t> BitSequence::unpack() const {
  std::vector<std::uint8_t> out(size_);
  for (std::size_t i = 0; i < size_; ++i) out[i] = (*this)[i];
  return out;
}

std::size_t BitSequence::popcount() const noexcept {
  std::size_t c = 0;
  for (auto b : bytes_) c += static_cast<std::size_t>(std::popcount(b));
  return c;
}

BitSequence parse_bits(std::string_view text) {
  std::vector<std::uint8_t> bits;
  bits.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '0' || c == '1') {
      bits.push_back(c == '1');
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      throw Error(ErrorKind::MalformedBit,
                  "unexpected character at position " + std::to_string(i + 1), i + 1);
    }
  }
  if (bits.empty()) throw Error(ErrorKind::EmptySequence, "no bits in input");
  return BitSequence(bits);
}

std::string format_bits(const BitSequence& s, std::size_t per_line) {
  std::string out;
  out.reserve(s.size() + (per_line ? s.size() / per_line + 1 : 1));
  for (std::size_t i = 0; i < s.size(); ++i) {
    out.push_back(s[i] ? '1' : '0');
    if (per_line && (i + 1) % per_line == 0) out.push_back('\n');
  }
  if (out.back() != '\n') out.push_back('\n');
  return out;
}

std::vector<std::int8_t> to_signed(const BitSequence& s) {
  std::vector<std::int8_t> e(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) e[i] = s[i] ? -1 : 1;
  return e;
}

RunStats runs(const BitSequence& s) {
  RunStats r;
  std::size_t len = 1;
  for (std::size_t i = 1; i < s.size(); ++i) {
    if (s[i] == s[i - 1]) {
      ++len;
    } else {
      r.run_lengths.push_back(len);
      len = 1;
    }
  }
  r.run_lengths.push_back(len);
  r.count = r.run_lengths.size();
  r.mean = static_cast<double>(s.size()) / static_cast<double>(r.count);
  double ss = 0.0;
  for (auto l : r.run_lengths) {
    const double d = static_cast<double>(l) - r.mean;
    ss += d * d;
  }
  r.sd = std::sqrt(ss / static_cast<double>(r.count));
  return r;
}

BitSequence xor_sequences(std::span<const BitSequence> seqs) {
  if (seqs.empty()) throw Error(ErrorKind::EmptySequence, "xor of an empty list");
  const std::size_t n = seqs.front().size();
  std::vector<std::uint8_t> acc(seqs.front().packed().begin(), seqs.front().packed().end());
  for (std::size_t j = 1; j < seqs.size(); ++j) {
    if (seqs[j].size() != n) {
      throw Error(ErrorKind::LengthMismatch,
                  "sequence 0 has length " + std::to_string(n) + " but sequence " +
                      std::to_string(j) + " has length " + std::to_string(seqs[j].size()));
    }
    auto p = seqs[j].packed();
    for (std::size_t b = 0; b < acc.size(); ++b) acc[b] ^= p[b];
  }
  return BitSequence::from_packed(std::move(acc), n);
}

std::vector<std::uint8_t> encode_packed(const BitSequence& s) {
  std::vector<std::uint8_t> out(kPackedMagic.begin(), kPackedMagic.end());
  std::uint64_t n = s.size();
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(n >> (8 * i)));
  out.insert(out.end(), s.packed().begin(), s.packed().end());
  return out;
}

BitSequence decode_packed(std::span<const std::uint8_t> data) {
  if (data.size() < 12 ||
      std::string_view(reinterpret_cast<const char*>(data.data()), 4) != kPackedMagic) {
    throw Error(ErrorKind::MalformedBit, "missing RTL1 header");
  }
  std::uint64_t n = 0;
  for (int i = 0; i < 8; ++i) n |= static_cast<std::uint64_t>(data[4 + i]) << (8 * i);
  if (n == 0) throw Error(ErrorKind::EmptySequence, "packed file declares zero bits");
  const auto payload = data.subspan(12);
  if (payload.size() != (n + 7) / 8) {
    throw Error(ErrorKind::LengthMismatch,
                "payload has " + std::to_string(payload.size()) + " bytes, expected " +
                    std::to_string((n + 7) / 8));
  }
  return BitSequence::from_packed({payload.begin(), payload.end()}, n);
}

namespace {

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw Error(ErrorKind::IoError, "read failed: " + path.string());
  return std::move(ss).str();
}

void dump(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoError, "cannot open " + path.string() + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorKind::IoError, "write failed: " + path.string());
}

}  // namespace

BitSequence read_text_bits(const std::filesystem::path& path) { return parse_bits(slurp(path)); }

void write_text_bits(const std::filesystem::path& path, const BitSequence& s) {
  dump(path, format_bits(s));
}

BitSequence read_packed_bits(const std::filesystem::path& path) {
  const auto raw = slurp(path);
  return decode_packed(
      std::span(reinterpret_cast<const std::uint8_t*>(raw.data()), raw.size()));
}

void write_packed_bits(const std::filesystem::path& path, const BitSequence& s) {
  const auto bytes = encode_packed(s);
  dump(path, std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

BitSequence read_bits(const std::filesystem::path& path) {
  const auto raw = slurp(path);
  if (raw.starts_with(kPackedMagic)) {
    return decode_packed(
        std::span(reinterpret_cast<const std::uint8_t*>(raw.data()), raw.size()));
  }
  return parse_bits(raw);
}

}  // namespace ringtrng
