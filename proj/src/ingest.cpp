#include "ringtrng/ingest.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "ringtrng/error.hpp"

namespace ringtrng {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

CounterTrace parse_counters(std::string_view text, std::string source) {
  CounterTrace trace;
  trace.source = std::move(source);
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto eol = text.find('\n');
    const auto raw = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    ++line_no;
    const auto line = trim(raw);
    if (line.empty()) continue;
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), v);
    // from_chars also rejects values that overflow 64 bits.
    if (ec != std::errc{} || ptr != line.data() + line.size()) {
      throw Error(ErrorKind::MalformedCounter,
                  trace.source + ": malformed counter on line " + std::to_string(line_no), line_no);
    }
    trace.values.push_back(v);
  }
  if (trace.values.empty()) {
    throw Error(ErrorKind::EmptySequence, trace.source + ": no counter values");
  }
  return trace;
}

CounterTrace read_counters(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_counters(ss.str(), path.string());
}

std::string format_counters(std::span<const std::uint64_t> values) {
  std::string out;
  out.reserve(values.size() * 4);
  for (auto v : values) {
    out += std::to_string(v);
    out.push_back('\n');
  }
  return out;
}

void write_counters(const std::filesystem::path& path, std::span<const std::uint64_t> values) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoError, "cannot open " + path.string() + " for writing");
  out << format_counters(values);
  if (!out) throw Error(ErrorKind::IoError, "write failed: " + path.string());
}

BitSequence counters_to_bits(const CounterTrace& trace) {
  std::vector<std::uint8_t> bits(trace.values.size());
  for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = trace.values[i] & 1U;
  return BitSequence(bits);
}

BitSequence differential_bits(const CounterTrace& a, const CounterTrace& b) {
  if (a.values.size() != b.values.size()) {
    throw Error(ErrorKind::LengthMismatch, "counter traces differ in length: " +
                                               std::to_string(a.values.size()) + " vs " +
                                               std::to_string(b.values.size()));
  }
  std::vector<std::uint8_t> bits(a.values.size());
  for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = (a.values[i] ^ b.values[i]) & 1U;
  return BitSequence(bits);
}

}  // namespace ringtrng
