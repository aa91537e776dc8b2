#include "sks/core/ids.hpp"

#include <cctype>

namespace sks {

std::optional<Id128> Id128::parse(std::string_view text) {
  if (text.empty()) return std::nullopt;
  unsigned __int128 v = 0;
  if (text.size() > 2 && text[0] == '0' && (text[1] == 'x' || text[1] == 'X')) {
    text.remove_prefix(2);
    if (text.empty() || text.size() > 32) return std::nullopt;
    for (char c : text) {
      int d;
      if (c >= '0' && c <= '9') d = c - '0';
      else if (c >= 'a' && c <= 'f') d = c - 'a' + 10;
      else if (c >= 'A' && c <= 'F') d = c - 'A' + 10;
      else return std::nullopt;
      v = (v << 4) | static_cast<unsigned>(d);
    }
  } else {
    const unsigned __int128 max = ~static_cast<unsigned __int128>(0);
    for (char c : text) {
      if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
      const unsigned d = static_cast<unsigned>(c - '0');
      if (v > (max - d) / 10) return std::nullopt;
      v = v * 10 + d;
    }
  }
  return Id128{static_cast<std::uint64_t>(v >> 64), static_cast<std::uint64_t>(v)};
}

std::string Id128::to_string() const {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  bool started = false;
  for (int i = 31; i >= 0; --i) {
    const std::uint64_t word = i >= 16 ? hi : lo;
    const unsigned nib = static_cast<unsigned>((word >> ((i % 16) * 4)) & 0xF);
    if (nib != 0) started = true;
    if (started) out.push_back(kDigits[nib]);
  }
  if (out.empty()) out = "0";
  return "0x" + out;
}

}  // namespace sks
