#include "specshift/csv.hpp"

#include <charconv>
#include <ostream>

namespace specshift::io {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string format_int(long long v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_comment(std::ostream& os, const std::string& text) {
  os << "# " << text << '\n';
}

}  // namespace specshift::io
