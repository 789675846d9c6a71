#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

namespace specshift::io {

// Shortest decimal form that round-trips to the same double.
std::string format_double(double v);
std::string format_int(long long v);

void write_comment(std::ostream& os, const std::string& text);

}  // namespace specshift::io
