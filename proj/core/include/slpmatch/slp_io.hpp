#pragma once

#include <iosfwd>
#include <string>

#include "slpmatch/slp.hpp"

namespace slpmatch {

/// Plain-text grammar format, LF line endings:
///
///   SLP <n> <root-id>
///   ALPHA <sigma> <symbol-0> <symbol-1> ...
///   T <dense-symbol-index>        (one line per rule, ids 0..n-1)
///   N <left-id> <right-id>
///
/// Symbols are written as their raw bytes except for backslash, space,
/// control bytes and bytes outside printable ASCII, which are escaped as
/// \\ \s \n \r \t or \xHH so the file stays unambiguous ASCII.
std::string serialize_slp(const Slp& slp);
void write_slp_file(const Slp& slp, const std::string& path);

/// Throws FormatError on any structural problem, with a line number.
Slp parse_slp(std::string_view text);
Slp read_slp_file(const std::string& path);

std::string escape_symbol(std::string_view symbol);
std::string unescape_symbol(std::string_view token);

}  // namespace slpmatch
