#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace slpmatch {

using NodeId = std::uint32_t;
inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();

/// Thrown when a rule set or a serialized grammar is structurally invalid.
class FormatError : public std::runtime_error {
 public:
  explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

/// Contract check for caller-supplied arguments.
inline void check_arg(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

}  // namespace slpmatch
