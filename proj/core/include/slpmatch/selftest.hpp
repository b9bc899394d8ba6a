#pragma once

#include <cstdint>
#include <iosfwd>

namespace slpmatch {

struct SelftestOptions {
  std::uint64_t seed = 1;
  std::uint32_t cases = 120;  // corpus texts to run
};

/// Compresses a generated corpus, replays every structure against plain
/// scans of the original texts, and reports one line per suite. Returns
/// true iff everything agreed.
bool run_selftest(const SelftestOptions& options, std::ostream& out);

}  // namespace slpmatch
