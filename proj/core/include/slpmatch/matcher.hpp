#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "slpmatch/lsq.hpp"

namespace slpmatch {

/// Pattern as a sequence of external symbols.
struct Pattern {
  std::vector<std::string> symbols;

  static Pattern from_text(std::string_view text, bool byte_mode = false);
};

/// Minimal substring S[start..end] (1-indexed, inclusive) containing the
/// pattern as a subsequence: trimming either endpoint breaks containment.
struct Occurrence {
  std::uint64_t start = 0;
  std::uint64_t end = 0;

  bool operator==(const Occurrence&) const = default;
};

struct MatchStats {
  std::uint64_t ls_calls = 0;
  std::uint64_t lp_calls = 0;

  std::uint64_t total_calls() const { return ls_calls + lp_calls; }
};

/// Sentinel for pattern symbols outside the text alphabet.
inline constexpr std::uint32_t kAbsentSymbol = 0xFFFFFFFFu;

/// Pattern symbols as dense ids; unmapped symbols become kAbsentSymbol.
std::vector<std::uint32_t> pattern_ids(const Pattern& pattern, const Alphabet& alphabet);

using OccurrenceSink = std::function<bool(const Occurrence&)>;

/// Streams all minimal occurrences in increasing start (and end) order.
/// Each round issues at most m forward ls steps and m-1 backward lp steps,
/// so the total is at most 2m(occ+1) queries. The sink returns false to
/// stop early. Patterns with symbols outside the alphabet match nothing.
void match_minimal(const LsIndex& index, const Pattern& pattern, const OccurrenceSink& sink,
                   MatchStats* stats = nullptr);

std::vector<Occurrence> match_minimal(const LsIndex& index, const Pattern& pattern,
                                      MatchStats* stats = nullptr);

/// Ground truth on the plain symbol sequence: repeated forward/backward
/// scans. Refuses texts longer than 10^6 symbols.
std::vector<Occurrence> oracle_match_minimal(std::span<const std::uint32_t> text,
                                             std::span<const std::uint32_t> pattern);

}  // namespace slpmatch
