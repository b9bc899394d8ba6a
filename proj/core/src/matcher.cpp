#include "slpmatch/matcher.hpp"

namespace slpmatch {

Pattern Pattern::from_text(std::string_view text, bool byte_mode) {
  Pattern p;
  for (const auto sym : split_symbols(text, byte_mode)) p.symbols.emplace_back(sym);
  return p;
}

std::vector<std::uint32_t> pattern_ids(const Pattern& pattern, const Alphabet& alphabet) {
  std::vector<std::uint32_t> ids;
  ids.reserve(pattern.symbols.size());
  for (const std::string& s : pattern.symbols) {
    const auto c = alphabet.find(s);
    ids.push_back(c ? *c : kAbsentSymbol);
  }
  return ids;
}

void match_minimal(const LsIndex& index, const Pattern& pattern, const OccurrenceSink& sink,
                   MatchStats* stats) {
  check_arg(!pattern.symbols.empty(), "match: empty pattern");
  const auto ids = pattern_ids(pattern, index.slp().alphabet());
  for (const std::uint32_t c : ids) {
    if (c == kAbsentSymbol) return;
  }
  const std::size_t m = ids.size();

  std::uint64_t prev_start = 0;
  while (true) {
    // Forward: minimal end of a window starting after prev_start.
    if (stats) ++stats->ls_calls;
    const auto anchor = index.ls_id(prev_start, ids[0]);
    if (!anchor) return;
    std::uint64_t end = *anchor;
    for (std::size_t k = 1; k < m; ++k) {
      if (stats) ++stats->ls_calls;
      const auto next = index.ls_id(end, ids[k]);
      if (!next) return;
      end = *next;
    }
    // Backward: maximal start for this end.
    std::uint64_t start = end;
    for (std::size_t k = m - 1; k-- > 0;) {
      if (stats) ++stats->lp_calls;
      const auto prev = index.lp_id(start, ids[k]);
      if (!prev) throw std::logic_error("match: backward scan lost a matched symbol");
      start = *prev;
    }
    if (!sink(Occurrence{start, end})) return;
    prev_start = start;
  }
}

std::vector<Occurrence> match_minimal(const LsIndex& index, const Pattern& pattern,
                                      MatchStats* stats) {
  std::vector<Occurrence> out;
  match_minimal(
      index, pattern,
      [&](const Occurrence& occ) {
        out.push_back(occ);
        return true;
      },
      stats);
  return out;
}

std::vector<Occurrence> oracle_match_minimal(std::span<const std::uint32_t> text,
                                             std::span<const std::uint32_t> pattern) {
  check_arg(text.size() <= 1000000, "oracle_match_minimal: text longer than the guard");
  check_arg(!pattern.empty(), "oracle_match_minimal: empty pattern");
  const std::size_t n = text.size();
  const std::size_t m = pattern.size();

  std::vector<Occurrence> out;
  std::size_t from = 0;  // 0-based scan start
  while (true) {
    // Minimal prefix of text[from..] containing the pattern.
    std::size_t k = 0;
    std::size_t end = n;
    for (std::size_t idx = from; idx < n; ++idx) {
      if (text[idx] == pattern[k]) {
        ++k;
        if (k == m) {
          end = idx;
          break;
        }
      }
    }
    if (end == n) return out;
    // Minimal suffix of text[..end] still containing the pattern.
    std::size_t kk = m;
    std::size_t start = end;
    for (std::size_t idx = end + 1; idx-- > 0;) {
      if (text[idx] == pattern[kk - 1]) {
        --kk;
        if (kk == 0) {
          start = idx;
          break;
        }
      }
    }
    out.push_back(Occurrence{start + 1, end + 1});
    from = start + 1;
  }
}

}  // namespace slpmatch
