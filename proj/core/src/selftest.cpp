#include "slpmatch/selftest.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "slpmatch/ingest.hpp"
#include "slpmatch/lsq.hpp"
#include "slpmatch/matcher.hpp"
#include "slpmatch/slp_io.hpp"

namespace slpmatch {

namespace {

const char* const kProseSamples[] = {
    "the quick brown fox jumps over the lazy dog while the band plays on",
    "Logs rotate nightly; the archiver keeps three weeks of history, then prunes.",
    "A stitch in time saves nine, or so the saying goes -- measure twice, cut once.",
    "naive fa\xC3\xA7"
    "ade r\xC3\xA9sum\xC3\xA9 \xC3\xBC"
    "ber caf\xC3\xA9",
};

std::string make_text(std::mt19937_64& rng, std::uint32_t variant) {
  std::uniform_int_distribution<std::uint64_t> len_pick(1, 2500);
  const std::uint64_t len = len_pick(rng);
  std::string text;
  switch (variant % 5) {
    case 0: {  // random over a small-to-large alphabet
      const std::uint32_t sigmas[] = {1, 2, 4, 26, 96};
      const std::uint32_t sigma = sigmas[rng() % 5];
      std::uniform_int_distribution<std::uint32_t> pick(0, sigma - 1);
      for (std::uint64_t i = 0; i < len; ++i) text += synthetic_symbol(pick(rng));
      break;
    }
    case 1: {  // periodic
      std::string unit;
      const std::uint32_t unit_len = 1 + rng() % 5;
      for (std::uint32_t i = 0; i < unit_len; ++i)
        text.empty() ? void() : void(), unit += synthetic_symbol(rng() % 6);
      while (text.size() < len) text += unit;
      break;
    }
    case 2: {  // runs of one symbol
      while (text.size() < len) {
        const std::string sym = synthetic_symbol(rng() % 3);
        const std::uint64_t run = 1 + rng() % 40;
        for (std::uint64_t i = 0; i < run && text.size() < len; ++i) text += sym;
      }
      break;
    }
    case 3:  // prose
      text = kProseSamples[rng() % std::size(kProseSamples)];
      break;
    default: {  // single char
      text.assign(static_cast<std::size_t>(1 + rng() % 64), 'a');
      break;
    }
  }
  if (text.empty()) text = "a";
  return text;
}

std::optional<std::uint64_t> scan_ls(const std::vector<std::uint32_t>& ids, std::uint64_t i,
                                     std::uint32_t c) {
  for (std::uint64_t j = i; j < ids.size(); ++j) {
    if (ids[j] == c) return j + 1;
  }
  return std::nullopt;
}

std::optional<std::uint64_t> scan_lp(const std::vector<std::uint32_t>& ids, std::uint64_t i,
                                     std::uint32_t c) {
  for (std::uint64_t j = std::min<std::uint64_t>(i - 1, ids.size()); j-- > 0;) {
    if (ids[j] == c) return j + 1;
  }
  return std::nullopt;
}

}  // namespace

bool run_selftest(const SelftestOptions& options, std::ostream& out) {
  std::mt19937_64 rng(options.seed);
  const std::uint32_t cases = std::max<std::uint32_t>(options.cases, 1);
  std::uint64_t failures = 0;
  std::uint64_t ls_checked = 0;
  std::uint64_t match_checked = 0;
  auto expect = [&](bool ok, const char* what, std::uint32_t case_id) {
    if (!ok) {
      ++failures;
      out << "FAIL " << what << " (case " << case_id << ")\n";
    }
  };

  for (std::uint32_t t = 0; t < cases; ++t) {
    const bool byte_mode = t % 7 == 3;
    const std::string text = make_text(rng, t);
    const Slp slp = ingest_text(text, byte_mode);
    expect(slp.expand(text.size() + 1) == text, "expand round trip", t);

    const Slp reparsed = parse_slp(serialize_slp(slp));
    expect(reparsed.expand(text.size() + 1) == text, "serialize round trip", t);
    expect(serialize_slp(reparsed) == serialize_slp(slp), "serialize determinism", t);

    const SlpHeavyForest forest = build_heavy_forest(slp);
    const std::uint64_t n_len = slp.text_length();
    expect(forest.light_edge_max() <= std::bit_width(n_len) - 1, "light edge bound", t);

    const LsIndex index(slp, forest,
                        t % 2 == 0 ? LsFlavor::LogQuery : LsFlavor::ConstQuery);
    const auto ids = slp.expand_ids(n_len);

    std::uniform_int_distribution<std::uint64_t> pos_pick(0, n_len);
    std::uniform_int_distribution<std::uint32_t> sym_pick(0, slp.sigma() - 1);
    for (std::uint32_t q = 0; q < 200; ++q) {
      const std::uint64_t i = pos_pick(rng);
      const std::uint32_t c = sym_pick(rng);
      expect(index.ls_id(i, c) == scan_ls(ids, i, c), "ls equals scan", t);
      expect(index.lp_id(i + 1, c) == scan_lp(ids, i + 1, c), "lp equals scan", t);
      ++ls_checked;
    }

    const std::uint32_t pattern_lens[] = {1, 2, 3, 5, 10};
    for (std::uint32_t pi = 0; pi < 8; ++pi) {
      const std::uint32_t m = pattern_lens[pi % 5];
      Pattern pattern;
      std::vector<std::uint32_t> pat_ids;
      for (std::uint32_t k = 0; k < m; ++k) {
        if (pi == 7 && k == 0) {
          pattern.symbols.push_back("\x01");  // outside every generated alphabet
          pat_ids.push_back(kAbsentSymbol);
        } else {
          const std::uint32_t c =
              rng() % 3 == 0 ? sym_pick(rng) : ids[rng() % ids.size()];
          pattern.symbols.push_back(slp.alphabet().symbol(c));
          pat_ids.push_back(c);
        }
      }
      const auto got = match_minimal(index, pattern);
      std::vector<Occurrence> want;
      if (std::find(pat_ids.begin(), pat_ids.end(), kAbsentSymbol) == pat_ids.end()) {
        want = oracle_match_minimal(ids, pat_ids);
      }
      expect(got == want, "match equals oracle", t);
      ++match_checked;
    }
  }

  out << "selftest: " << cases << " corpus texts, " << ls_checked
      << " ls/lp probes, " << match_checked << " patterns";
  if (failures == 0) {
    out << " -- all ok\n";
  } else {
    out << " -- " << failures << " failures\n";
  }
  return failures == 0;
}

}  // namespace slpmatch
