#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "slpmatch/slp.hpp"

namespace slpmatch {

/// Builds a grammar for the given text: greedy replacement of the most
/// frequent adjacent rule pair until no pair repeats, then balanced pairing
/// of the residual sequence. The alphabet lists distinct symbols in
/// first-occurrence order. Best effort, not a smallest grammar.
Slp ingest_text(std::string_view text, bool byte_mode = false);

/// Deterministic grammar families for tests and benchmarks.
struct GrammarRecipe {
  enum class Kind { BalancedBinary, RepairStyle, Fibonacci, Power, RandomDag };

  Kind kind = Kind::Fibonacci;
  std::uint64_t length = 0;   // balanced-binary / repair-style text length
  std::uint32_t sigma = 0;    // alphabet size for text/dag kinds
  std::uint64_t seed = 0;
  std::uint32_t k = 0;        // fibonacci(k) / power(symbol, k)
  std::uint64_t rule_count = 0;  // random dag size
  std::string symbol = "a";   // power base symbol

  /// Accepts "fibonacci:K", "power:SYM:K", "random:RULES:SIGMA:SEED",
  /// "balanced-binary:LEN:SIGMA:SEED", "repair-style:LEN:SIGMA:SEED"
  /// (short prefixes fib/bal/rep work too).
  static GrammarRecipe parse(std::string_view spec);
  std::string name() const;
};

Slp generate(const GrammarRecipe& recipe);

/// Synthetic single-scalar symbol for index i (used by generated texts).
std::string synthetic_symbol(std::uint32_t i);

}  // namespace slpmatch
