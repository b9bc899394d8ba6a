#include "slpmatch/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <random>
#include <unordered_map>

namespace slpmatch {

namespace {

/// Pair (a, b) every two adjacent elements, carrying a trailing odd element
/// up a level, until one rule remains.
NodeId balanced_pairing(std::vector<Slp::Rule>& rules, std::vector<NodeId> seq) {
  while (seq.size() > 1) {
    std::vector<NodeId> up;
    up.reserve(seq.size() / 2 + 1);
    std::size_t i = 0;
    for (; i + 1 < seq.size(); i += 2) {
      up.push_back(static_cast<NodeId>(rules.size()));
      rules.push_back(Slp::Rule::pair(seq[i], seq[i + 1]));
    }
    if (i < seq.size()) up.push_back(seq[i]);
    seq = std::move(up);
  }
  return seq[0];
}

std::uint64_t pair_key(NodeId a, NodeId b) {
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

}  // namespace

Slp ingest_text(std::string_view text, bool byte_mode) {
  check_arg(!text.empty(), "ingest_text: empty input");
  const auto raw = split_symbols(text, byte_mode);

  std::vector<std::string> symbols;
  std::unordered_map<std::string, std::uint32_t> seen;
  std::vector<NodeId> seq;
  seq.reserve(raw.size());
  std::vector<Slp::Rule> rules;
  for (const auto sym : raw) {
    auto [it, inserted] = seen.emplace(sym, static_cast<std::uint32_t>(symbols.size()));
    if (inserted) {
      symbols.emplace_back(sym);
      rules.push_back(Slp::Rule::terminal(it->second));
    }
    seq.push_back(it->second);
  }

  // Repeatedly replace the most frequent adjacent pair (ties to the
  // smallest pair) with a fresh rule, scanning left to right so that
  // overlapping occurrences like "aaa" are taken disjointly.
  while (seq.size() > 1) {
    std::unordered_map<std::uint64_t, std::uint32_t> freq;
    freq.reserve(seq.size());
    for (std::size_t i = 0; i + 1 < seq.size(); ++i) ++freq[pair_key(seq[i], seq[i + 1])];
    std::uint64_t best_key = 0;
    std::uint32_t best_count = 0;
    for (const auto& [key, count] : freq) {
      if (count > best_count || (count == best_count && key < best_key)) {
        best_key = key;
        best_count = count;
      }
    }
    if (best_count < 2) break;
    const auto a = static_cast<NodeId>(best_key >> 32);
    const auto b = static_cast<NodeId>(best_key & 0xFFFFFFFFu);
    const auto fresh = static_cast<NodeId>(rules.size());
    rules.push_back(Slp::Rule::pair(a, b));
    std::vector<NodeId> next;
    next.reserve(seq.size());
    for (std::size_t i = 0; i < seq.size();) {
      if (i + 1 < seq.size() && seq[i] == a && seq[i + 1] == b) {
        next.push_back(fresh);
        i += 2;
      } else {
        next.push_back(seq[i]);
        i += 1;
      }
    }
    seq = std::move(next);
  }

  const NodeId root = balanced_pairing(rules, std::move(seq));
  return Slp(std::move(rules), root, Alphabet(std::move(symbols)));
}

std::string synthetic_symbol(std::uint32_t i) {
  // Printable ASCII first, then Latin/Greek scalars for larger alphabets.
  if (i < 94) return std::string(1, static_cast<char>(33 + i));
  const std::uint32_t cp = 0xA1 + (i - 94);
  std::string out;
  if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
  return out;
}

namespace {

std::string random_text(std::uint64_t length, std::uint32_t sigma, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::uint32_t> pick(0, sigma - 1);
  std::string text;
  for (std::uint64_t i = 0; i < length; ++i) text += synthetic_symbol(pick(rng));
  return text;
}

Slp generate_fibonacci(std::uint32_t k) {
  check_arg(k >= 2, "fibonacci: k must be at least 2");
  // Rule 0 derives "b", rule 1 derives "a", rule i = pair(i-1, i-2).
  std::vector<Slp::Rule> rules{Slp::Rule::terminal(0), Slp::Rule::terminal(1)};
  for (std::uint32_t i = 2; i < k; ++i)
    rules.push_back(Slp::Rule::pair(static_cast<NodeId>(i - 1), static_cast<NodeId>(i - 2)));
  return Slp(std::move(rules), static_cast<NodeId>(k - 1), Alphabet({"b", "a"}));
}

Slp generate_power(const std::string& symbol, std::uint32_t k) {
  check_arg(!symbol.empty(), "power: empty symbol");
  std::vector<Slp::Rule> rules{Slp::Rule::terminal(0)};
  for (std::uint32_t i = 0; i < k; ++i)
    rules.push_back(Slp::Rule::pair(static_cast<NodeId>(i), static_cast<NodeId>(i)));
  return Slp(std::move(rules), static_cast<NodeId>(k), Alphabet({symbol}));
}

Slp generate_random_dag(std::uint64_t rule_count, std::uint32_t sigma, std::uint64_t seed) {
  check_arg(sigma >= 1, "random: sigma must be positive");
  check_arg(rule_count >= sigma, "random: need at least sigma rules");
  std::mt19937_64 rng(seed);
  std::vector<Slp::Rule> rules;
  std::vector<std::uint64_t> length;
  std::vector<std::string> symbols;
  for (std::uint32_t c = 0; c < sigma; ++c) {
    rules.push_back(Slp::Rule::terminal(c));
    length.push_back(1);
    symbols.push_back(synthetic_symbol(c));
  }
  constexpr std::uint64_t kLengthCap = std::uint64_t{1} << 62;
  for (std::uint64_t v = sigma; v < rule_count; ++v) {
    std::uniform_int_distribution<std::uint64_t> any(0, v - 1);
    NodeId l = rng() & 1 ? static_cast<NodeId>(v - 1) : static_cast<NodeId>(any(rng));
    NodeId r = static_cast<NodeId>(any(rng));
    while (length[l] + length[r] > kLengthCap) {
      l = static_cast<NodeId>(any(rng));
      r = static_cast<NodeId>(any(rng));
    }
    rules.push_back(Slp::Rule::pair(l, r));
    length.push_back(length[l] + length[r]);
  }
  return Slp(std::move(rules), static_cast<NodeId>(rule_count - 1),
             Alphabet(std::move(symbols)));
}

Slp generate_balanced(std::uint64_t length, std::uint32_t sigma, std::uint64_t seed) {
  check_arg(length >= 1 && sigma >= 1, "balanced-binary: bad parameters");
  const std::string text = random_text(length, sigma, seed);
  const auto raw = split_symbols(text, false);
  std::vector<std::string> symbols;
  std::unordered_map<std::string, std::uint32_t> seen;
  std::vector<Slp::Rule> rules;
  std::vector<NodeId> seq;
  for (const auto sym : raw) {
    auto [it, inserted] = seen.emplace(sym, static_cast<std::uint32_t>(symbols.size()));
    if (inserted) {
      symbols.emplace_back(sym);
      rules.push_back(Slp::Rule::terminal(it->second));
    }
    seq.push_back(it->second);
  }
  const NodeId root = balanced_pairing(rules, std::move(seq));
  return Slp(std::move(rules), root, Alphabet(std::move(symbols)));
}

std::uint64_t field_number(std::string_view field) {
  std::uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  check_arg(ec == std::errc{} && ptr == field.data() + field.size(),
            "recipe: expected a number");
  return value;
}

}  // namespace

GrammarRecipe GrammarRecipe::parse(std::string_view spec) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  while (i <= spec.size()) {
    const std::size_t j = spec.find(':', i);
    if (j == std::string_view::npos) {
      fields.push_back(spec.substr(i));
      break;
    }
    fields.push_back(spec.substr(i, j - i));
    i = j + 1;
  }
  check_arg(!fields.empty(), "recipe: empty spec");
  const std::string_view kind = fields[0];

  GrammarRecipe r;
  if (kind.starts_with("fib")) {
    check_arg(fields.size() == 2, "recipe: expected fibonacci:K");
    r.kind = Kind::Fibonacci;
    r.k = static_cast<std::uint32_t>(field_number(fields[1]));
  } else if (kind.starts_with("pow")) {
    check_arg(fields.size() == 3, "recipe: expected power:SYM:K");
    r.kind = Kind::Power;
    r.symbol = std::string(fields[1]);
    r.k = static_cast<std::uint32_t>(field_number(fields[2]));
  } else if (kind.starts_with("random")) {
    check_arg(fields.size() == 4, "recipe: expected random:RULES:SIGMA:SEED");
    r.kind = Kind::RandomDag;
    r.rule_count = field_number(fields[1]);
    r.sigma = static_cast<std::uint32_t>(field_number(fields[2]));
    r.seed = field_number(fields[3]);
  } else if (kind.starts_with("bal")) {
    check_arg(fields.size() == 4, "recipe: expected balanced-binary:LEN:SIGMA:SEED");
    r.kind = Kind::BalancedBinary;
    r.length = field_number(fields[1]);
    r.sigma = static_cast<std::uint32_t>(field_number(fields[2]));
    r.seed = field_number(fields[3]);
  } else if (kind.starts_with("rep")) {
    check_arg(fields.size() == 4, "recipe: expected repair-style:LEN:SIGMA:SEED");
    r.kind = Kind::RepairStyle;
    r.length = field_number(fields[1]);
    r.sigma = static_cast<std::uint32_t>(field_number(fields[2]));
    r.seed = field_number(fields[3]);
  } else {
    check_arg(false, "recipe: unknown kind");
  }
  return r;
}

std::string GrammarRecipe::name() const {
  switch (kind) {
    case Kind::Fibonacci:
      return "fibonacci:" + std::to_string(k);
    case Kind::Power:
      return "power:" + symbol + ":" + std::to_string(k);
    case Kind::RandomDag:
      return "random:" + std::to_string(rule_count) + ":" + std::to_string(sigma) + ":" +
             std::to_string(seed);
    case Kind::BalancedBinary:
      return "balanced-binary:" + std::to_string(length) + ":" + std::to_string(sigma) + ":" +
             std::to_string(seed);
    case Kind::RepairStyle:
      return "repair-style:" + std::to_string(length) + ":" + std::to_string(sigma) + ":" +
             std::to_string(seed);
  }
  return "?";
}

Slp generate(const GrammarRecipe& recipe) {
  switch (recipe.kind) {
    case GrammarRecipe::Kind::Fibonacci:
      return generate_fibonacci(recipe.k);
    case GrammarRecipe::Kind::Power:
      return generate_power(recipe.symbol, recipe.k);
    case GrammarRecipe::Kind::RandomDag:
      return generate_random_dag(recipe.rule_count, recipe.sigma, recipe.seed);
    case GrammarRecipe::Kind::BalancedBinary:
      return generate_balanced(recipe.length, recipe.sigma, recipe.seed);
    case GrammarRecipe::Kind::RepairStyle:
      return ingest_text(random_text(recipe.length, recipe.sigma, recipe.seed), false);
  }
  check_arg(false, "generate: unknown recipe kind");
  throw std::logic_error("unreachable");
}

}  // namespace slpmatch
