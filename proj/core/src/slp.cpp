#include "slpmatch/slp.hpp"

#include <algorithm>

namespace slpmatch {

Alphabet::Alphabet(std::vector<std::string> symbols) : symbols_(std::move(symbols)) {
  for (std::uint32_t i = 0; i < symbols_.size(); ++i) {
    if (symbols_[i].empty()) throw FormatError("alphabet: empty symbol");
    if (!index_.emplace(symbols_[i], i).second)
      throw FormatError("alphabet: duplicate symbol");
  }
}

std::optional<std::uint32_t> Alphabet::find(std::string_view symbol) const {
  const auto it = index_.find(std::string(symbol));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::string_view> split_symbols(std::string_view text, bool byte_mode) {
  std::vector<std::string_view> out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    std::size_t len = 1;
    if (!byte_mode) {
      const auto b = static_cast<unsigned char>(text[i]);
      std::size_t want = 1;
      if ((b & 0xE0) == 0xC0)
        want = 2;
      else if ((b & 0xF0) == 0xE0)
        want = 3;
      else if ((b & 0xF8) == 0xF0)
        want = 4;
      if (want > 1 && i + want <= text.size()) {
        bool ok = true;
        for (std::size_t k = 1; k < want; ++k) {
          if ((static_cast<unsigned char>(text[i + k]) & 0xC0) != 0x80) ok = false;
        }
        if (ok) len = want;
      }
    }
    out.push_back(text.substr(i, len));
    i += len;
  }
  return out;
}

namespace {
constexpr std::uint64_t kMaxTextLength = (std::uint64_t{1} << 63) - 1;
}

Slp::Slp(std::vector<Rule> rules, NodeId root, Alphabet alphabet)
    : rules_(std::move(rules)), root_(root), alphabet_(std::move(alphabet)) {
  const std::size_t n = rules_.size();
  if (n == 0) throw FormatError("slp: no rules");
  if (root_ >= n) throw FormatError("slp: root id out of range");
  for (const Rule& r : rules_) {
    if (r.is_terminal()) {
      if (r.symbol >= alphabet_.sigma()) throw FormatError("slp: terminal symbol out of range");
    } else {
      if (r.left >= n || r.right == kNoNode || r.right >= n)
        throw FormatError("slp: rule id out of range");
    }
  }

  // Iterative cycle check over every rule; the finish order gives a
  // children-before-parents topological order.
  std::vector<std::uint8_t> state(n, 0);  // 0 new, 1 on stack, 2 done
  topo_.reserve(n);
  std::vector<std::pair<NodeId, std::uint8_t>> stack;
  for (NodeId s = 0; s < n; ++s) {
    if (state[s] != 0) continue;
    stack.emplace_back(s, 0);
    while (!stack.empty()) {
      auto& [v, phase] = stack.back();
      if (phase == 0) {
        if (state[v] == 1) throw FormatError("not an SLP: grammar contains a cycle");
        if (state[v] == 2) {
          stack.pop_back();
          continue;
        }
        state[v] = 1;
        phase = 1;
        if (!rules_[v].is_terminal()) {
          const NodeId l = rules_[v].left;
          const NodeId r = rules_[v].right;
          if (state[l] == 1 || state[r] == 1)
            throw FormatError("not an SLP: grammar contains a cycle");
          if (state[r] == 0) stack.emplace_back(r, 0);
          if (state[l] == 0) stack.emplace_back(l, 0);
        }
      } else {
        state[v] = 2;
        topo_.push_back(v);
        stack.pop_back();
      }
    }
  }

  length_.assign(n, 0);
  std::vector<std::uint32_t> chain(n, 1);
  for (NodeId v : topo_) {
    if (rules_[v].is_terminal()) {
      length_[v] = 1;
      chain[v] = 1;
    } else {
      const std::uint64_t sum = length_[rules_[v].left] + length_[rules_[v].right];
      if (sum > kMaxTextLength) throw FormatError("string too long: length exceeds 2^63-1");
      length_[v] = sum;
      chain[v] = 1 + std::max(chain[rules_[v].left], chain[rules_[v].right]);
    }
  }
  height_ = chain[root_];

  reachable_.assign(n, 0);
  std::vector<NodeId> work{root_};
  reachable_[root_] = 1;
  while (!work.empty()) {
    const NodeId v = work.back();
    work.pop_back();
    if (rules_[v].is_terminal()) continue;
    for (const NodeId c : {rules_[v].left, rules_[v].right}) {
      if (!reachable_[c]) {
        reachable_[c] = 1;
        work.push_back(c);
      }
    }
  }
}

std::vector<std::uint32_t> Slp::expand_ids(std::uint64_t max_len) const {
  check_arg(text_length() <= max_len, "expand: derived string longer than the guard");
  std::vector<std::uint32_t> out;
  out.reserve(static_cast<std::size_t>(text_length()));
  std::vector<NodeId> stack{root_};
  while (!stack.empty()) {
    const NodeId v = stack.back();
    stack.pop_back();
    if (is_terminal(v)) {
      out.push_back(symbol(v));
    } else {
      stack.push_back(right(v));
      stack.push_back(left(v));
    }
  }
  return out;
}

std::string Slp::expand(std::uint64_t max_len) const {
  const auto ids = expand_ids(max_len);
  std::string out;
  out.reserve(ids.size());
  for (const std::uint32_t id : ids) out += alphabet_.symbol(id);
  return out;
}

std::uint32_t Slp::symbol_at(std::uint64_t i) const {
  check_arg(i >= 1 && i <= text_length(), "symbol_at: position out of range");
  NodeId v = root_;
  std::uint64_t offset = i - 1;
  while (!is_terminal(v)) {
    const std::uint64_t left_len = length_[left(v)];
    if (offset < left_len) {
      v = left(v);
    } else {
      offset -= left_len;
      v = right(v);
    }
  }
  return symbol(v);
}

std::vector<std::uint32_t> Slp::window_ids(std::uint64_t from, std::uint64_t count) const {
  check_arg(from >= 1 && count <= text_length() && from <= text_length() - count + 1,
            "window_ids: range out of bounds");
  std::vector<std::uint32_t> out;
  out.reserve(static_cast<std::size_t>(count));
  for (std::uint64_t i = 0; i < count; ++i) out.push_back(symbol_at(from + i));
  return out;
}

}  // namespace slpmatch
