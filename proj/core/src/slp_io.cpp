#include "slpmatch/slp_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace slpmatch {

namespace {

bool plain_byte(unsigned char b) { return b > 0x20 && b < 0x7F && b != '\\'; }

std::uint64_t parse_number(std::string_view tok, std::size_t line, std::uint64_t max) {
  std::uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc{} || ptr != tok.data() + tok.size() || value > max) {
    throw FormatError("slp file: bad number on line " + std::to_string(line));
  }
  return value;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    const std::size_t j = line.find(' ', i);
    if (j == std::string_view::npos) {
      out.push_back(line.substr(i));
      break;
    }
    out.push_back(line.substr(i, j - i));
    i = j + 1;
  }
  return out;
}

}  // namespace

std::string escape_symbol(std::string_view symbol) {
  std::string out;
  for (const char ch : symbol) {
    const auto b = static_cast<unsigned char>(ch);
    if (plain_byte(b)) {
      out += ch;
    } else if (ch == '\\') {
      out += "\\\\";
    } else if (ch == ' ') {
      out += "\\s";
    } else if (ch == '\n') {
      out += "\\n";
    } else if (ch == '\r') {
      out += "\\r";
    } else if (ch == '\t') {
      out += "\\t";
    } else {
      char buf[8];
      std::snprintf(buf, sizeof buf, "\\x%02X", b);
      out += buf;
    }
  }
  return out;
}

std::string unescape_symbol(std::string_view token) {
  std::string out;
  std::size_t i = 0;
  while (i < token.size()) {
    if (token[i] != '\\') {
      out += token[i++];
      continue;
    }
    if (i + 1 >= token.size()) throw FormatError("slp file: dangling escape in symbol");
    const char kind = token[i + 1];
    switch (kind) {
      case '\\': out += '\\'; i += 2; break;
      case 's': out += ' '; i += 2; break;
      case 'n': out += '\n'; i += 2; break;
      case 'r': out += '\r'; i += 2; break;
      case 't': out += '\t'; i += 2; break;
      case 'x': {
        if (i + 3 >= token.size()) throw FormatError("slp file: truncated \\xHH escape");
        unsigned value = 0;
        const auto* begin = token.data() + i + 2;
        const auto [ptr, ec] = std::from_chars(begin, begin + 2, value, 16);
        if (ec != std::errc{} || ptr != begin + 2)
          throw FormatError("slp file: bad \\xHH escape");
        out += static_cast<char>(value);
        i += 4;
        break;
      }
      default:
        throw FormatError("slp file: unknown escape in symbol");
    }
  }
  if (out.empty()) throw FormatError("slp file: empty symbol");
  return out;
}

std::string serialize_slp(const Slp& slp) {
  std::ostringstream out;
  out << "SLP " << slp.rule_count() << ' ' << slp.root() << '\n';
  out << "ALPHA " << slp.sigma();
  for (std::uint32_t i = 0; i < slp.sigma(); ++i)
    out << ' ' << escape_symbol(slp.alphabet().symbol(i));
  out << '\n';
  for (NodeId v = 0; v < slp.rule_count(); ++v) {
    if (slp.is_terminal(v)) {
      out << "T " << slp.symbol(v) << '\n';
    } else {
      out << "N " << slp.left(v) << ' ' << slp.right(v) << '\n';
    }
  }
  return out.str();
}

void write_slp_file(const Slp& slp, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw FormatError("cannot open for writing: " + path);
  const std::string text = serialize_slp(slp);
  f.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!f) throw FormatError("write failed: " + path);
}

Slp parse_slp(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) {
      lines.push_back(text.substr(pos));
      break;
    }
    lines.push_back(text.substr(pos, nl - pos));
    pos = nl + 1;
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.size() < 2) throw FormatError("slp file: missing header lines");

  const auto head = split_fields(lines[0]);
  if (head.size() != 3 || head[0] != "SLP") throw FormatError("slp file: bad SLP header");
  const auto n = parse_number(head[1], 1, kNoNode - 1);
  const auto root = static_cast<NodeId>(parse_number(head[2], 1, kNoNode - 1));

  const auto alpha = split_fields(lines[1]);
  if (alpha.size() < 2 || alpha[0] != "ALPHA") throw FormatError("slp file: bad ALPHA header");
  const auto sigma = parse_number(alpha[1], 2, kNoNode - 1);
  if (alpha.size() != 2 + sigma) throw FormatError("slp file: ALPHA symbol count mismatch");
  std::vector<std::string> symbols;
  symbols.reserve(sigma);
  for (std::size_t i = 0; i < sigma; ++i) symbols.push_back(unescape_symbol(alpha[2 + i]));

  if (lines.size() != 2 + n) throw FormatError("slp file: rule count mismatch");
  std::vector<Slp::Rule> rules;
  rules.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t line_no = 3 + i;
    const auto fields = split_fields(lines[2 + i]);
    if (fields.size() == 2 && fields[0] == "T") {
      rules.push_back(Slp::Rule::terminal(
          static_cast<std::uint32_t>(parse_number(fields[1], line_no, kNoNode - 1))));
    } else if (fields.size() == 3 && fields[0] == "N") {
      rules.push_back(
          Slp::Rule::pair(static_cast<NodeId>(parse_number(fields[1], line_no, kNoNode - 1)),
                          static_cast<NodeId>(parse_number(fields[2], line_no, kNoNode - 1))));
    } else {
      throw FormatError("slp file: bad rule on line " + std::to_string(line_no));
    }
  }
  return Slp(std::move(rules), root, Alphabet(std::move(symbols)));
}

Slp read_slp_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw FormatError("cannot open: " + path);
  std::ostringstream buf;
  buf << f.rdbuf();
  return parse_slp(buf.str());
}

}  // namespace slpmatch
