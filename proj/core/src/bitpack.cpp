#include "slpmatch/bitpack.hpp"

#include <bit>
#include <string_view>

namespace slpmatch {

BitString BitString::from_string01(std::string_view s) {
  BitString b(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    check_arg(s[i] == '0' || s[i] == '1', "BitString::from_string01: expected 0/1");
    if (s[i] == '1') b.set(i);
  }
  return b;
}

void BitString::clear_padding() {
  if (len_ % kWordBits != 0 && !words_.empty()) {
    words_.back() &= (std::uint64_t{1} << (len_ % kWordBits)) - 1;
  }
}

bool BitString::any() const {
  for (std::uint64_t w : words_)
    if (w) return true;
  return false;
}

std::size_t BitString::count() const {
  std::size_t n = 0;
  for (std::uint64_t w : words_) n += static_cast<std::size_t>(std::popcount(w));
  return n;
}

BitString& BitString::operator&=(const BitString& other) {
  check_arg(len_ == other.len_, "BitString: operand lengths differ");
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= other.words_[i];
  return *this;
}

BitString& BitString::operator|=(const BitString& other) {
  check_arg(len_ == other.len_, "BitString: operand lengths differ");
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= other.words_[i];
  return *this;
}

BitString& BitString::operator^=(const BitString& other) {
  check_arg(len_ == other.len_, "BitString: operand lengths differ");
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] ^= other.words_[i];
  return *this;
}

BitString BitString::operator~() const {
  BitString out(*this);
  for (std::uint64_t& w : out.words_) w = ~w;
  out.clear_padding();
  return out;
}

std::optional<std::size_t> lsb_index(const BitString& b) {
  return wordops::first_set(b.words());
}

std::optional<std::size_t> msb_index(const BitString& b) {
  return wordops::last_set(b.words());
}

BitString summary(std::span<const BitString> inputs, std::size_t len_bits) {
  BitString out(len_bits);
  for (const BitString& b : inputs) {
    check_arg(b.size() == len_bits, "summary: input lengths differ");
    out |= b;
  }
  return out;
}

BitString clear_prefix(const BitString& b, std::size_t k) {
  check_arg(k <= b.size(), "clear_prefix: k out of range");
  BitString out(b);
  const std::size_t full = k / kWordBits;
  for (std::size_t i = 0; i < full; ++i) out.words_[i] = 0;
  if (k % kWordBits != 0 && full < out.words_.size()) {
    out.words_[full] &= ~std::uint64_t{0} << (k % kWordBits);
  }
  return out;
}

BitString BitMatrix::row(std::size_t r) const {
  check_arg(r < rows_, "BitMatrix::row: index out of range");
  BitString out(cols_);
  auto src = row_words(r);
  for (std::size_t c = 0; c < cols_; ++c) {
    if (wordops::test_bit(src, c)) out.set(c);
  }
  return out;
}

void BitMatrix::set_row(std::size_t r, const BitString& b) {
  check_arg(r < rows_ && b.size() == cols_, "BitMatrix::set_row: shape mismatch");
  auto dst = row_words(r);
  auto src = b.words();
  for (std::size_t i = 0; i < wpr_; ++i) dst[i] = src[i];
}

void transpose_64x64_inplace(std::uint64_t block[64]) {
  std::uint64_t mask = 0x00000000FFFFFFFFull;
  for (std::uint32_t j = 32; j != 0; j >>= 1, mask ^= mask << j) {
    for (std::uint32_t k = 0; k < 64; k = (k + j + 1) & ~j) {
      const std::uint64_t t = (block[k] ^ (block[k + j] >> j)) & mask;
      block[k] ^= t;
      block[k + j] ^= t << j;
    }
  }
}

BitMatrix transpose_word_block(const BitMatrix& m) {
  check_arg(m.rows() == kWordBits && m.cols() == kWordBits,
            "transpose_word_block: matrix must be 64x64");
  return transpose(m);
}

BitMatrix transpose(const BitMatrix& m) {
  BitMatrix out(m.cols(), m.rows());
  const std::size_t row_blocks = words_for_bits(m.rows());
  const std::size_t col_blocks = m.words_per_row();
  std::uint64_t block[64];
  for (std::size_t bi = 0; bi < row_blocks; ++bi) {
    for (std::size_t bj = 0; bj < col_blocks; ++bj) {
      for (std::size_t r = 0; r < 64; ++r) {
        const std::size_t row = bi * 64 + r;
        block[r] = row < m.rows() ? m.row_words(row)[bj] : 0;
      }
      transpose_64x64_inplace(block);
      for (std::size_t r = 0; r < 64; ++r) {
        const std::size_t row = bj * 64 + r;
        if (row < out.rows()) out.row_words(row)[bi] = block[r];
      }
    }
  }
  return out;
}

namespace wordops {

std::optional<std::size_t> first_set(std::span<const std::uint64_t> w) {
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i]) return i * kWordBits + static_cast<std::size_t>(std::countr_zero(w[i]));
  }
  return std::nullopt;
}

std::optional<std::size_t> last_set(std::span<const std::uint64_t> w) {
  for (std::size_t i = w.size(); i-- > 0;) {
    if (w[i]) return i * kWordBits + (63 - static_cast<std::size_t>(std::countl_zero(w[i])));
  }
  return std::nullopt;
}

std::optional<std::size_t> first_set_at_or_after(std::span<const std::uint64_t> w, std::size_t k) {
  std::size_t wi = k / kWordBits;
  if (wi >= w.size()) return std::nullopt;
  std::uint64_t first = w[wi] & (~std::uint64_t{0} << (k % kWordBits));
  if (first) return wi * kWordBits + static_cast<std::size_t>(std::countr_zero(first));
  for (std::size_t i = wi + 1; i < w.size(); ++i) {
    if (w[i]) return i * kWordBits + static_cast<std::size_t>(std::countr_zero(w[i]));
  }
  return std::nullopt;
}

}  // namespace wordops

}  // namespace slpmatch
