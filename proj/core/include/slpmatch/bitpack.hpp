#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "slpmatch/common.hpp"

namespace slpmatch {

inline constexpr std::size_t kWordBits = 64;

constexpr std::size_t words_for_bits(std::size_t bits) {
  return (bits + kWordBits - 1) / kWordBits;
}

/// Fixed-length bit string packed into 64-bit words.
///
/// Bit 0 is the first element of the universe and is stored in the lowest
/// bit of word 0. Bits at positions >= size() are kept zero (canonical
/// form); every operation preserves that invariant.
class BitString {
 public:
  BitString() = default;
  explicit BitString(std::size_t len_bits)
      : len_(len_bits), words_(words_for_bits(len_bits), 0) {}

  /// Builds from a 0/1 character string; s[i] is bit i.
  static BitString from_string01(std::string_view s);

  std::size_t size() const { return len_; }
  std::size_t word_count() const { return words_.size(); }
  std::span<const std::uint64_t> words() const { return words_; }

  bool test(std::size_t i) const {
    check_arg(i < len_, "BitString::test: index out of range");
    return (words_[i / kWordBits] >> (i % kWordBits)) & 1u;
  }
  void set(std::size_t i, bool value = true) {
    check_arg(i < len_, "BitString::set: index out of range");
    const std::uint64_t mask = std::uint64_t{1} << (i % kWordBits);
    if (value)
      words_[i / kWordBits] |= mask;
    else
      words_[i / kWordBits] &= ~mask;
  }

  bool any() const;
  std::size_t count() const;

  BitString& operator&=(const BitString& other);
  BitString& operator|=(const BitString& other);
  BitString& operator^=(const BitString& other);
  BitString operator~() const;

  friend BitString operator&(BitString a, const BitString& b) { return a &= b; }
  friend BitString operator|(BitString a, const BitString& b) { return a |= b; }
  friend BitString operator^(BitString a, const BitString& b) { return a ^= b; }

  bool operator==(const BitString&) const = default;

 private:
  friend BitString clear_prefix(const BitString& b, std::size_t k);

  void clear_padding();

  std::size_t len_ = 0;
  std::vector<std::uint64_t> words_;
};

/// Index of the lowest set bit, or nullopt for the empty set.
std::optional<std::size_t> lsb_index(const BitString& b);
/// Index of the highest set bit, or nullopt for the empty set.
std::optional<std::size_t> msb_index(const BitString& b);

/// Bitwise OR of all inputs. Every input must have length len_bits.
BitString summary(std::span<const BitString> inputs, std::size_t len_bits);

/// Returns b with bits 0..k-1 cleared. Requires k <= b.size().
BitString clear_prefix(const BitString& b, std::size_t k);

/// rows x cols bit matrix; each row is packed like a BitString of length
/// cols, so rows are padded to whole words and padding bits stay zero.
class BitMatrix {
 public:
  BitMatrix() = default;
  BitMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), wpr_(words_for_bits(cols)), data_(rows * wpr_, 0) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t words_per_row() const { return wpr_; }

  bool test(std::size_t r, std::size_t c) const {
    check_arg(r < rows_ && c < cols_, "BitMatrix::test: index out of range");
    return (data_[r * wpr_ + c / kWordBits] >> (c % kWordBits)) & 1u;
  }
  void set(std::size_t r, std::size_t c, bool value = true) {
    check_arg(r < rows_ && c < cols_, "BitMatrix::set: index out of range");
    const std::uint64_t mask = std::uint64_t{1} << (c % kWordBits);
    if (value)
      data_[r * wpr_ + c / kWordBits] |= mask;
    else
      data_[r * wpr_ + c / kWordBits] &= ~mask;
  }

  std::span<const std::uint64_t> row_words(std::size_t r) const {
    return {data_.data() + r * wpr_, wpr_};
  }
  std::span<std::uint64_t> row_words(std::size_t r) {
    return {data_.data() + r * wpr_, wpr_};
  }
  BitString row(std::size_t r) const;
  void set_row(std::size_t r, const BitString& b);

  bool operator==(const BitMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::size_t wpr_ = 0;
  std::vector<std::uint64_t> data_;
};

/// In-place transpose of a 64x64 bit block, one word per row. Runs in
/// O(w log w) word operations (log w rounds of half-block swaps).
void transpose_64x64_inplace(std::uint64_t block[64]);

/// Transpose of a 64x64 matrix. Dimensions are checked.
BitMatrix transpose_word_block(const BitMatrix& m);

/// Transpose of an arbitrary matrix; pads to word-aligned 64x64 blocks
/// internally and transposes each block in O(w log w).
BitMatrix transpose(const BitMatrix& m);

/// Word-span helpers shared by the packed indexes. Spans are little-endian
/// in the same sense as BitString: universe element i lives in
/// w[i/64] >> (i%64).
namespace wordops {

inline bool test_bit(std::span<const std::uint64_t> w, std::size_t i) {
  return (w[i / kWordBits] >> (i % kWordBits)) & 1u;
}
inline void set_bit(std::span<std::uint64_t> w, std::size_t i) {
  w[i / kWordBits] |= std::uint64_t{1} << (i % kWordBits);
}
inline void or_into(std::span<std::uint64_t> dst, std::span<const std::uint64_t> src) {
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] |= src[i];
}
inline void and_into(std::span<std::uint64_t> dst, std::span<const std::uint64_t> src) {
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] &= src[i];
}

std::optional<std::size_t> first_set(std::span<const std::uint64_t> w);
std::optional<std::size_t> last_set(std::span<const std::uint64_t> w);
/// First set bit at position >= k, or nullopt.
std::optional<std::size_t> first_set_at_or_after(std::span<const std::uint64_t> w, std::size_t k);

}  // namespace wordops

}  // namespace slpmatch
