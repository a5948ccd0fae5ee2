#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace g2f {

inline constexpr int kDim = 7;

/// Strictly increasing tuple of axes from {1,...,7}, identifying one basis
/// p-form dx^{i1...ip}.  Stored as a 7-bit mask (bit k <-> axis k+1).
class MultiIndex {
public:
  MultiIndex() : mask_(0) {}
  explicit MultiIndex(uint8_t mask) : mask_(mask) {}
  MultiIndex(std::initializer_list<int> axes) : mask_(0) {
    for (int a : axes) mask_ |= static_cast<uint8_t>(1u << (a - 1));
  }

  uint8_t mask() const { return mask_; }
  int grade() const { return __builtin_popcount(mask_); }
  bool contains(int axis) const { return (mask_ >> (axis - 1)) & 1u; }

  std::vector<int> axes() const {
    std::vector<int> out;
    for (int a = 1; a <= kDim; ++a)
      if (contains(a)) out.push_back(a);
    return out;
  }

  /// Complementary index set, {1..7} minus this one.
  MultiIndex complement() const { return MultiIndex(static_cast<uint8_t>(~mask_ & 0x7f)); }

  bool operator==(const MultiIndex& o) const { return mask_ == o.mask_; }
  bool operator!=(const MultiIndex& o) const { return mask_ != o.mask_; }

  std::string str() const;  // "dx[1,2,3]"

private:
  uint8_t mask_;
};

inline int binom7(int p) {
  static constexpr int c[8] = {1, 7, 21, 35, 35, 21, 7, 1};
  return (p >= 0 && p <= 7) ? c[p] : 0;
}

/// Combinatorial tables for one grade: lexicographically ordered index sets,
/// mask -> position lookup, and sign bookkeeping helpers.
struct GradeTable {
  int grade = 0;
  std::vector<uint8_t> masks;       // position -> mask, lex order of axis tuples
  std::array<int, 128> pos_of{};    // mask -> position (or -1)
};

const GradeTable& grade_table(int p);

/// Position of a mask within its grade's lex ordering.
int pos_of_mask(uint8_t mask);

/// Parity sign of merging disjoint I (kept left) with J: e_I ^ e_J = sign * e_{I u J}.
/// Returns 0 if the sets intersect.
int merge_sign(uint8_t maskI, uint8_t maskJ);

/// Sign of the permutation (I, I^c) relative to (1,...,7).
int complement_sign(uint8_t maskI);

/// Sign picked up when removing `axis` from I: e_I = sign * dx^axis ^ e_{I-axis}.
/// (-1)^(position of axis in I, zero-based).
int removal_sign(uint8_t maskI, int axis);

}  // namespace g2f
