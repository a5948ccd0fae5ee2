#include "g2forms/multi_index.hpp"

#include <algorithm>
#include <mutex>

namespace g2f {

std::string MultiIndex::str() const {
  std::string s = "dx[";
  bool first = true;
  for (int a : axes()) {
    if (!first) s += ',';
    s += static_cast<char>('0' + a);
    first = false;
  }
  s += ']';
  return s;
}

namespace {

std::array<GradeTable, 8> build_tables() {
  std::array<GradeTable, 8> tabs;
  for (int p = 0; p <= 7; ++p) {
    GradeTable& t = tabs[p];
    t.grade = p;
    t.pos_of.fill(-1);
    // lexicographic enumeration of increasing p-tuples from {1..7}
    std::array<int, 7> idx{};
    for (int i = 0; i < p; ++i) idx[i] = i + 1;
    while (true) {
      uint8_t m = 0;
      for (int i = 0; i < p; ++i) m |= static_cast<uint8_t>(1u << (idx[i] - 1));
      t.pos_of[m] = static_cast<int>(t.masks.size());
      t.masks.push_back(m);
      if (p == 0) break;
      int k = p - 1;
      while (k >= 0 && idx[k] == kDim - (p - 1 - k)) --k;
      if (k < 0) break;
      ++idx[k];
      for (int j = k + 1; j < p; ++j) idx[j] = idx[j - 1] + 1;
    }
  }
  return tabs;
}

const std::array<GradeTable, 8>& tables() {
  static const std::array<GradeTable, 8> tabs = build_tables();
  return tabs;
}

}  // namespace

const GradeTable& grade_table(int p) { return tables()[p]; }

int pos_of_mask(uint8_t mask) {
  return tables()[__builtin_popcount(mask)].pos_of[mask];
}

int merge_sign(uint8_t maskI, uint8_t maskJ) {
  if (maskI & maskJ) return 0;
  // count inversions: pairs (i in I, j in J) with i > j
  int inv = 0;
  for (int b = 0; b < kDim; ++b) {
    if ((maskJ >> b) & 1u) {
      inv += __builtin_popcount(maskI >> (b + 1));
    }
  }
  return (inv & 1) ? -1 : 1;
}

int complement_sign(uint8_t maskI) { return merge_sign(maskI, static_cast<uint8_t>(~maskI & 0x7f)); }

int removal_sign(uint8_t maskI, int axis) {
  const uint8_t below = static_cast<uint8_t>(maskI & ((1u << (axis - 1)) - 1u));
  return (__builtin_popcount(below) & 1) ? -1 : 1;
}

}  // namespace g2f
