#pragma once

// Exact linear algebra over GF(2). Matrices are stored as sorted sparse
// rows; elimination routines densify into 64-bit word rows internally.
// All pivoting is lowest-index-first so results are bit-for-bit
// reproducible across runs.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

namespace khb {

using Index = std::uint32_t;

// Dense bit rows, used as scratch for elimination.
class BitRows {
public:
  BitRows(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), stride_((cols + 63) / 64),
        words_(rows * stride_, 0) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  bool get(std::size_t r, std::size_t c) const {
    return (words_[r * stride_ + c / 64] >> (c % 64)) & 1u;
  }
  void set(std::size_t r, std::size_t c) {
    words_[r * stride_ + c / 64] |= std::uint64_t(1) << (c % 64);
  }
  void xor_row(std::size_t dst, std::size_t src) {
    auto* d = words_.data() + dst * stride_;
    const auto* s = words_.data() + src * stride_;
    for (std::size_t k = 0; k < stride_; ++k) d[k] ^= s[k];
  }
  void swap_rows(std::size_t a, std::size_t b) {
    if (a == b) return;
    std::swap_ranges(words_.begin() + a * stride_,
                     words_.begin() + (a + 1) * stride_,
                     words_.begin() + b * stride_);
  }
  // Lowest set column at or after `from`, or cols() if none.
  std::size_t first_set(std::size_t r, std::size_t from = 0) const {
    const auto* w = words_.data() + r * stride_;
    std::size_t k = from / 64;
    if (k < stride_) {
      std::uint64_t word = w[k] & (~std::uint64_t(0) << (from % 64));
      while (true) {
        if (word) return k * 64 + std::size_t(__builtin_ctzll(word));
        if (++k == stride_) break;
        word = w[k];
      }
    }
    return cols_;
  }

private:
  std::size_t rows_, cols_, stride_;
  std::vector<std::uint64_t> words_;
};

// Sparse GF(2) matrix; row r holds the sorted column indices of its 1s.
class F2Matrix {
public:
  F2Matrix() : rows_(0), cols_(0) {}
  F2Matrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows) {}

  static F2Matrix identity(std::size_t n) {
    F2Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.data_[i] = {Index(i)};
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  const std::vector<Index>& row(std::size_t r) const { return data_[r]; }

  bool get(std::size_t r, std::size_t c) const {
    return std::binary_search(data_[r].begin(), data_[r].end(), Index(c));
  }
  void toggle(std::size_t r, std::size_t c) {
    auto& v = data_[r];
    auto it = std::lower_bound(v.begin(), v.end(), Index(c));
    if (it != v.end() && *it == Index(c)) v.erase(it);
    else v.insert(it, Index(c));
  }
  void set_row(std::size_t r, std::vector<Index> cols_sorted) {
    data_[r] = std::move(cols_sorted);
  }

  bool is_zero() const {
    for (const auto& r : data_) if (!r.empty()) return false;
    return true;
  }
  std::size_t entry_count() const {
    std::size_t n = 0;
    for (const auto& r : data_) n += r.size();
    return n;
  }

  F2Matrix operator+(const F2Matrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_)
      throw std::invalid_argument("F2Matrix: shape mismatch in +");
    F2Matrix out(rows_, cols_);
    for (std::size_t r = 0; r < rows_; ++r) {
      std::set_symmetric_difference(data_[r].begin(), data_[r].end(),
                                    o.data_[r].begin(), o.data_[r].end(),
                                    std::back_inserter(out.data_[r]));
    }
    return out;
  }

  bool operator==(const F2Matrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
  }

  // this * o  (row-major accumulation).
  F2Matrix operator*(const F2Matrix& o) const {
    if (cols_ != o.rows_)
      throw std::invalid_argument("F2Matrix: shape mismatch in *");
    F2Matrix out(rows_, o.cols_);
    std::vector<std::uint64_t> acc((o.cols_ + 63) / 64);
    for (std::size_t r = 0; r < rows_; ++r) {
      if (data_[r].empty()) continue;
      std::fill(acc.begin(), acc.end(), 0);
      for (Index k : data_[r])
        for (Index c : o.data_[k]) acc[c / 64] ^= std::uint64_t(1) << (c % 64);
      auto& outr = out.data_[r];
      for (std::size_t w = 0; w < acc.size(); ++w) {
        std::uint64_t word = acc[w];
        while (word) {
          outr.push_back(Index(w * 64 + __builtin_ctzll(word)));
          word &= word - 1;
        }
      }
    }
    return out;
  }

  F2Matrix transposed() const {
    F2Matrix out(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (Index c : data_[r]) out.data_[c].push_back(Index(r));
    return out;
  }

  // Apply to a column vector given as a sorted index set.
  std::vector<Index> apply(const std::vector<Index>& v) const {
    std::vector<std::uint64_t> acc((rows_ + 63) / 64);
    F2Matrix t = transposed();
    for (Index j : v)
      for (Index r : t.data_[j]) acc[r / 64] ^= std::uint64_t(1) << (r % 64);
    std::vector<Index> out;
    for (std::size_t w = 0; w < acc.size(); ++w) {
      std::uint64_t word = acc[w];
      while (word) {
        out.push_back(Index(w * 64 + __builtin_ctzll(word)));
        word &= word - 1;
      }
    }
    return out;
  }

  BitRows densify() const {
    BitRows b(rows_, std::max<std::size_t>(cols_, 1));
    for (std::size_t r = 0; r < rows_; ++r)
      for (Index c : data_[r]) b.set(r, c);
    return b;
  }

private:
  std::size_t rows_, cols_;
  std::vector<std::vector<Index>> data_;
};

// Row echelon form in place; returns pivot columns (ascending).
inline std::vector<std::size_t> echelonize(BitRows& m) {
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t c = 0; c < m.cols() && r < m.rows(); ++c) {
    std::size_t sel = m.rows();
    for (std::size_t i = r; i < m.rows(); ++i)
      if (m.get(i, c)) { sel = i; break; }
    if (sel == m.rows()) continue;
    m.swap_rows(r, sel);
    for (std::size_t i = 0; i < m.rows(); ++i)
      if (i != r && m.get(i, c)) m.xor_row(i, r);
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

inline std::size_t rank(const F2Matrix& m) {
  if (m.rows() == 0 || m.cols() == 0) return 0;
  BitRows b = m.densify();
  return echelonize(b).size();
}

// Solve a * X = b column by column; free variables are set to zero
// (lowest-index pivot rule). Returns nothing if inconsistent.
inline std::optional<F2Matrix> solve(const F2Matrix& a, const F2Matrix& b) {
  if (a.rows() != b.rows())
    throw std::invalid_argument("solve: row mismatch");
  const std::size_t n = a.cols(), k = b.cols();
  BitRows aug(a.rows(), n + std::max<std::size_t>(k, 1));
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (Index c : a.row(r)) aug.set(r, c);
    for (Index c : b.row(r)) aug.set(r, n + c);
  }
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t c = 0; c < n && r < a.rows(); ++c) {
    std::size_t sel = a.rows();
    for (std::size_t i = r; i < a.rows(); ++i)
      if (aug.get(i, c)) { sel = i; break; }
    if (sel == a.rows()) continue;
    aug.swap_rows(r, sel);
    for (std::size_t i = 0; i < a.rows(); ++i)
      if (i != r && aug.get(i, c)) aug.xor_row(i, r);
    pivots.push_back(c);
    ++r;
  }
  // Inconsistency: a leftover row with zero a-part but nonzero b-part.
  for (std::size_t i = r; i < a.rows(); ++i)
    if (aug.first_set(i) >= n && aug.first_set(i) < n + k) return std::nullopt;
  F2Matrix x(n, k);
  for (std::size_t p = 0; p < pivots.size(); ++p)
    for (std::size_t j = 0; j < k; ++j)
      if (aug.get(p, n + j)) x.toggle(pivots[p], j);
  return x;
}

// Basis of the null space of m; each basis vector is a sorted index set.
inline std::vector<std::vector<Index>> kernel_basis(const F2Matrix& m) {
  const std::size_t n = m.cols();
  BitRows b = m.densify();
  std::vector<std::size_t> pivots = echelonize(b);
  std::vector<bool> is_pivot(n, false);
  for (std::size_t p : pivots) is_pivot[p] = true;
  std::vector<std::vector<Index>> basis;
  for (std::size_t c = 0; c < n; ++c) {
    if (is_pivot[c]) continue;
    std::vector<Index> v{Index(c)};
    for (std::size_t p = 0; p < pivots.size(); ++p)
      if (b.get(p, c)) v.push_back(Index(pivots[p]));
    std::sort(v.begin(), v.end());
    basis.push_back(std::move(v));
  }
  return basis;
}

}  // namespace khb
