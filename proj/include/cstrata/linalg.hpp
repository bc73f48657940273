#pragma once

#include <vector>

#include "cstrata/field_tower.hpp"
#include "cstrata/witt_ring.hpp"

namespace cstrata {

/// Dense matrix over W_s(F_q); rows and columns may be zero.
class WittMatrix {
 public:
  WittMatrix() = default;
  WittMatrix(const WittRing& ring, int rows, int cols);
  static WittMatrix identity(const WittRing& ring, int n);

  const WittRing& ring() const { return *ring_; }
  int rows() const { return rows_; }
  int cols() const { return cols_; }

  WittElement& operator()(int i, int j) { return data_[static_cast<std::size_t>(i) * cols_ + j]; }
  const WittElement& operator()(int i, int j) const { return data_[static_cast<std::size_t>(i) * cols_ + j]; }

  WittMatrix operator*(const WittMatrix& o) const;
  WittMatrix operator+(const WittMatrix& o) const;
  WittMatrix operator-(const WittMatrix& o) const;
  WittMatrix scaled(const WittElement& c) const;
  /// sigma^k applied entrywise.
  WittMatrix frobenius(u64 k) const;
  WittMatrix transpose() const;
  WittMatrix block(int r0, int c0, int nr, int nc) const;
  /// Entries reinterpreted in a ring of the same field at another precision.
  WittMatrix change_precision(const WittRing& target) const;
  /// Entries divided by p^v; requires min_valuation() >= v.
  WittMatrix divide_p_power(int v) const;

  Valuation min_valuation() const;
  bool is_zero() const;

  friend bool operator==(const WittMatrix& a, const WittMatrix& b);

 private:
  const WittRing* ring_ = nullptr;
  int rows_ = 0;
  int cols_ = 0;
  std::vector<WittElement> data_;
};

/// Coefficients c_0..c_n (low-to-high) of det(xI - M), by the division-free
/// Berkowitz recursion, so the result is exact over the local ring W_s.
std::vector<WittElement> charpoly(const WittMatrix& m);
WittElement determinant(const WittMatrix& m);

/// left * M * right = diag(p^{e_0}, p^{e_1}, ...) with e ascending; entries
/// that vanish at the working precision are reported as infinite exponents.
/// left_inverse is maintained alongside left.
struct SmithForm {
  std::vector<Valuation> exponents;  // length min(rows, cols)
  WittMatrix left, left_inverse, right;
};

SmithForm smith_form(const WittMatrix& m, bool track_transforms = false);

/// Inverse of a matrix whose determinant is a unit; PreconditionViolated otherwise.
WittMatrix inverse(const WittMatrix& m);

/// a-th compound matrix (all a x a minors, rows and columns in lexicographic
/// subset order).
WittMatrix compound(const WittMatrix& m, int a);

/// Dense matrix over a finite field.
class FFMatrix {
 public:
  FFMatrix() = default;
  FFMatrix(const FiniteField& field, int rows, int cols);

  const FiniteField& field() const { return *field_; }
  int rows() const { return rows_; }
  int cols() const { return cols_; }

  FFElem& operator()(int i, int j) { return data_[static_cast<std::size_t>(i) * cols_ + j]; }
  const FFElem& operator()(int i, int j) const { return data_[static_cast<std::size_t>(i) * cols_ + j]; }

  FFMatrix operator*(const FFMatrix& o) const;
  FFMatrix frobenius(u64 k) const;

  friend bool operator==(const FFMatrix& a, const FFMatrix& b);

 private:
  const FiniteField* field_ = nullptr;
  int rows_ = 0;
  int cols_ = 0;
  std::vector<FFElem> data_;
};

int rank(const FFMatrix& m);
FFMatrix reduce_mod_p(const WittMatrix& m);

/// Dense matrix over Z/m with row-echelon helpers; used for F_p-linear systems.
class ModMatrix {
 public:
  ModMatrix(u64 modulus, int rows, int cols) : mod_(modulus), rows_(rows), cols_(cols), data_(std::size_t(rows) * cols, 0) {}

  const detail::Modulus& mod() const { return mod_; }
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  u64& operator()(int i, int j) { return data_[static_cast<std::size_t>(i) * cols_ + j]; }
  u64 operator()(int i, int j) const { return data_[static_cast<std::size_t>(i) * cols_ + j]; }

 private:
  detail::Modulus mod_;
  int rows_;
  int cols_;
  std::vector<u64> data_;
};

struct AffineSolution {
  bool consistent = false;
  int kernel_dim = 0;  // dimension of the solution space when consistent
};

/// Solves M x = rhs over a prime field by Gaussian elimination.
AffineSolution solve_affine_mod_p(ModMatrix m, std::vector<u64> rhs);

}  // namespace cstrata
