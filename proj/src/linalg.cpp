#include "cstrata/linalg.hpp"

#include <utility>

#include "cstrata/error.hpp"

namespace cstrata {

// ---- WittMatrix ----

WittMatrix::WittMatrix(const WittRing& ring, int rows, int cols)
    : ring_(&ring), rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, ring.zero()) {}

WittMatrix WittMatrix::identity(const WittRing& ring, int n) {
  WittMatrix m(ring, n, n);
  for (int i = 0; i < n; ++i) m(i, i) = ring.one();
  return m;
}

static void check_ring(const WittMatrix& a, const WittMatrix& b) {
  if (&a.ring() != &b.ring()) fail(ErrorKind::RingMismatch, "matrices over different Witt rings");
}

WittMatrix WittMatrix::operator*(const WittMatrix& o) const {
  check_ring(*this, o);
  if (cols_ != o.rows_) fail(ErrorKind::RankMismatch, "matrix product shape mismatch");
  WittMatrix r(*ring_, rows_, o.cols_);
  for (int i = 0; i < rows_; ++i)
    for (int k = 0; k < cols_; ++k) {
      const WittElement& a = (*this)(i, k);
      if (a.is_zero()) continue;
      for (int j = 0; j < o.cols_; ++j) r(i, j) += a * o(k, j);
    }
  return r;
}

WittMatrix WittMatrix::operator+(const WittMatrix& o) const {
  check_ring(*this, o);
  if (rows_ != o.rows_ || cols_ != o.cols_) fail(ErrorKind::RankMismatch, "matrix sum shape mismatch");
  WittMatrix r = *this;
  for (std::size_t i = 0; i < data_.size(); ++i) r.data_[i] += o.data_[i];
  return r;
}

WittMatrix WittMatrix::operator-(const WittMatrix& o) const {
  check_ring(*this, o);
  if (rows_ != o.rows_ || cols_ != o.cols_) fail(ErrorKind::RankMismatch, "matrix difference shape mismatch");
  WittMatrix r = *this;
  for (std::size_t i = 0; i < data_.size(); ++i) r.data_[i] -= o.data_[i];
  return r;
}

WittMatrix WittMatrix::scaled(const WittElement& c) const {
  WittMatrix r = *this;
  for (auto& x : r.data_) x = x * c;
  return r;
}

WittMatrix WittMatrix::frobenius(u64 k) const {
  WittMatrix r = *this;
  if (ring_->deg() == 1) return r;
  for (auto& x : r.data_) x = ring_->frobenius(x, k);
  return r;
}

WittMatrix WittMatrix::transpose() const {
  WittMatrix r(*ring_, cols_, rows_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j);
  return r;
}

WittMatrix WittMatrix::block(int r0, int c0, int nr, int nc) const {
  WittMatrix r(*ring_, nr, nc);
  for (int i = 0; i < nr; ++i)
    for (int j = 0; j < nc; ++j) r(i, j) = (*this)(r0 + i, c0 + j);
  return r;
}

WittMatrix WittMatrix::change_precision(const WittRing& target) const {
  WittMatrix r(target, rows_, cols_);
  for (std::size_t i = 0; i < data_.size(); ++i) r.data_[i] = ring_->change_precision(data_[i], target);
  return r;
}

WittMatrix WittMatrix::divide_p_power(int v) const {
  WittMatrix r = *this;
  for (auto& x : r.data_) x = x.divide_p_power(v);
  return r;
}

Valuation WittMatrix::min_valuation() const {
  Valuation best = Valuation::infinite();
  for (const auto& x : data_) best = std::min(best, x.valuation());
  return best;
}

bool WittMatrix::is_zero() const {
  for (const auto& x : data_)
    if (!x.is_zero()) return false;
  return true;
}

bool operator==(const WittMatrix& a, const WittMatrix& b) {
  return a.ring_ == b.ring_ && a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
}

std::vector<WittElement> charpoly(const WittMatrix& m) {
  if (m.rows() != m.cols()) fail(ErrorKind::RankMismatch, "characteristic polynomial of a non-square matrix");
  const WittRing& R = m.ring();
  const int n = m.rows();
  if (n == 0) return {R.one()};
  // Coefficients high-to-low during the recursion.
  std::vector<WittElement> vect{R.one(), -m(0, 0)};
  for (int r = 1; r < n; ++r) {
    std::vector<WittElement> col(r + 2, R.zero());
    col[0] = R.one();
    col[1] = -m(r, r);
    std::vector<WittElement> v(r);
    for (int i = 0; i < r; ++i) v[i] = m(i, r);
    for (int k = 0; k < r; ++k) {
      WittElement dot = R.zero();
      for (int j = 0; j < r; ++j) dot += m(r, j) * v[j];
      col[2 + k] = -dot;
      if (k + 1 < r) {
        std::vector<WittElement> w(r, R.zero());
        for (int i = 0; i < r; ++i)
          for (int j = 0; j < r; ++j) w[i] += m(i, j) * v[j];
        v = std::move(w);
      }
    }
    std::vector<WittElement> next(r + 2, R.zero());
    for (int i = 0; i < r + 2; ++i)
      for (int j = 0; j <= std::min(i, r); ++j) next[i] += col[i - j] * vect[j];
    vect = std::move(next);
  }
  return std::vector<WittElement>(vect.rbegin(), vect.rend());
}

WittElement determinant(const WittMatrix& m) {
  auto c = charpoly(m);
  return (m.rows() % 2 == 0) ? c[0] : -c[0];
}

namespace {

void swap_rows(WittMatrix& a, int i, int j) {
  if (i == j) return;
  for (int k = 0; k < a.cols(); ++k) std::swap(a(i, k), a(j, k));
}

void swap_cols(WittMatrix& a, int i, int j) {
  if (i == j) return;
  for (int k = 0; k < a.rows(); ++k) std::swap(a(k, i), a(k, j));
}

// row_i -= f * row_t
void row_axpy(WittMatrix& a, int i, int t, const WittElement& f) {
  for (int k = 0; k < a.cols(); ++k)
    if (!a(t, k).is_zero()) a(i, k) -= f * a(t, k);
}

// col_j -= g * col_t
void col_axpy(WittMatrix& a, int j, int t, const WittElement& g) {
  for (int k = 0; k < a.rows(); ++k)
    if (!a(k, t).is_zero()) a(k, j) -= g * a(k, t);
}

}  // namespace

SmithForm smith_form(const WittMatrix& m, bool track) {
  const WittRing& R = m.ring();
  const int n = m.rows(), c = m.cols();
  WittMatrix a = m;
  SmithForm out;
  if (track) {
    out.left = WittMatrix::identity(R, n);
    out.left_inverse = WittMatrix::identity(R, n);
    out.right = WittMatrix::identity(R, c);
  }
  const int k = std::min(n, c);
  out.exponents.assign(k, Valuation::infinite());
  for (int t = 0; t < k; ++t) {
    int bi = -1, bj = -1;
    Valuation best = Valuation::infinite();
    for (int i = t; i < n; ++i)
      for (int j = t; j < c; ++j) {
        const Valuation v = a(i, j).valuation();
        if (v < best) {
          best = v;
          bi = i;
          bj = j;
        }
      }
    if (best.is_infinite()) break;
    swap_rows(a, t, bi);
    swap_cols(a, t, bj);
    if (track) {
      swap_rows(out.left, t, bi);
      swap_cols(out.left_inverse, t, bi);
      swap_cols(out.right, t, bj);
    }
    const int v = best.value();
    const WittElement unit = a(t, t).divide_p_power(v);
    const WittElement uinv = unit.inverse();
    for (int j = 0; j < c; ++j) a(t, j) = a(t, j) * uinv;
    if (track) {
      for (int j = 0; j < n; ++j) out.left(t, j) = out.left(t, j) * uinv;
      for (int i = 0; i < n; ++i) out.left_inverse(i, t) = out.left_inverse(i, t) * unit;
    }
    for (int i = t + 1; i < n; ++i) {
      if (a(i, t).is_zero()) continue;
      const WittElement f = a(i, t).divide_p_power(v);
      row_axpy(a, i, t, f);
      if (track) {
        row_axpy(out.left, i, t, f);
        // left_inverse <- left_inverse * (I + f e_i e_t^T): column t += f * column i.
        for (int r = 0; r < n; ++r)
          if (!out.left_inverse(r, i).is_zero()) out.left_inverse(r, t) += f * out.left_inverse(r, i);
      }
    }
    for (int j = t + 1; j < c; ++j) {
      if (a(t, j).is_zero()) continue;
      const WittElement g = a(t, j).divide_p_power(v);
      col_axpy(a, j, t, g);
      if (track) col_axpy(out.right, j, t, g);
    }
    out.exponents[t] = best;
  }
  return out;
}

WittMatrix inverse(const WittMatrix& m) {
  if (m.rows() != m.cols()) fail(ErrorKind::RankMismatch, "inverse of a non-square matrix");
  const WittRing& R = m.ring();
  const int n = m.rows();
  WittMatrix a = m, inv = WittMatrix::identity(R, n);
  for (int t = 0; t < n; ++t) {
    int piv = -1;
    for (int i = t; i < n && piv < 0; ++i)
      if (a(i, t).is_unit()) piv = i;
    if (piv < 0) fail(ErrorKind::PreconditionViolated, "matrix is not invertible over the Witt ring");
    swap_rows(a, t, piv);
    swap_rows(inv, t, piv);
    const WittElement u = a(t, t).inverse();
    for (int j = 0; j < n; ++j) {
      a(t, j) = a(t, j) * u;
      inv(t, j) = inv(t, j) * u;
    }
    for (int i = 0; i < n; ++i) {
      if (i == t || a(i, t).is_zero()) continue;
      const WittElement f = a(i, t);
      row_axpy(a, i, t, f);
      row_axpy(inv, i, t, f);
    }
  }
  return inv;
}

WittMatrix compound(const WittMatrix& m, int a) {
  const int r = m.rows();
  if (m.cols() != r) fail(ErrorKind::RankMismatch, "compound of a non-square matrix");
  if (a < 1 || a > r) fail(ErrorKind::BadIndex, "compound index out of range");
  std::vector<std::vector<int>> subsets;
  std::vector<int> idx(a);
  for (int i = 0; i < a; ++i) idx[i] = i;
  while (true) {
    subsets.push_back(idx);
    int k = a - 1;
    while (k >= 0 && idx[k] == r - a + k) --k;
    if (k < 0) break;
    ++idx[k];
    for (int j = k + 1; j < a; ++j) idx[j] = idx[j - 1] + 1;
  }
  const int N = static_cast<int>(subsets.size());
  WittMatrix out(m.ring(), N, N);
  WittMatrix minor(m.ring(), a, a);
  for (int I = 0; I < N; ++I)
    for (int J = 0; J < N; ++J) {
      for (int i = 0; i < a; ++i)
        for (int j = 0; j < a; ++j) minor(i, j) = m(subsets[I][i], subsets[J][j]);
      out(I, J) = determinant(minor);
    }
  return out;
}

// ---- FFMatrix ----

FFMatrix::FFMatrix(const FiniteField& field, int rows, int cols)
    : field_(&field), rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, field.zero()) {}

FFMatrix FFMatrix::operator*(const FFMatrix& o) const {
  if (field_ != o.field_) fail(ErrorKind::RingMismatch, "matrices over different fields");
  if (cols_ != o.rows_) fail(ErrorKind::RankMismatch, "matrix product shape mismatch");
  FFMatrix r(*field_, rows_, o.cols_);
  for (int i = 0; i < rows_; ++i)
    for (int k = 0; k < cols_; ++k) {
      const FFElem& a = (*this)(i, k);
      if (a.is_zero()) continue;
      for (int j = 0; j < o.cols_; ++j) r(i, j) += a * o(k, j);
    }
  return r;
}

FFMatrix FFMatrix::frobenius(u64 k) const {
  FFMatrix r = *this;
  for (auto& x : r.data_) x = cstrata::frobenius(x, k);
  return r;
}

bool operator==(const FFMatrix& a, const FFMatrix& b) {
  return a.field_ == b.field_ && a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
}

int rank(const FFMatrix& m) {
  FFMatrix a = m;
  int rk = 0;
  for (int col = 0; col < a.cols() && rk < a.rows(); ++col) {
    int piv = -1;
    for (int i = rk; i < a.rows(); ++i)
      if (!a(i, col).is_zero()) {
        piv = i;
        break;
      }
    if (piv < 0) continue;
    for (int j = 0; j < a.cols(); ++j) std::swap(a(rk, j), a(piv, j));
    const FFElem inv = a(rk, col).inverse();
    for (int i = rk + 1; i < a.rows(); ++i) {
      if (a(i, col).is_zero()) continue;
      const FFElem f = a(i, col) * inv;
      for (int j = col; j < a.cols(); ++j) a(i, j) -= f * a(rk, j);
    }
    ++rk;
  }
  return rk;
}

FFMatrix reduce_mod_p(const WittMatrix& m) {
  const WittRing& R = m.ring();
  FFMatrix r(*R.field(), m.rows(), m.cols());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) r(i, j) = R.reduce(m(i, j));
  return r;
}

AffineSolution solve_affine_mod_p(ModMatrix a, std::vector<u64> rhs) {
  const auto& md = a.mod();
  const u64 p = md.value();
  int rk = 0;
  for (int col = 0; col < a.cols() && rk < a.rows(); ++col) {
    int piv = -1;
    for (int i = rk; i < a.rows(); ++i)
      if (a(i, col) != 0) {
        piv = i;
        break;
      }
    if (piv < 0) continue;
    if (piv != rk) {
      for (int j = 0; j < a.cols(); ++j) std::swap(a(rk, j), a(piv, j));
      std::swap(rhs[rk], rhs[piv]);
    }
    const u64 inv = md.pow(a(rk, col), p - 2);
    for (int i = rk + 1; i < a.rows(); ++i) {
      if (a(i, col) == 0) continue;
      const u64 f = md.mul(a(i, col), inv);
      for (int j = col; j < a.cols(); ++j) a(i, j) = md.sub(a(i, j), md.mul(f, a(rk, j)));
      rhs[i] = md.sub(rhs[i], md.mul(f, rhs[rk]));
    }
    ++rk;
  }
  AffineSolution out;
  out.consistent = true;
  for (int i = rk; i < a.rows(); ++i)
    if (rhs[i] != 0) out.consistent = false;
  out.kernel_dim = a.cols() - rk;
  return out;
}

}  // namespace cstrata
