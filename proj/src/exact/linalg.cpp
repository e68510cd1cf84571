#include "conecert/exact/linalg.hpp"

#include <utility>

#include "conecert/error.hpp"

namespace conecert::exact {

namespace {

void check_square(const RationalMatrix& m, const char* what) {
  if (m.rows() != m.cols()) throw Error(Errc::DimensionMismatch, std::string(what) + ": matrix is not square");
}

void symmetric_swap(RationalMatrix& w, std::size_t p, std::size_t q) {
  if (p == q) return;
  const std::size_t n = w.rows();
  for (std::size_t c = 0; c < n; ++c) std::swap(w(p, c), w(q, c));
  for (std::size_t r = 0; r < n; ++r) std::swap(w(r, p), w(r, q));
}

// Reduces `row` against the echelon rows in `basis` (each with its pivot column).
// Returns true if something nonzero remains.
bool reduce_row(std::vector<Rational>& row, const std::vector<std::pair<std::size_t, std::vector<Rational>>>& basis) {
  for (const auto& [pivot, b] : basis) {
    if (sgn(row[pivot]) == 0) continue;
    Rational f = row[pivot] / b[pivot];
    for (std::size_t c = 0; c < row.size(); ++c)
      if (sgn(b[c]) != 0) row[c] -= f * b[c];
  }
  for (const auto& v : row)
    if (sgn(v) != 0) return true;
  return false;
}

}  // namespace

RationalMatrix solve(const RationalMatrix& m, const RationalMatrix& rhs) {
  check_square(m, "solve");
  if (rhs.rows() != m.rows()) throw Error(Errc::DimensionMismatch, "solve: right-hand side rows");
  const std::size_t n = m.rows();
  const std::size_t k = rhs.cols();
  RationalMatrix a = m;
  RationalMatrix b = rhs;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    while (piv < n && sgn(a(piv, col)) == 0) ++piv;
    if (piv == n) throw Error(Errc::SingularMatrix, "no pivot in column " + std::to_string(col));
    if (piv != col) {
      for (std::size_t c = 0; c < n; ++c) std::swap(a(piv, c), a(col, c));
      for (std::size_t c = 0; c < k; ++c) std::swap(b(piv, c), b(col, c));
    }
    Rational inv = 1 / a(col, col);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || sgn(a(r, col)) == 0) continue;
      Rational f = a(r, col) * inv;
      for (std::size_t c = col; c < n; ++c)
        if (sgn(a(col, c)) != 0) a(r, c) -= f * a(col, c);
      for (std::size_t c = 0; c < k; ++c)
        if (sgn(b(col, c)) != 0) b(r, c) -= f * b(col, c);
    }
  }
  for (std::size_t r = 0; r < n; ++r) {
    Rational inv = 1 / a(r, r);
    for (std::size_t c = 0; c < k; ++c) b(r, c) *= inv;
  }
  return b;
}

RationalVector solve(const RationalMatrix& m, const RationalVector& rhs) {
  RationalMatrix b(rhs.size(), 1);
  for (std::size_t i = 0; i < rhs.size(); ++i) b(i, 0) = rhs[i];
  RationalMatrix x = solve(m, b);
  RationalVector out(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) out[i] = x(i, 0);
  return out;
}

const char* to_string(PsdClass c) noexcept {
  switch (c) {
    case PsdClass::PositiveDefinite: return "PositiveDefinite";
    case PsdClass::PositiveSemidefinite: return "PositiveSemidefinite";
    case PsdClass::NotPSD: return "NotPSD";
  }
  return "Unknown";
}

LdltFactors ldlt(const RationalMatrix& m) {
  check_square(m, "ldlt");
  if (!m.is_symmetric()) throw Error(Errc::NotSymmetric, "ldlt needs a symmetric matrix");
  const std::size_t n = m.rows();
  RationalMatrix w = m;
  LdltFactors f{RationalMatrix::identity(n), RationalVector(n), RationalVector(n), {}};
  f.perm.resize(n);
  for (std::size_t i = 0; i < n; ++i) f.perm[i] = i;

  auto bring_to = [&](std::size_t from, std::size_t to) {
    if (from == to) return;
    symmetric_swap(w, from, to);
    for (std::size_t c = 0; c < to; ++c) std::swap(f.l(from, c), f.l(to, c));
    std::swap(f.perm[from], f.perm[to]);
  };

  std::size_t k = 0;
  while (k < n) {
    std::size_t best = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (abs(w(i, i)) > abs(w(best, best))) best = i;

    if (sgn(w(best, best)) != 0) {
      bring_to(best, k);
      const Rational dk = w(k, k);
      f.d[k] = dk;
      for (std::size_t i = k + 1; i < n; ++i) f.l(i, k) = w(i, k) / dk;
      for (std::size_t i = k + 1; i < n; ++i) {
        if (sgn(w(i, k)) == 0) continue;
        for (std::size_t j = k + 1; j < n; ++j)
          if (sgn(w(k, j)) != 0) w(i, j) -= f.l(i, k) * w(k, j);
      }
      ++k;
      continue;
    }

    std::size_t pi = n, pj = n;
    for (std::size_t i = k; i < n && pi == n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (sgn(w(i, j)) != 0) {
          pi = i;
          pj = j;
          break;
        }
    if (pi == n) break;  // trailing block is zero

    bring_to(pi, k);
    if (pj == k) pj = pi;
    bring_to(pj, k + 1);
    const Rational a = w(k, k + 1);
    f.offdiag[k] = a;
    for (std::size_t i = k + 2; i < n; ++i) {
      f.l(i, k) = w(i, k + 1) / a;
      f.l(i, k + 1) = w(i, k) / a;
    }
    for (std::size_t i = k + 2; i < n; ++i)
      for (std::size_t j = k + 2; j < n; ++j) {
        Rational t = w(i, k) * w(j, k + 1) + w(i, k + 1) * w(j, k);
        if (sgn(t) != 0) w(i, j) -= t / a;
      }
    k += 2;
  }
  return f;
}

RationalMatrix LdltFactors::block_diagonal() const {
  const std::size_t n = d.size();
  RationalMatrix b(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    b(i, i) = d[i];
    if (i + 1 < n && sgn(offdiag[i]) != 0) {
      b(i, i + 1) = offdiag[i];
      b(i + 1, i) = offdiag[i];
    }
  }
  return b;
}

RationalMatrix LdltFactors::reassemble() const { return l * block_diagonal() * l.transpose(); }

RationalMatrix LdltFactors::permuted(const RationalMatrix& m) const {
  const std::size_t n = perm.size();
  RationalMatrix p(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) p(i, j) = m(perm[i], perm[j]);
  return p;
}

PsdClass psd_check(const RationalMatrix& m) {
  LdltFactors f = ldlt(m);
  bool definite = true;
  for (std::size_t i = 0; i < f.d.size(); ++i) {
    if (sgn(f.offdiag[i]) != 0 || sgn(f.d[i]) < 0) return PsdClass::NotPSD;
    if (sgn(f.d[i]) == 0) definite = false;
  }
  return definite ? PsdClass::PositiveDefinite : PsdClass::PositiveSemidefinite;
}

std::vector<std::size_t> independent_rows(const RationalMatrix& m) {
  std::vector<std::pair<std::size_t, std::vector<Rational>>> basis;
  std::vector<std::size_t> keep;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    std::vector<Rational> row(m.cols());
    for (std::size_t c = 0; c < m.cols(); ++c) row[c] = m(r, c);
    if (!reduce_row(row, basis)) continue;
    std::size_t pivot = 0;
    while (sgn(row[pivot]) == 0) ++pivot;
    basis.emplace_back(pivot, std::move(row));
    keep.push_back(r);
  }
  return keep;
}

std::size_t rank(const RationalMatrix& m) { return independent_rows(m).size(); }

}  // namespace conecert::exact
