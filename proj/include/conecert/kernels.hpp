#pragma once

#include <cstddef>
#include <vector>

#include "conecert/linalg.hpp"

namespace conecert::kernels {

/// Thread budget: omp_get_max_threads(), capped by CONECERT_THREADS when set.
int max_threads();

/// One nonzero of a symmetric basis matrix. Both (i,j) and (j,i) are listed
/// for off-diagonal entries.
template <class Scalar>
struct BasisEntry {
  std::size_t i;
  std::size_t j;
  Scalar v;
};

template <class Scalar>
using SymBasis = std::vector<std::vector<BasisEntry<Scalar>>>;

/// Λ(y) = Σ y_p Λ_p.
template <class Scalar, class MatT, class VecT>
void assemble(const SymBasis<Scalar>& basis, const VecT& y, MatT& out) {
  for (std::size_t p = 0; p < basis.size(); ++p)
    for (const auto& e : basis[p]) out(e.i, e.j) += e.v * y[p];
}

/// g_p = −tr(T Λ_p) with T = Λ(y)⁻¹.
template <class Scalar, class MatT, class VecT>
void logdet_gradient(const SymBasis<Scalar>& basis, const MatT& t, VecT& g) {
  for (std::size_t p = 0; p < basis.size(); ++p) {
    Scalar s = 0;
    for (const auto& e : basis[p]) s += e.v * t(e.j, e.i);
    g[p] = -s;
  }
}

/// H_pq = tr(T Λ_p T Λ_q), straight double sum over basis entries.
template <class Scalar, class MatT, class OutT>
void logdet_hessian_serial(const SymBasis<Scalar>& basis, const MatT& t, OutT& h) {
  const std::size_t n = basis.size();
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = p; q < n; ++q) {
      Scalar s = 0;
      for (const auto& a : basis[p])
        for (const auto& b : basis[q]) s += a.v * b.v * t(a.j, b.i) * t(b.j, a.i);
      h(p, q) = s;
      h(q, p) = s;
    }
}

/// Same result, rows distributed over OpenMP threads (double only).
void logdet_hessian(const SymBasis<double>& basis, const Mat& t, Mat& h);

/// A·H·Aᵀ.
Mat congruence_serial(const Mat& a, const Mat& h);
Mat congruence(const Mat& a, const Mat& h);

}  // namespace conecert::kernels
