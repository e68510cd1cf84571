#pragma once

#include <cstddef>
#include <vector>

#include "conecert/exact/rational.hpp"

namespace conecert::exact {

/// Solves M x = rhs exactly. Throws Errc::SingularMatrix when no nonzero pivot
/// exists in some column.
RationalVector solve(const RationalMatrix& m, const RationalVector& rhs);

/// Column-by-column solve against one elimination of M.
RationalMatrix solve(const RationalMatrix& m, const RationalMatrix& rhs);

enum class PsdClass { PositiveDefinite, PositiveSemidefinite, NotPSD };

const char* to_string(PsdClass c) noexcept;

/// Rational LDLᵀ with symmetric pivoting on the largest-magnitude diagonal.
/// A zero remaining diagonal with a nonzero off-diagonal entry decides NotPSD.
PsdClass psd_check(const RationalMatrix& m);

/// PᵀMP = L·D·Lᵀ with L unit lower triangular and D block diagonal: `d` holds
/// the diagonal, `offdiag[k]` the (k, k+1) entry of a 2×2 pivot block (zero
/// for 1×1 pivots). `perm[i]` is the original index placed at position i.
struct LdltFactors {
  RationalMatrix l;
  RationalVector d;
  RationalVector offdiag;
  std::vector<std::size_t> perm;

  RationalMatrix block_diagonal() const;
  /// L·D·Lᵀ, to compare against PᵀMP.
  RationalMatrix reassemble() const;
  /// PᵀMP for the original matrix.
  RationalMatrix permuted(const RationalMatrix& m) const;
};

LdltFactors ldlt(const RationalMatrix& m);

std::size_t rank(const RationalMatrix& m);

/// Indices of a maximal set of linearly independent rows, chosen greedily in
/// row order.
std::vector<std::size_t> independent_rows(const RationalMatrix& m);

}  // namespace conecert::exact
