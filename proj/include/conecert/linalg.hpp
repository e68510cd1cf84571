#pragma once

#include <Eigen/Dense>

#include "conecert/exact/rational.hpp"

namespace conecert {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

Mat to_eigen(const exact::RationalMatrix& m);
Vec to_eigen(const exact::RationalVector& v);
exact::RationalMatrix to_rational(const Mat& m);
exact::RationalVector to_rational(const Vec& v);

/// Continued-fraction snapping of every entry.
exact::RationalVector snap(const Vec& v, const mpz_class& max_denominator);
exact::RationalMatrix snap(const Mat& m, const mpz_class& max_denominator);

/// Singular-value rank with threshold tol·σ_max.
Eigen::Index numeric_rank(const Mat& m, double rel_tol = 1e-10);

}  // namespace conecert
