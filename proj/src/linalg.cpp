#include "conecert/linalg.hpp"

#include <Eigen/SVD>

namespace conecert {

Mat to_eigen(const exact::RationalMatrix& m) {
  Mat out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = m(i, j).get_d();
  return out;
}

Vec to_eigen(const exact::RationalVector& v) {
  Vec out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out(i) = v[i].get_d();
  return out;
}

exact::RationalMatrix to_rational(const Mat& m) {
  exact::RationalMatrix out(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out(i, j) = exact::from_double(m(i, j));
  return out;
}

exact::RationalVector to_rational(const Vec& v) {
  exact::RationalVector out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) out[i] = exact::from_double(v(i));
  return out;
}

exact::RationalVector snap(const Vec& v, const mpz_class& max_denominator) {
  exact::RationalVector out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) out[i] = exact::snap(v(i), max_denominator);
  return out;
}

exact::RationalMatrix snap(const Mat& m, const mpz_class& max_denominator) {
  exact::RationalMatrix out(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out(i, j) = exact::snap(m(i, j), max_denominator);
  return out;
}

Eigen::Index numeric_rank(const Mat& m, double rel_tol) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Mat> svd(m);
  const Vec& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > rel_tol * s(0)) ++r;
  return r;
}

}  // namespace conecert
