#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

namespace conecert::exact {

/// Arbitrary-precision rational. GMP keeps every result in canonical form
/// (gcd(|p|, q) = 1, q > 0), so no explicit normalisation step is needed.
using Rational = mpq_class;
using RationalVector = std::vector<Rational>;

/// p/q in canonical form. mpq_class(p, q) alone does not reduce.
Rational make_rational(long p, long q = 1);

/// "p/q", or "p" when q = 1.
std::string to_string(const Rational& r);

/// Accepts "p/q", integers, and decimals with an optional exponent
/// ("-1.25", "3e-4"). Decimals are converted exactly.
Rational parse_rational(std::string_view text);

/// Exact value of a finite double.
Rational from_double(double x);

/// Best rational approximation with denominator at most `max_denominator`
/// (continued-fraction convergents and semiconvergents).
Rational snap(double x, const mpz_class& max_denominator);

double to_double(const Rational& r);

RationalVector from_doubles(const std::vector<double>& xs);
RationalVector snap_all(const std::vector<double>& xs, const mpz_class& max_denominator);
std::vector<double> to_doubles(const RationalVector& xs);

Rational dot(const RationalVector& a, const RationalVector& b);

/// Dense row-major rational matrix.
class RationalMatrix {
 public:
  RationalMatrix() = default;
  RationalMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
  RationalMatrix(std::initializer_list<std::initializer_list<Rational>> rows);

  static RationalMatrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  Rational& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const Rational& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  const std::vector<Rational>& data() const noexcept { return data_; }

  RationalMatrix transpose() const;
  bool is_symmetric() const;

  RationalVector operator*(const RationalVector& v) const;
  RationalMatrix operator*(const RationalMatrix& other) const;
  RationalMatrix operator+(const RationalMatrix& other) const;
  RationalMatrix operator-(const RationalMatrix& other) const;

  friend bool operator==(const RationalMatrix& a, const RationalMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Rational> data_;
};

}  // namespace conecert::exact
