#include "conecert/exact/rational.hpp"

#include <cctype>
#include <cmath>
#include <string>

#include "conecert/error.hpp"

namespace conecert::exact {

Rational make_rational(long p, long q) {
  if (q == 0) throw Error(Errc::ParseError, "zero denominator");
  Rational r(p, q);
  r.canonicalize();
  return r;
}

std::string to_string(const Rational& r) {
  if (r.get_den() == 1) return r.get_num().get_str();
  return r.get_num().get_str() + "/" + r.get_den().get_str();
}

namespace {

Rational parse_decimal(std::string_view text) {
  std::string s(text);
  std::size_t epos = s.find_first_of("eE");
  long exponent = 0;
  if (epos != std::string::npos) {
    try {
      std::size_t used = 0;
      exponent = std::stol(s.substr(epos + 1), &used);
      if (used != s.size() - epos - 1) throw std::invalid_argument("exponent");
    } catch (const std::exception&) {
      throw Error(Errc::ParseError, "bad exponent in '" + s + "'");
    }
    s.resize(epos);
  }
  bool negative = false;
  std::size_t pos = 0;
  if (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) {
    negative = s[pos] == '-';
    ++pos;
  }
  std::string digits;
  long frac_digits = 0;
  bool seen_point = false;
  for (; pos < s.size(); ++pos) {
    char c = s[pos];
    if (c == '.' && !seen_point) {
      seen_point = true;
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      digits.push_back(c);
      if (seen_point) ++frac_digits;
    } else {
      throw Error(Errc::ParseError, "bad number '" + std::string(text) + "'");
    }
  }
  if (digits.empty()) throw Error(Errc::ParseError, "bad number '" + std::string(text) + "'");
  mpz_class mantissa(digits, 10);
  long shift = exponent - frac_digits;
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(std::labs(shift)));
  Rational r = shift >= 0 ? Rational(mantissa * scale) : Rational(mantissa, scale);
  r.canonicalize();
  return negative ? Rational(-r) : r;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::size_t first = 0;
  std::size_t last = text.size();
  while (first < last && std::isspace(static_cast<unsigned char>(text[first]))) ++first;
  while (last > first && std::isspace(static_cast<unsigned char>(text[last - 1]))) --last;
  text = text.substr(first, last - first);
  if (text.empty()) throw Error(Errc::ParseError, "empty number");

  std::size_t slash = text.find('/');
  if (slash == std::string_view::npos) return parse_decimal(text);

  Rational num = parse_decimal(text.substr(0, slash));
  Rational den = parse_decimal(text.substr(slash + 1));
  if (den == 0) throw Error(Errc::ParseError, "zero denominator in '" + std::string(text) + "'");
  return num / den;
}

Rational from_double(double x) {
  if (!std::isfinite(x)) throw Error(Errc::ParseError, "non-finite value cannot be made rational");
  return Rational(x);
}

Rational snap(double x, const mpz_class& max_denominator) {
  Rational exact = from_double(x);
  if (exact.get_den() <= max_denominator) return exact;
  const bool negative = exact < 0;
  mpz_class n = abs(exact.get_num());
  mpz_class d = exact.get_den();

  mpz_class p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  while (true) {
    mpz_class a;
    mpz_fdiv_q(a.get_mpz_t(), n.get_mpz_t(), d.get_mpz_t());
    mpz_class q2 = q0 + a * q1;
    if (q2 > max_denominator) break;
    mpz_class p2 = p0 + a * p1;
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
    mpz_class rem = n - a * d;
    n = d;
    d = rem;
    if (d == 0) break;
  }
  Rational best(p1, q1);
  if (d != 0) {
    mpz_class k;
    mpz_class top = max_denominator - q0;
    mpz_fdiv_q(k.get_mpz_t(), top.get_mpz_t(), q1.get_mpz_t());
    Rational semi(p0 + k * p1, q0 + k * q1);
    semi.canonicalize();
    Rational target = abs(exact);
    if (abs(semi - target) < abs(best - target)) best = semi;
  }
  best.canonicalize();
  return negative ? Rational(-best) : best;
}

double to_double(const Rational& r) { return r.get_d(); }

RationalVector from_doubles(const std::vector<double>& xs) {
  RationalVector out;
  out.reserve(xs.size());
  for (double x : xs) out.push_back(from_double(x));
  return out;
}

RationalVector snap_all(const std::vector<double>& xs, const mpz_class& max_denominator) {
  RationalVector out;
  out.reserve(xs.size());
  for (double x : xs) out.push_back(snap(x, max_denominator));
  return out;
}

std::vector<double> to_doubles(const RationalVector& xs) {
  std::vector<double> out;
  out.reserve(xs.size());
  for (const auto& x : xs) out.push_back(x.get_d());
  return out;
}

Rational dot(const RationalVector& a, const RationalVector& b) {
  if (a.size() != b.size()) throw Error(Errc::DimensionMismatch, "rational dot product");
  Rational s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

RationalMatrix::RationalMatrix(std::initializer_list<std::initializer_list<Rational>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& row : rows) {
    if (row.size() != cols_) throw Error(Errc::DimensionMismatch, "ragged matrix literal");
    data_.insert(data_.end(), row.begin(), row.end());
  }
}

RationalMatrix RationalMatrix::identity(std::size_t n) {
  RationalMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

RationalMatrix RationalMatrix::transpose() const {
  RationalMatrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

bool RationalMatrix::is_symmetric() const {
  if (rows_ != cols_) return false;
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = i + 1; j < cols_; ++j)
      if ((*this)(i, j) != (*this)(j, i)) return false;
  return true;
}

RationalVector RationalMatrix::operator*(const RationalVector& v) const {
  if (v.size() != cols_) throw Error(Errc::DimensionMismatch, "matrix-vector product");
  RationalVector out(rows_);
  for (std::size_t i = 0; i < rows_; ++i) {
    Rational s = 0;
    for (std::size_t j = 0; j < cols_; ++j) {
      const Rational& a = (*this)(i, j);
      if (sgn(a) != 0 && sgn(v[j]) != 0) s += a * v[j];
    }
    out[i] = s;
  }
  return out;
}

RationalMatrix RationalMatrix::operator*(const RationalMatrix& other) const {
  if (cols_ != other.rows_) throw Error(Errc::DimensionMismatch, "matrix product");
  RationalMatrix out(rows_, other.cols_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t k = 0; k < cols_; ++k) {
      const Rational& a = (*this)(i, k);
      if (sgn(a) == 0) continue;
      for (std::size_t j = 0; j < other.cols_; ++j) {
        const Rational& b = other(k, j);
        if (sgn(b) != 0) out(i, j) += a * b;
      }
    }
  return out;
}

RationalMatrix RationalMatrix::operator+(const RationalMatrix& other) const {
  if (rows_ != other.rows_ || cols_ != other.cols_) throw Error(Errc::DimensionMismatch, "matrix sum");
  RationalMatrix out = *this;
  for (std::size_t k = 0; k < data_.size(); ++k) out.data_[k] += other.data_[k];
  return out;
}

RationalMatrix RationalMatrix::operator-(const RationalMatrix& other) const {
  if (rows_ != other.rows_ || cols_ != other.cols_) throw Error(Errc::DimensionMismatch, "matrix difference");
  RationalMatrix out = *this;
  for (std::size_t k = 0; k < data_.size(); ++k) out.data_[k] -= other.data_[k];
  return out;
}

}  // namespace conecert::exact
