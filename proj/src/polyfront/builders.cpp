#include <algorithm>
#include <cmath>
#include <set>

#include "conecert/error.hpp"
#include "conecert/polyfront.hpp"

namespace conecert {

namespace {

Exponent add(const Exponent& a, const Exponent& b) {
  Exponent e(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) e[i] = a[i] + b[i];
  return e;
}

unsigned resolve_half_degree(const PolySpec& p, unsigned d) {
  if (d == 0) d = (p.degree() + 1) / 2;
  if (p.degree() > 2 * d)
    throw Error(Errc::DegreeMismatch, "degree " + std::to_string(p.degree()) + " exceeds 2d = " + std::to_string(2 * d));
  return d;
}

std::size_t row_of(const std::vector<Exponent>& rows, const Exponent& e) {
  auto it = std::lower_bound(rows.begin(), rows.end(), e, GradedLess{});
  if (it == rows.end() || *it != e) throw Error(Errc::DegreeMismatch, "monomial outside the row basis");
  return static_cast<std::size_t>(it - rows.begin());
}

void finish(PolyCone& pc, const PolySpec& p, OraclePtr base, exact::RationalMatrix a) {
  pc.nvars = p.nvars();
  pc.b_exact.assign(pc.rows.size(), exact::Rational(0));
  for (const auto& [e, c] : p.terms()) pc.b_exact[row_of(pc.rows, e)] = c;
  pc.w_exact.assign(pc.rows.size(), exact::Rational(0));
  pc.w_exact[row_of(pc.rows, Exponent(p.nvars(), 0))] = 1;
  pc.b = to_eigen(pc.b_exact);
  pc.w = to_eigen(pc.w_exact);
  pc.cone = std::make_shared<ImageCone>(std::move(base), std::move(a));
}

// Gram-map contribution of X_ij (i ≤ j): one on the diagonal, two off it.
struct GramMap {
  std::vector<Exponent> basis;
  std::vector<Exponent> rows;

  GramMap(const PolySpec& p, unsigned half_degree) {
    const unsigned d = resolve_half_degree(p, half_degree);
    basis = monomials_up_to(p.nvars(), d);
    rows = monomials_up_to(p.nvars(), 2 * d);
  }

  std::size_t m() const { return basis.size(); }

  void accumulate(exact::RationalMatrix& a, std::size_t col, std::size_t i, std::size_t j,
                  const exact::Rational& v) const {
    a(row_of(rows, add(basis[i], basis[j])), col) += i == j ? v : exact::Rational(2 * v);
  }
};

}  // namespace

PolyCone build_sos(const PolySpec& p, unsigned half_degree) {
  GramMap g(p, half_degree);
  const std::size_t m = g.m();
  exact::RationalMatrix a(g.rows.size(), packed_dim(m));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i; j < m; ++j) g.accumulate(a, packed_index(i, j, m), i, j, 1);
  PolyCone pc;
  pc.method = PolyMethod::SOS;
  pc.basis = g.basis;
  pc.rows = g.rows;
  finish(pc, p, psd_packed_oracle(m), std::move(a));
  return pc;
}

PolyCone build_dsos(const PolySpec& p, unsigned half_degree) {
  GramMap g(p, half_degree);
  const std::size_t m = g.m();
  exact::RationalMatrix a(g.rows.size(), m * m);
  PolyCone pc;
  std::size_t col = 0;
  for (std::size_t i = 0; i < m; ++i) g.accumulate(a, col++, i, i, 1);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j)
      for (int s : {1, -1}) {
        g.accumulate(a, col, i, i, 1);
        g.accumulate(a, col, j, j, 1);
        g.accumulate(a, col, i, j, s);
        ++col;
        pc.pairs.emplace_back(i, j);
      }
  pc.method = PolyMethod::DSOS;
  pc.basis = g.basis;
  pc.rows = g.rows;
  finish(pc, p, orthant_oracle(m * m), std::move(a));
  return pc;
}

PolyCone build_sdsos(const PolySpec& p, unsigned half_degree) {
  GramMap g(p, half_degree);
  const std::size_t m = g.m();
  if (m < 2) throw Error(Errc::DegreeMismatch, "SDSOS needs at least two basis monomials");
  const std::size_t npairs = m * (m - 1) / 2;
  exact::RationalMatrix a(g.rows.size(), 3 * npairs);
  PolyCone pc;
  std::vector<OraclePtr> parts;
  std::size_t col = 0;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j) {
      g.accumulate(a, col, i, i, 1);
      g.accumulate(a, col + 1, i, j, 1);
      g.accumulate(a, col + 2, j, j, 1);
      col += 3;
      pc.pairs.emplace_back(i, j);
      parts.push_back(psd_packed_oracle(2));
    }
  pc.method = PolyMethod::SDSOS;
  pc.basis = g.basis;
  pc.rows = g.rows;
  finish(pc, p, parts.size() == 1 ? parts.front() : product_oracle(std::move(parts)), std::move(a));
  return pc;
}

PolyCone build_sonc(const PolySpec& p, bool cover_negative_even) {
  const Exponent zero(p.nvars(), 0);
  std::vector<Exponent> support = p.support();
  if (std::find(support.begin(), support.end(), zero) == support.end()) support.push_back(zero);
  std::sort(support.begin(), support.end(), GradedLess{});

  std::vector<Exponent> extra;
  if (cover_negative_even)
    for (const auto& [e, c] : p.terms())
      if (is_even(e) && sgn(c) < 0) extra.push_back(e);
  CircuitCover cover = enumerate_circuits(support, extra);
  for (const auto& u : cover.uncovered) {
    if (is_even(u)) continue;
    std::string s;
    for (unsigned k : u) s += (s.empty() ? "" : ",") + std::to_string(k);
    throw Error(Errc::UncoverableTerm, "no circuit covers the exponent (" + s + ")");
  }

  PolyCone pc;
  pc.method = PolyMethod::SONC;
  pc.rows = support;
  std::size_t ncols = cover.squares.size();
  for (const auto& c : cover.circuits) ncols += c.outer.size() + 1;
  exact::RationalMatrix a(support.size(), ncols);
  std::vector<OraclePtr> parts;
  std::size_t col = 0;
  for (const auto& c : cover.circuits) {
    for (const auto& o : c.outer) a(row_of(support, o), col++) = 1;
    a(row_of(support, c.inner), col++) = 1;
    parts.push_back(powercone_oracle(c.lambda));
  }
  for (const auto& s : cover.squares) a(row_of(support, s), col++) = 1;
  parts.push_back(orthant_oracle(cover.squares.size()));
  pc.circuits = std::move(cover.circuits);
  pc.squares = std::move(cover.squares);
  finish(pc, p, parts.size() == 1 ? parts.front() : product_oracle(std::move(parts)), std::move(a));
  return pc;
}

PolyCone build_odd_ag(const PolySpec& p, std::optional<Exponent> beta) {
  const std::size_t n = p.nvars();
  const Exponent zero(n, 0);
  std::vector<Exponent> support;
  exact::Rational d = 0;
  std::optional<Exponent> odd;
  for (const auto& [e, c] : p.terms()) {
    if (is_even(e)) {
      if (sgn(c) < 0) throw Error(Errc::UnsupportedShape, "odd AG functions need nonnegative even coefficients");
      support.push_back(e);
    } else {
      if (odd) throw Error(Errc::UnsupportedShape, "more than one odd term; split the polynomial first");
      odd = e;
      d = c;
    }
  }
  if (odd && beta && *odd != *beta) throw Error(Errc::UnsupportedShape, "given odd exponent does not match the polynomial");
  if (!odd && !beta) throw Error(Errc::UnsupportedShape, "no odd term and no odd exponent given");
  const Exponent b_exp = odd ? *odd : *beta;
  if (b_exp.size() != n || is_even(b_exp)) throw Error(Errc::UnsupportedShape, "the AG exponent must be non-even");
  if (std::find(support.begin(), support.end(), zero) == support.end()) support.push_back(zero);
  std::sort(support.begin(), support.end(), GradedLess{});
  const std::size_t m = support.size();

  // Columns per copy k: U_k, V_k (coefficient slot, scaled by e), W_k (ν).
  const std::size_t copy = 2 * m + 1, ncols = 2 * copy;
  auto col_u = [&](std::size_t k) { return k * copy; };
  auto col_v = [&](std::size_t k, std::size_t i) { return k * copy + 1 + i; };
  auto col_w = [&](std::size_t k, std::size_t i) { return k * copy + 1 + m + i; };

  exact::RationalMatrix balance(n, m);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < m; ++i)
      balance(k, i) = exact::Rational(support[i][k]) - exact::Rational(b_exp[k]);
  std::vector<std::size_t> bal_rows = exact::independent_rows(balance);

  const std::size_t nrows = 2 + 3 * m + bal_rows.size();
  exact::RationalMatrix a(nrows, ncols);
  std::size_t r = 0;
  a(r++, col_u(0)) = 1;  // U₁ = d
  a(r, col_u(0)) = 1;    // U₁ + U₂ = 0
  a(r++, col_u(1)) = 1;
  const std::size_t coeff_row = r;
  for (std::size_t i = 0; i < m; ++i) a(r++, col_v(0, i)) = 1;  // V₁ = c
  for (std::size_t i = 0; i < m; ++i) {
    a(r, col_v(0, i)) = 1;
    a(r++, col_v(1, i)) = -1;
  }
  for (std::size_t i = 0; i < m; ++i) {
    a(r, col_w(0, i)) = 1;
    a(r++, col_w(1, i)) = -1;
  }
  for (std::size_t k : bal_rows) {
    for (std::size_t i = 0; i < m; ++i) a(r, col_w(0, i)) = balance(k, i);
    ++r;
  }

  Vec scale = Vec::Ones(static_cast<Eigen::Index>(ncols));
  for (std::size_t k = 0; k < 2; ++k)
    for (std::size_t i = 0; i < m; ++i) scale(static_cast<Eigen::Index>(col_v(k, i))) = std::exp(1.0);
  OraclePtr base = scaled_oracle(product_oracle({relentropy_dual_oracle(m), relentropy_dual_oracle(m)}), scale);

  PolyCone pc;
  pc.method = PolyMethod::AG;
  pc.nvars = n;
  pc.ag_support = support;
  pc.ag_beta = b_exp;
  pc.b_exact.assign(nrows, exact::Rational(0));
  pc.b_exact[0] = d;
  for (std::size_t i = 0; i < m; ++i) pc.b_exact[coeff_row + i] = p.coeff(support[i]);
  pc.w_exact.assign(nrows, exact::Rational(0));
  pc.w_exact[coeff_row + static_cast<std::size_t>(std::find(support.begin(), support.end(), zero) - support.begin())] = 1;
  pc.b = to_eigen(pc.b_exact);
  pc.w = to_eigen(pc.w_exact);
  pc.cone = std::make_shared<ImageCone>(std::move(base), std::move(a));
  return pc;
}

PolyCone build_poly_cone(const PolySpec& p, PolyMethod method, unsigned half_degree) {
  switch (method) {
    case PolyMethod::SOS: return build_sos(p, half_degree);
    case PolyMethod::SONC: return build_sonc(p);
    case PolyMethod::DSOS: return build_dsos(p, half_degree);
    case PolyMethod::SDSOS: return build_sdsos(p, half_degree);
    case PolyMethod::AG: return build_odd_ag(p);
  }
  throw Error(Errc::ConfigError, "unknown method");
}

}  // namespace conecert
