#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "conecert/error.hpp"
#include "conecert/polyfront.hpp"

using namespace conecert;
using exact::make_rational;
using exact::Rational;
using exact::RationalMatrix;
using exact::RationalVector;

namespace {

Rational q(long p, long d = 1) { return make_rational(p, d); }

const char* kMotzkin = "x^4*y^2 + x^2*y^4 - 3*x^2*y^2 + 1";

template <class F>
void expect_error(Errc code, F&& f) {
  try {
    f();
    FAIL("expected " << to_string(code));
  } catch (const Error& e) {
    CHECK(e.code() == code);
  }
}

// Σ X_ij m_i m_j by direct expansion.
PolySpec expand_gram(const std::vector<Exponent>& basis, const RationalMatrix& x, std::size_t nvars) {
  PolySpec p(nvars);
  for (std::size_t i = 0; i < basis.size(); ++i)
    for (std::size_t j = 0; j < basis.size(); ++j) {
      Exponent e(nvars);
      for (std::size_t k = 0; k < nvars; ++k) e[k] = basis[i][k] + basis[j][k];
      p.add(e, x(i, j));
    }
  return p;
}

// L Lᵀ + I with small integer L: positive definite with rational entries.
RationalMatrix random_pd(std::size_t m, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> d(-2, 2);
  RationalMatrix l(m, m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j <= i; ++j) l(i, j) = d(rng);
  RationalMatrix x = l * l.transpose();
  for (std::size_t i = 0; i < m; ++i) x(i, i) += 1;
  return x;
}

// Strictly diagonally dominant with random signs.
RationalMatrix random_dd(std::size_t m, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> d(-3, 3);
  RationalMatrix x(m, m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j) x(i, j) = x(j, i) = make_rational(d(rng), 2);
  for (std::size_t i = 0; i < m; ++i) {
    Rational s = 1;
    for (std::size_t j = 0; j < m; ++j)
      if (j != i) s += abs(x(i, j));
    x(i, i) = s;
  }
  return x;
}

// Univariate circuit c₀ + c_{2k}x^{2k} + z x^j (j odd) strictly inside the
// AM/GM bound, plus a few extra even squares.
PolySpec random_sonc(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> kd(1, 3), cd(1, 6);
  const unsigned k = static_cast<unsigned>(kd(rng));
  std::uniform_int_distribution<unsigned> jd(0, k - 1);
  const unsigned j = 2 * jd(rng) + 1;
  const Rational c0 = cd(rng), c1 = cd(rng);
  const double l1 = static_cast<double>(j) / (2.0 * k), l0 = 1.0 - l1;
  const double theta = std::pow(exact::to_double(c0) / l0, l0) * std::pow(exact::to_double(c1) / l1, l1);
  Rational z = exact::snap(0.8 * theta, mpz_class(100));
  if (rng() % 2) z = -z;
  PolySpec p(1);
  p.add({0}, c0);
  p.add({2 * k}, c1);
  p.add({j}, z);
  if (rng() % 2) p.add({2 * k + 2}, make_rational(cd(rng), 3));
  return p;
}

double grid_min_1d(const PolySpec& p) {
  double best = INFINITY;
  for (int i = -30000; i <= 30000; ++i) best = std::min(best, p.evaluate({i * 1e-4}));
  return best;
}

bool sampled_nonneg(const PolySpec& p, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  std::vector<double> x(p.nvars());
  for (int s = 0; s < 10000; ++s) {
    for (auto& v : x) v = u(rng);
    if (p.evaluate(x) < -1e-9) return false;
  }
  return true;
}

NonnegOptions exact_decomposition() {
  NonnegOptions o;
  o.want_decomposition = true;
  o.exact = true;
  return o;
}

}  // namespace

TEST_CASE("parse_poly: sparse text, implicit products, rationals") {
  PolySpec m = parse_poly(kMotzkin);
  CHECK(m.nvars() == 2);
  CHECK(m.coeff({2, 2}) == -3);
  CHECK(m.coeff({0, 0}) == 1);
  CHECK(parse_poly("x^4*y^2 + x^2*y^4 - 3x^2y^2 + 1") == m);
  CHECK(to_string(m) == "x^4*y^2 + x^2*y^4 - 3*x^2*y^2 + 1");

  PolySpec p = parse_poly("1/2 x1^2 x3 - 3e-1 + x2 - x2");
  CHECK(p.nvars() == 3);
  CHECK(p.coeff({2, 0, 1}) == q(1, 2));
  CHECK(p.coeff({0, 0, 0}) == q(-3, 10));
  CHECK(p.terms().size() == 2);

  CHECK(parse_poly("x^2+1") == poly_from_json(to_json(parse_poly("x^2+1"))));
  CHECK(parse_poly("-x + 2.5").coeff({1}) == -1);
  for (const char* bad : {"", "x^", "2 ++ x", "x $ 1", "x *", "3 4 +"})
    expect_error(Errc::ParseError, [&] { parse_poly(bad); });
  expect_error(Errc::ParseError, [] { poly_from_json({{"nvars", 1}, {"terms", {{{"exp", {1, 2}}, {"coeff", "1"}}}}}); });
}

TEST_CASE("monomials_up_to counts C(n+d, n) in graded order") {
  CHECK(monomials_up_to(1, 1).size() == 2);
  CHECK(monomials_up_to(2, 3).size() == 10);
  CHECK(monomials_up_to(2, 6).size() == 28);
  auto m = monomials_up_to(2, 2);
  CHECK(std::is_sorted(m.begin(), m.end(), GradedLess{}));
  CHECK(m.front() == Exponent{0, 0});
}

TEST_CASE("build_sos: univariate half-degree 1 map and target") {
  PolyCone pc = build_sos(parse_poly("x^2+1"));
  REQUIRE(pc.cone->rows() == 3);
  REQUIRE(pc.cone->cols() == 3);
  // packed (x00, x01, x11) ↦ (x00, 2x01, x11)
  CHECK(pc.cone->a_exact() == RationalMatrix{{q(1), q(0), q(0)}, {q(0), q(2), q(0)}, {q(0), q(0), q(1)}});
  CHECK(pc.b_exact == RationalVector{q(1), q(0), q(1)});
  RationalVector gram_i2{q(1), q(0), q(1)};
  CHECK(pc.cone->a_exact() * gram_i2 == pc.b_exact);
  expect_error(Errc::DegreeMismatch, [] { build_sos(parse_poly("x^6"), 2); });
}

TEST_CASE("build_sos: A-map equals Gram expansion for random PSD matrices") {
  std::mt19937_64 rng(11);
  PolyCone pc = build_sos(parse_poly("x^4 + y^4"), 2);
  const std::size_t m = pc.basis.size();
  REQUIRE(m == 6);
  for (int t = 0; t < 20; ++t) {
    RationalMatrix x = random_pd(m, rng);
    RationalVector packed(packed_dim(m));
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = i; j < m; ++j) packed[packed_index(i, j, m)] = x(i, j);
    RationalVector coeffs = pc.cone->a_exact() * packed;
    PolySpec direct = expand_gram(pc.basis, x, 2);
    for (std::size_t r = 0; r < pc.rows.size(); ++r) CHECK(coeffs[r] == direct.coeff(pc.rows[r]));
  }
}

TEST_CASE("SOS: (x^2 - 1)^2 has an exact rational Gram matrix") {
  PolySpec p = parse_poly("x^4 - 2x^2 + 1");
  NonnegReport r = certify_nonneg(p, PolyMethod::SOS, exact_decomposition());
  CHECK(r.status == SolveStatus::CertifiedMember);
  REQUIRE(r.decomposition.has_value());
  CHECK(r.decomposition->exact);
  CHECK(decomposition_reassemble(*r.decomposition) == p);
  CHECK(exact::psd_check(r.decomposition->gram) != exact::PsdClass::NotPSD);
  CHECK(r.witness->exact_member == std::optional<bool>(true));
}

TEST_CASE("enumerate_circuits: midpoint, Motzkin, uncoverable") {
  CircuitCover c = enumerate_circuits({{0}, {2}, {1}});
  REQUIRE(c.circuits.size() == 1);
  CHECK(c.circuits[0].outer == std::vector<Exponent>{{0}, {2}});
  CHECK(c.circuits[0].inner == Exponent{1});
  CHECK(c.circuits[0].lambda == RationalVector{q(1, 2), q(1, 2)});
  CHECK(c.uncovered.empty());

  CircuitCover m = enumerate_circuits({{0, 0}, {4, 2}, {2, 4}, {2, 2}}, {{2, 2}});
  REQUIRE(m.circuits.size() == 1);
  CHECK(m.circuits[0].inner == Exponent{2, 2});
  CHECK(m.circuits[0].lambda == RationalVector{q(1, 3), q(1, 3), q(1, 3)});
  CHECK(m.circuits[0].outer.size() == 3);

  CircuitCover u = enumerate_circuits({{1, 0}});
  CHECK(u.circuits.empty());
  CHECK(u.uncovered == std::vector<Exponent>{{1, 0}});

  std::vector<Exponent> big(21, Exponent{0});
  for (unsigned i = 0; i < big.size(); ++i) big[i] = {2 * i};
  expect_error(Errc::UnsupportedShape, [&] { enumerate_circuits(big); });
}

TEST_CASE("enumerate_circuits: all minimal circuits, parallel equals serial") {
  // square with its centre: the centre lies on both diagonals
  std::vector<Exponent> sq{{0, 0}, {4, 0}, {0, 4}, {4, 4}, {2, 2}};
  CircuitCover c = enumerate_circuits(sq, {{2, 2}});
  CHECK(c.circuits.size() == 2);
  for (const auto& k : c.circuits) CHECK(k.lambda == RationalVector{q(1, 2), q(1, 2)});

  std::vector<Exponent> supp{{0, 0}, {6, 0}, {0, 6}, {2, 2}, {4, 0}, {2, 4}, {1, 1}, {3, 1}, {1, 3}, {2, 0}};
  CircuitCover a = enumerate_circuits(supp), b = enumerate_circuits_serial(supp);
  REQUIRE(a.circuits.size() == b.circuits.size());
  CHECK(a.circuits.size() > 3);
  for (std::size_t i = 0; i < a.circuits.size(); ++i) {
    CHECK(a.circuits[i].outer == b.circuits[i].outer);
    CHECK(a.circuits[i].lambda == b.circuits[i].lambda);
    Exponent mix(2, 0);
    Rational s0 = 0, s1 = 0;
    for (std::size_t k = 0; k < a.circuits[i].outer.size(); ++k) {
      s0 += a.circuits[i].lambda[k] * a.circuits[i].outer[k][0];
      s1 += a.circuits[i].lambda[k] * a.circuits[i].outer[k][1];
    }
    CHECK(s0 == a.circuits[i].inner[0]);
    CHECK(s1 == a.circuits[i].inner[1]);
  }
}

TEST_CASE("SONC: Motzkin, squares only, uncoverable") {
  NonnegOptions o;
  NonnegReport eps = certify_nonneg(parse_poly("x^4*y^2 + x^2*y^4 - 2999999/1000000*x^2*y^2 + 1"), PolyMethod::SONC, o);
  CHECK(eps.status == SolveStatus::CertifiedMember);

  NonnegReport tight = certify_nonneg(parse_poly(kMotzkin), PolyMethod::SONC, o);
  REQUIRE(tight.certificate.has_value());
  CHECK(tight.lower_bound >= -1e-6);
  CHECK(tight.lower_bound <= 1e-9);

  NonnegReport sq = certify_nonneg(parse_poly("x^2 + 1"), PolyMethod::SONC, o);
  CHECK(sq.status == SolveStatus::CertifiedMember);
  PolyCone pc = build_sonc(parse_poly("x^2 + 1"));
  CHECK(pc.circuits.empty());
  CHECK(pc.squares.size() == 2);

  expect_error(Errc::UncoverableTerm, [] { build_sonc(parse_poly("x")); });
}

TEST_CASE("SONC: exact decomposition of the Motzkin polynomial on the boundary") {
  PolySpec p = parse_poly(kMotzkin);
  NonnegReport r = certify_nonneg(p, PolyMethod::SONC, exact_decomposition());
  CHECK(r.status == SolveStatus::CertifiedMember);
  REQUIRE(r.decomposition.has_value());
  CHECK(decomposition_reassemble(*r.decomposition) == p);
  CHECK(r.witness->exact_member == std::optional<bool>(true));
  REQUIRE(r.decomposition->circuit_parts.size() == 1);
  CHECK(r.decomposition->circuit_parts[0].inner == -3);
}

TEST_CASE("DSOS: ray maps for x^2+1 and (1+x)^2; random dd-Gram polynomials") {
  PolyCone a = build_dsos(parse_poly("x^2+1"));
  REQUIRE(a.cone->cols() == 4);  // M² rays for M = 2
  CHECK(a.cone->a_exact() * RationalVector{q(1), q(1), q(0), q(0)} == a.b_exact);
  PolyCone b = build_dsos(parse_poly("x^2+2x+1"));
  CHECK(b.cone->a_exact() * RationalVector{q(0), q(0), q(1), q(0)} == b.b_exact);

  std::mt19937_64 rng(5);
  for (int t = 0; t < 10; ++t) {
    PolySpec p = expand_gram(monomials_up_to(1, 2), random_dd(3, rng), 1);
    NonnegReport r = certify_nonneg(p, PolyMethod::DSOS, exact_decomposition());
    REQUIRE(r.status == SolveStatus::CertifiedMember);
    REQUIRE(r.decomposition.has_value());
    CHECK(decomposition_reassemble(*r.decomposition) == p);
    for (const auto& ray : r.decomposition->rays) CHECK(sgn(ray.weight) >= 0);
  }
}

TEST_CASE("SDSOS: x^2+1 and 2x^2+2x+1") {
  PolySpec a = parse_poly("x^2+1");
  NonnegReport ra = certify_nonneg(a, PolyMethod::SDSOS, exact_decomposition());
  CHECK(ra.status == SolveStatus::CertifiedMember);
  REQUIRE(ra.decomposition.has_value());
  CHECK(decomposition_reassemble(*ra.decomposition) == a);

  PolySpec p = parse_poly("2x^2 + 2x + 1");
  NonnegReport r = certify_nonneg(p, PolyMethod::SDSOS, exact_decomposition());
  CHECK(r.status == SolveStatus::CertifiedMember);
  REQUIRE(r.decomposition.has_value());
  REQUIRE(r.decomposition->blocks.size() == 1);
  const auto& blk = r.decomposition->blocks[0];
  CHECK(blk.a + r.decomposition->constant == 1);
  CHECK(blk.b == 1);
  CHECK(blk.c == 2);
  exact::LdltFactors f = exact::ldlt(RationalMatrix{{q(1), q(1)}, {q(1), q(2)}});
  CHECK(f.d == RationalVector{q(2), q(1, 2)});  // largest diagonal pivots first
  CHECK(exact::psd_check(RationalMatrix{{q(1), q(1)}, {q(1), q(2)}}) == exact::PsdClass::PositiveDefinite);
}

TEST_CASE("odd AG: AM/GM boundary of 1 + x^2 + d x") {
  NonnegOptions o;
  o.want_decomposition = true;
  NonnegReport in = certify_nonneg(parse_poly("x^2 - 1999999/1000000 x + 1"), PolyMethod::AG, o);
  CHECK(in.status == SolveStatus::CertifiedMember);
  REQUIRE(in.decomposition.has_value());
  PolySpec back = decomposition_reassemble(*in.decomposition);
  PolySpec p = parse_poly("x^2 - 1999999/1000000 x + 1");
  for (const auto& [e, c] : p.terms()) CHECK(exact::to_double(back.coeff(e)) == doctest::Approx(exact::to_double(c)).epsilon(1e-8));
  for (double nu : exact::to_doubles(in.decomposition->ag->nu)) CHECK(nu >= 0.0);

  NonnegOptions z;
  z.ag_beta = Exponent{1};
  CHECK(certify_nonneg(parse_poly("x^2 + 1"), PolyMethod::AG, z).status == SolveStatus::CertifiedMember);

  // 4c₀c₂ < d²: not a member, and the best shift matches 1 − d²/4
  NonnegReport out = certify_nonneg(parse_poly("x^2 - 201/100 x + 1"), PolyMethod::AG, NonnegOptions{});
  CHECK(out.status != SolveStatus::CertifiedMember);
  CHECK(out.lower_bound <= 1.0 - 2.01 * 2.01 / 4.0 + 1e-12);
  CHECK(out.lower_bound == doctest::Approx(1.0 - 2.01 * 2.01 / 4.0).epsilon(1e-4));

  expect_error(Errc::UnsupportedShape, [] { build_odd_ag(parse_poly("x^3 + x + x^4 + 1")); });
  expect_error(Errc::UnsupportedShape, [] { build_odd_ag(parse_poly("x^2 - 1 + x")); });
}

TEST_CASE("certify_nonneg: SOS lower bound of x^4 - 3x^2 + 2 matches the grid minimum") {
  PolySpec p = parse_poly("x^4 - 3x^2 + 2");
  NonnegReport r = certify_nonneg(p, PolyMethod::SOS);
  REQUIRE(r.certificate.has_value());
  CHECK(r.status == SolveStatus::CertifiedBoundOnly);
  const double grid = grid_min_1d(p);
  CHECK(grid == doctest::Approx(-0.25).epsilon(1e-6));
  CHECK(std::abs(r.lower_bound - grid) <= 1e-3);
  CHECK(r.lower_bound <= grid + 1e-9);
}

TEST_CASE("certify_nonneg: Motzkin separates SONC from SOS") {
  PolySpec p = parse_poly(kMotzkin);
  NonnegReport sonc = certify_nonneg(p, PolyMethod::SONC);
  NonnegOptions o;
  o.half_degree = 3;
  o.solver.max_iters = 300;
  NonnegReport sos = certify_nonneg(p, PolyMethod::SOS, o);
  CHECK(sonc.lower_bound >= -1e-6);
  CHECK(sos.lower_bound < sonc.lower_bound);
  CHECK(sos.status != SolveStatus::CertifiedMember);
}

TEST_CASE("certify_nonneg: p = x is not SOS") {
  NonnegReport r = certify_nonneg(parse_poly("x"), PolyMethod::SOS);
  CHECK(r.status == SolveStatus::Inconclusive);
  CHECK_FALSE(r.certificate.has_value());
}

TEST_CASE("decomposition_reassemble: Gram identity, empty, malformed") {
  Decomposition d;
  d.nvars = 1;
  d.basis = {{0}, {1}};
  d.gram = RationalMatrix::identity(2);
  CHECK(decomposition_reassemble(d) == parse_poly("1 + x^2"));

  Decomposition empty;
  empty.nvars = 2;
  CHECK(decomposition_reassemble(empty).terms().empty());

  Decomposition bad = d;
  bad.gram = RationalMatrix::identity(3);
  expect_error(Errc::MalformedPart, [&] { decomposition_reassemble(bad); });
  Decomposition ray = d;
  ray.gram = RationalMatrix();
  ray.rays.push_back({0, 1, 2, q(1)});
  expect_error(Errc::MalformedPart, [&] { decomposition_reassemble(ray); });
  Decomposition neg;
  neg.constant = -1;
  expect_error(Errc::MalformedPart, [&] { decomposition_reassemble(neg); });
}

TEST_CASE("round trip: exact decompositions reassemble to p for every method") {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 5; ++t) {
    PolySpec sos = expand_gram(monomials_up_to(2, 1), random_pd(3, rng), 2);
    PolySpec dd = expand_gram(monomials_up_to(1, 2), random_dd(3, rng), 1);
    PolySpec sonc = random_sonc(rng);
    const std::pair<PolySpec, PolyMethod> cases[] = {
        {sos, PolyMethod::SOS}, {dd, PolyMethod::DSOS}, {dd, PolyMethod::SDSOS}, {sonc, PolyMethod::SONC}};
    for (const auto& [p, m] : cases) {
      NonnegReport r = certify_nonneg(p, m, exact_decomposition());
      REQUIRE(r.status == SolveStatus::CertifiedMember);
      REQUIRE(r.decomposition.has_value());
      CHECK(decomposition_reassemble(*r.decomposition) == p);
      CHECK(r.witness->exact_member == std::optional<bool>(true));
      CHECK(sampled_nonneg(p, rng));
    }
  }
}

TEST_CASE("cone inclusions: DSOS ⇒ SDSOS ⇒ SOS on random polynomials") {
  std::mt19937_64 rng(33);
  std::uniform_int_distribution<int> coeff(-4, 4);
  int dsos_hits = 0;
  for (int t = 0; t < 20; ++t) {
    // random Gram-like data, half of it shifted to be diagonally dominant
    RationalMatrix x = t % 2 ? random_dd(3, rng) : random_pd(3, rng);
    x(0, 1) += coeff(rng);
    x(1, 0) = x(0, 1);
    PolySpec p = expand_gram(monomials_up_to(1, 2), x, 1);
    const bool d = certify_nonneg(p, PolyMethod::DSOS).status == SolveStatus::CertifiedMember;
    const bool s = certify_nonneg(p, PolyMethod::SDSOS).status == SolveStatus::CertifiedMember;
    const bool g = certify_nonneg(p, PolyMethod::SOS).status == SolveStatus::CertifiedMember;
    dsos_hits += d;
    if (d) CHECK(s);
    if (s) CHECK(g);
  }
  CHECK(dsos_hits > 0);
}

TEST_CASE("soundness: certified members are nonnegative on samples") {
  std::mt19937_64 rng(8);
  for (const char* text : {"x^2+1", "x^4 - 2x^2 + 1", kMotzkin, "2x^2 + 2x + 1", "x^4 + y^4 + 1 - x*y"})
    for (PolyMethod m : {PolyMethod::SOS, PolyMethod::SONC, PolyMethod::SDSOS}) {
      PolySpec p = parse_poly(text);
      NonnegReport r;
      try {
        r = certify_nonneg(p, m, exact_decomposition());
      } catch (const Error& e) {
        CHECK(e.code() == Errc::UncoverableTerm);
        continue;
      }
      if (r.status == SolveStatus::CertifiedMember) CHECK(sampled_nonneg(p, rng));
    }
}

TEST_CASE("JSON: decomposition and report") {
  PolySpec p = parse_poly("x^2 + 2x + 3");
  PolyCone pc = build_sos(p);
  NonnegOptions o = exact_decomposition();
  NonnegReport r = certify_nonneg(pc, o);
  auto j = to_json(r, pc, true);
  CHECK(j.at("status") == "CertifiedMember");
  CHECK(j.at("decomposition").at("kind") == "SOS-Gram");
  CHECK(j.at("decomposition").at("gram").size() == 2);
  CHECK(j.at("certificate").at("kind") == "H");
  CHECK(poly_method_from_string("sdsos") == PolyMethod::SDSOS);
  expect_error(Errc::ConfigError, [] { poly_method_from_string("psatz"); });
}
