#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>

#include "conecert/barriers.hpp"
#include "conecert/certify.hpp"
#include "conecert/error.hpp"

using namespace conecert;
using exact::make_rational;
using exact::Rational;
using exact::RationalVector;

namespace {

kernels::SymBasis<Rational> hankel_basis_2x2() {
  kernels::SymBasis<Rational> b(3);
  b[0].push_back({0, 0, Rational(1)});
  b[1].push_back({0, 1, Rational(1)});
  b[1].push_back({1, 0, Rational(1)});
  b[2].push_back({1, 1, Rational(1)});
  return b;
}

// Independent membership in K for the cones with a direct test.
bool independent_member(const BarrierOracle& o, const Vec& b, std::size_t psd_m) {
  if (psd_m == 0) return b.minCoeff() >= -1e-12;
  Eigen::SelfAdjointEigenSolver<Mat> es(unpack_symmetric(b, psd_m));
  return es.eigenvalues().minCoeff() >= -1e-10 * std::max(1.0, b.norm());
  (void)o;
}

struct Family {
  OraclePtr oracle;
  std::size_t psd_m;  // 0 for orthant-like
};

std::vector<Family> sound_families() {
  return {{orthant_oracle(3), 0},
          {orthant_oracle(5), 0},
          {psd_packed_oracle(2), 2},
          {psd_packed_oracle(3), 3},
          {psd_packed_oracle(4), 4}};
}

Vec random_vec(std::mt19937_64& rng, Eigen::Index n, double scale) {
  std::normal_distribution<double> nd(0.0, scale);
  Vec v(n);
  for (auto& x : v) x = nd(rng);
  return v;
}

}  // namespace

TEST_CASE("build_B_matrix examples") {
  auto o1 = orthant_oracle(1);
  CHECK(build_B_matrix(*o1, Vec::Ones(1))(0, 0) == doctest::Approx(2.0));
  auto o2 = orthant_oracle(2);
  Mat b = build_B_matrix(*o2, Vec::Ones(2));
  CHECK(b(0, 0) == doctest::Approx(2.0));
  CHECK(b(0, 1) == doctest::Approx(1.0));
  CHECK(b(1, 1) == doctest::Approx(2.0));
  CHECK_THROWS_AS(build_B_matrix(*o2, Vec{{1.0, -1.0}}), Error);

  std::mt19937_64 rng(3);
  for (auto o : {expcone_oracle(), psd_packed_oracle(3), relentropy_dual_oracle(2)}) {
    Vec y = sample_interior(*o, rng);
    BarrierEval ev = o->eval(y);
    Mat d = build_B_matrix(*o, y) - ev.g * ev.g.transpose() - ev.H;
    CHECK(d.norm() <= 1e-12 * std::max(1.0, ev.H.norm()));
  }
}

TEST_CASE("apply_B_inverse examples") {
  auto o1 = orthant_oracle(1);
  CHECK(apply_B_inverse(*o1, Vec::Ones(1), Vec::Ones(1))[0] == doctest::Approx(0.5));

  std::mt19937_64 rng(9);
  for (auto o : {orthant_oracle(3), expcone_oracle(), psd_packed_oracle(2)}) {
    Vec y = sample_interior(*o, rng);
    Vec b = -o->eval(y).g;
    Vec w = apply_B_inverse(*o, y, b);
    CHECK((w - y / (o->nu() + 1.0)).norm() <= 1e-9 * y.norm());
  }
}

TEST_CASE("Sherman-Morrison agrees with a dense solve against B") {
  std::mt19937_64 rng(41);
  std::vector<OraclePtr> cones{orthant_oracle(4),
                               psd_packed_oracle(3),
                               expcone_oracle(),
                               powercone_oracle({make_rational(1, 4), make_rational(3, 4)}),
                               relentropy_dual_oracle(2)};
  for (const auto& o : cones)
    for (int t = 0; t < 20; ++t) {
      Vec y = sample_interior(*o, rng);
      Vec b = random_vec(rng, static_cast<Eigen::Index>(o->dim()), 1.0);
      Vec sm = apply_B_inverse(*o, y, b);
      Vec dense = build_B_matrix(*o, y).ldlt().solve(b);
      CHECK((sm - dense).norm() <= 1e-8 * std::max(1.0, dense.norm()));
    }
}

TEST_CASE("check_certificate examples") {
  auto o = orthant_oracle(3);
  Vec b{{2.0, 4.0, 0.5}};
  Vec y = b.cwiseInverse();
  DualCertificate c = check_certificate(*o, y, b, CertKind::H);
  CHECK(c.accepted);
  CHECK((c.witness - y).norm() < 1e-12);

  try {
    check_certificate(*expcone_oracle(), Vec{{1.0, 1.0, -1.0}}, Vec{{1.0, 1.0, 1.0}}, CertKind::H);
    FAIL("expected HNotValidForCone");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::HNotValidForCone);
  }
  CHECK_THROWS_AS(check_certificate(*o, Vec{{1.0, 0.0, 1.0}}, b, CertKind::B), Error);

  // p(x) = x² + 1 over the moment cone of degree-2 univariate SOS
  auto sos = logdet_oracle(2, hankel_basis_2x2());
  Vec p{{1.0, 0.0, 1.0}};
  CertificateSearchReport rep = gradient_certificate(*sos, p);
  CHECK(rep.certificate.accepted);
  Eigen::SelfAdjointEigenSolver<Mat> es(unpack_symmetric(
      Vec{{rep.certificate.witness[0], rep.certificate.witness[1], rep.certificate.witness[2]}}, 2));
  CHECK(es.eigenvalues().minCoeff() > 0.0);
  CHECK(exact_verify(*sos, rep.certificate, mpz_class(1000000)) == ExactStatus::Proven);
}

TEST_CASE("gradient_certificate examples") {
  auto o = orthant_oracle(2);
  CertificateSearchReport r = gradient_certificate(*o, Vec{{2.0, 3.0}});
  CHECK(r.y_b[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(r.y_b[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(r.final_residual <= 1e-10);
  CHECK(r.certificate.accepted);

  auto o1 = orthant_oracle(1);
  CertificateSearchReport r1 = gradient_certificate(*o1, Vec::Constant(1, 2.0));
  CHECK(r1.y_b[0] == doctest::Approx(0.5));
  CHECK(apply_B_inverse(*o1, r1.y_b, Vec::Constant(1, 2.0))[0] == doctest::Approx(0.25));

  auto e = expcone_oracle();
  Vec y{{6.0, 2.0, -3.0}};
  Vec b = -e->eval(y).g;
  CertificateSearchReport re = gradient_certificate(*e, b);
  CHECK((re.y_b - y).norm() <= 1e-8);

  try {
    gradient_certificate(*o, Vec{{1.0, -1.0}}, 1e-10, 50);
    FAIL("expected MaxIters");
  } catch (const Error& err) {
    CHECK(err.code() == Errc::MaxIters);
  }
}

TEST_CASE("dikin_sufficient_H examples") {
  auto o = orthant_oracle(1);
  Vec one = Vec::Ones(1);
  CHECK(dikin_sufficient_H(*o, one, one));
  CHECK_FALSE(dikin_sufficient_H(*o, one, Vec::Constant(1, 3.0)));
  CHECK(check_certificate(*o, one, Vec::Constant(1, 3.0), CertKind::H).accepted);
  CHECK(dikin_sufficient_H(*o, one, Vec::Constant(1, 1.5)));
}

TEST_CASE("dikin_sufficient_B examples") {
  auto o = orthant_oracle(1);
  Vec one = Vec::Ones(1);
  CHECK(dikin_sufficient_B(*o, one, one, false));
  CHECK(dikin_sufficient_B(*o, one, Vec::Constant(1, 1.1), false));
  CHECK_FALSE(dikin_sufficient_B(*o, one, Vec::Constant(1, 2.0), false));
  CHECK(dikin_sufficient_B(*o, one, Vec::Constant(1, 2.0), true));
  CHECK(dikin_B_best_delta(*o, one, Vec::Constant(1, 2.0)) == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("Dikin sufficient conditions imply acceptance") {
  std::mt19937_64 rng(77);
  std::vector<OraclePtr> cones{orthant_oracle(3), psd_packed_oracle(3), expcone_oracle(),
                               powercone_oracle({make_rational(1, 3), make_rational(2, 3)})};
  int b_hits = 0, h_hits = 0;
  for (const auto& o : cones)
    for (int t = 0; t < 100; ++t) {
      Vec y = sample_interior(*o, rng);
      LocalNormContext ctx(*o, y);
      Vec b = -ctx.eval().g + ctx.factor().matrixL() * random_vec(rng, y.size(), 0.3);
      if (dikin_sufficient_B(*o, y, b, true)) {
        ++b_hits;
        double d = dikin_B_best_delta(*o, y, b);
        CHECK(check_certificate(*o, d * y, b, CertKind::B).accepted);
      }
      if (o->hyperbolic() && dikin_sufficient_H(*o, y, b)) {
        ++h_hits;
        CHECK(check_certificate(*o, y, b, CertKind::H).accepted);
      }
    }
  CHECK(b_hits > 20);
  CHECK(h_hits > 20);
}

TEST_CASE("exact_verify examples") {
  auto o = orthant_oracle(2);
  RationalVector y{make_rational(1, 2), make_rational(1, 3)};
  RationalVector b{Rational(2), Rational(3)};
  CHECK(exact_verify(*o, y, b, CertKind::B) == ExactStatus::Proven);
  CHECK(exact_verify(*o, y, b, CertKind::H) == ExactStatus::Proven);
  CHECK(exact_witness(*o, y, b, CertKind::H) == y);
  CHECK(exact_witness(*o, y, b, CertKind::B) == RationalVector{make_rational(1, 6), make_rational(1, 9)});

  RationalVector bad{Rational(2), Rational(-3)};
  CHECK(exact_verify(*o, y, bad, CertKind::H) == ExactStatus::Refuted);
  CHECK(exact_verify(*o, RationalVector{Rational(0), Rational(1)}, b, CertKind::H) == ExactStatus::Refuted);

  try {
    exact_verify(*expcone_oracle(), RationalVector{Rational(1), Rational(1), Rational(-1)},
                 RationalVector{Rational(1), Rational(1), Rational(1)}, CertKind::B);
    FAIL("expected ExactUnavailable");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::ExactUnavailable);
  }
}

TEST_CASE("accepted B-certificates are sound on independently testable cones") {
  std::mt19937_64 rng(500);
  int accepted = 0;
  for (int t = 0; accepted < 500 && t < 20000; ++t) {
    auto fams = sound_families();
    const Family& f = fams[static_cast<std::size_t>(t) % fams.size()];
    Vec y = sample_interior(*f.oracle, rng);
    LocalNormContext ctx(*f.oracle, y);
    Vec b = -ctx.eval().g + ctx.factor().matrixL() * random_vec(rng, y.size(), 1.5);
    DualCertificate c = check_certificate(*f.oracle, y, b, CertKind::B);
    if (!c.accepted) continue;
    ++accepted;
    CHECK(independent_member(*f.oracle, b, f.psd_m));
  }
  CHECK(accepted == 500);

  // products: membership is blockwise
  auto prod = product_oracle({orthant_oracle(2), psd_packed_oracle(2)});
  int prod_ok = 0;
  for (int t = 0; t < 20000 && prod_ok < 100; ++t) {
    Vec y = sample_interior(*prod, rng);
    LocalNormContext ctx(*prod, y);
    Vec b = -ctx.eval().g + ctx.factor().matrixL() * random_vec(rng, y.size(), 0.5);
    if (!check_certificate(*prod, y, b, CertKind::B).accepted) continue;
    ++prod_ok;
    CHECK(b.head(2).minCoeff() >= -1e-12);
    Eigen::SelfAdjointEigenSolver<Mat> es(unpack_symmetric(Vec(b.tail(3)), 2));
    CHECK(es.eigenvalues().minCoeff() >= -1e-10);
  }
  CHECK(prod_ok == 100);
}

TEST_CASE("accepted B-certificates on log-det cones are H-certificates") {
  std::mt19937_64 rng(200);
  std::vector<OraclePtr> cones{orthant_oracle(3), psd_packed_oracle(2), psd_packed_oracle(3),
                               logdet_oracle(2, hankel_basis_2x2())};
  int n = 0;
  for (int t = 0; n < 200 && t < 10000; ++t) {
    const auto& o = cones[static_cast<std::size_t>(t) % cones.size()];
    Vec y = sample_interior(*o, rng);
    LocalNormContext ctx(*o, y);
    Vec b = -ctx.eval().g + ctx.factor().matrixL() * random_vec(rng, y.size(), 1.5);
    if (!check_certificate(*o, y, b, CertKind::B).accepted) continue;
    ++n;
    CHECK(check_certificate(*o, y, b, CertKind::H).accepted);
  }
  CHECK(n == 200);
}

TEST_CASE("B-certificates around y_b form a full-dimensional set") {
  std::mt19937_64 rng(100);
  std::vector<OraclePtr> cones{orthant_oracle(3), psd_packed_oracle(2), expcone_oracle(),
                               powercone_oracle({make_rational(1, 2), make_rational(1, 2)}),
                               relentropy_dual_oracle(1)};
  for (const auto& o : cones) {
    Vec x = sample_interior(*o, rng);
    Vec b = -o->eval(x).g;  // interior of K
    CertificateSearchReport rep = gradient_certificate(*o, b);
    LocalNormContext ctx(*o, rep.y_b);
    for (int k = 0; k < 100; ++k) {
      Vec u = random_vec(rng, x.size(), 1.0);
      Vec d = ctx.factor().matrixU().solve(u);  // ‖d‖_{y_b} = ‖u‖
      d *= 0.01 * std::uniform_real_distribution<double>(0.0, 1.0)(rng) / u.norm();
      CHECK(check_certificate(*o, rep.y_b + d, b, CertKind::B).accepted);
    }
  }
}

TEST_CASE("accepted certificates are closed under positive scaling") {
  std::mt19937_64 rng(12);
  std::vector<OraclePtr> cones{orthant_oracle(3), psd_packed_oracle(3), expcone_oracle(), relentropy_dual_oracle(2)};
  int n = 0;
  for (int t = 0; t < 400; ++t) {
    const auto& o = cones[static_cast<std::size_t>(t) % cones.size()];
    Vec y = sample_interior(*o, rng);
    LocalNormContext ctx(*o, y);
    Vec b = -ctx.eval().g + ctx.factor().matrixL() * random_vec(rng, y.size(), 0.4);
    if (!check_certificate(*o, y, b, CertKind::B).accepted) continue;
    ++n;
    for (double s : {0.5, 2.0}) {
      DualCertificate c = check_certificate(*o, s * y, b, CertKind::B);
      CHECK(c.accepted);
      CHECK((c.witness - s * s * check_certificate(*o, y, b, CertKind::B).witness).norm() <=
            1e-8 * std::max(1.0, c.witness.norm()));
    }
  }
  CHECK(n > 50);
}

TEST_CASE("certificate JSON round trip") {
  auto o = orthant_oracle(2);
  DualCertificate c = check_certificate(*o, Vec{{0.5, 0.25}}, Vec{{2.0, 4.0}}, CertKind::H);
  c.exact = exact_verify(*o, c, mpz_class(1000));
  nlohmann::json j = to_json(c, *o, false);
  CHECK(j["kind"] == "H");
  CHECK(j["exact"] == "Proven");
  CHECK(j["cone"]["kind"] == "Orthant");
  DualCertificate back = certificate_from_json(j);
  CHECK(back.kind == CertKind::H);
  CHECK((back.y - c.y).norm() < 1e-12);
  CHECK(back.exact == ExactStatus::Proven);

  nlohmann::json je = to_json(c, *o, true);
  CHECK(je["y"][0] == "1/2");
  DualCertificate be = certificate_from_json(je);
  REQUIRE(be.y_exact.has_value());
  CHECK((*be.y_exact)[1] == make_rational(1, 4));
  CHECK(vector_to_json(Vec::Constant(1, 1.0 / 3.0))[0].get<double>() == 0.333333333333);
}
