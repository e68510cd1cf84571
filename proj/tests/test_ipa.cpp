#include <doctest.h>

#include <cmath>
#include <sstream>

#include "conecert/error.hpp"
#include "conecert/ipa.hpp"

using namespace conecert;
using exact::make_rational;
using exact::Rational;
using exact::RationalMatrix;
using exact::RationalVector;

namespace {

Rational q(long p, long d = 1) { return make_rational(p, d); }

StandardForm lp_example() {
  return {orthant_oracle(4), RationalVector{q(1), q(1), q(1), q(1)},
          RationalMatrix{{q(1), q(2), q(3), q(4)}, {q(0), q(-6), q(0), q(1)}}, RationalVector{q(19), q(-5)}};
}

kernels::SymBasis<Rational> hankel_basis_2x2() {
  kernels::SymBasis<Rational> b(3);
  b[0].push_back({0, 0, Rational(1)});
  b[1].push_back({0, 1, Rational(1)});
  b[1].push_back({1, 0, Rational(1)});
  b[2].push_back({1, 1, Rational(1)});
  return b;
}

MembershipProblem lp_membership(const ImageCone& stacked, const StandardForm& sf) {
  MembershipProblem mp;
  mp.oracle = stacked.dual_oracle();
  mp.b = Vec::Zero(3);
  mp.b.tail(2) = -to_eigen(sf.b);
  mp.w = Vec::Unit(3, 0);
  mp.check_w = false;
  return mp;
}

// Gram-matrix SDP for max γ s.t. p − γ is SOS: min X₀₀ s.t. coefficient k ≥ 1 of mᵀXm equals p_k.
StandardForm sos_lower_bound_sdp(const std::vector<Rational>& p) {
  const std::size_t deg = p.size() - 1, half = deg / 2, m = half + 1, n = m * (m + 1) / 2;
  RationalMatrix a(deg, n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i; j < m; ++j) {
      const std::size_t k = i + j;
      if (k == 0) continue;
      a(k - 1, packed_index(i, j, m)) = i == j ? 1 : 2;
    }
  RationalVector c(n), b(p.begin() + 1, p.end());
  c[0] = 1;
  return {psd_packed_oracle(m), c, a, b};
}

}  // namespace

TEST_CASE("initialize: symmetric orthant instance is already central") {
  MembershipProblem mp{orthant_oracle(3), Vec::Constant(3, 1.0 / 3.0), Vec::Constant(3, 1.0 / 3.0), Vec::Ones(3)};
  PreparedProblem p = prepare(mp);
  PathIterate it = initialize(p, SolverConfig{});
  CHECK(it.centrality <= 1e-12);
  CHECK(it.newton_steps == 0);
  CHECK(p.w.dot(it.y) == doctest::Approx(1.0));
}

TEST_CASE("initialize: LP example in membership form centers quickly") {
  StandardForm sf = lp_example();
  ImageCone stacked = stack_standard_form(sf);
  PreparedProblem p = prepare(lp_membership(stacked, sf));
  PathIterate it = initialize(p, SolverConfig{});
  CHECK(it.newton_steps <= 30);
  CHECK(it.centrality <= 0.125);
  CHECK(it.y[0] == doctest::Approx(1.0));
}

TEST_CASE("initialize: w outside the cone is rejected") {
  MembershipProblem mp{orthant_oracle(2), Vec::Ones(2), Vec{{1.0, -1.0}}, std::nullopt};
  try {
    prepare(mp);
    FAIL("expected ConfigError");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::ConfigError);
  }
}

TEST_CASE("step: theta = 0 is pure centering") {
  MembershipProblem mp{orthant_oracle(3), Vec{{3.0, 1.0, 2.0}}, Vec::Ones(3), std::nullopt};
  PreparedProblem p = prepare(mp);
  PathIterate it = initialize(p, SolverConfig{});
  for (int k = 0; k < 5; ++k) {
    PathIterate next = step(p, it, 0.25, 0.0);
    CHECK(next.tau == it.tau);
    CHECK(next.centrality <= it.centrality + 1e-14);
    it = next;
  }
}

TEST_CASE("step: geometric tau schedule") {
  MembershipProblem mp{orthant_oracle(3), Vec{{3.0, 1.0, 2.0}}, Vec::Ones(3), std::nullopt};
  SolverConfig cfg;
  cfg.early_exit = false;
  cfg.max_iters = 60;
  SolveReport r = solve_membership(mp, cfg);
  REQUIRE(r.trace.size() > 10);
  const double ratio = 1.0 - cfg.theta / std::sqrt(3.0);
  for (std::size_t k = 1; k < r.trace.size(); ++k)
    CHECK(r.trace[k].tau == doctest::Approx(r.trace[k - 1].tau * ratio).epsilon(1e-15));
  CHECK(r.trace.back().tau == doctest::Approx(r.trace[0].tau * std::pow(ratio, double(r.trace.size() - 1))));
}

TEST_CASE("orthant toy: certified alpha rises monotonically to the boundary distance") {
  // b − α𝟙 ≥ 0 iff α ≤ min b = 1
  MembershipProblem mp{orthant_oracle(2), Vec{{3.0, 1.0}}, Vec::Ones(2), std::nullopt};
  SolverConfig cfg;
  cfg.early_exit = false;
  SolveReport r = solve_membership(mp, cfg);
  CHECK(r.status == SolveStatus::CertifiedMember);
  CHECK(r.best_alpha == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(r.best_alpha <= 1.0 + 1e-12);
  double prev = -1e300;
  for (const auto& e : r.trace) {
    CHECK(e.certified);
    CHECK(e.alpha >= prev - 1e-12);
    prev = e.alpha;
  }
}

TEST_CASE("solve_membership: b = 2w") {
  // b − αw = (2 − α)w ∈ K iff α ≤ 2
  for (CertKind mode : {CertKind::H, CertKind::B}) {
    auto o = psd_packed_oracle(2);
    Vec w = -o->eval(Vec{{1.0, 0.2, 2.0}}).g;
    MembershipProblem mp{o, 2.0 * w, w, std::nullopt};
    SolverConfig cfg;
    cfg.mode = mode;
    cfg.early_exit = false;
    SolveReport r = solve_membership(mp, cfg);
    CHECK(r.status == SolveStatus::CertifiedMember);
    CHECK(r.best_alpha == doctest::Approx(2.0).epsilon(1e-3));
    CHECK(r.best_alpha <= 2.0 + 1e-9);

    cfg.early_exit = true;
    SolveReport quick = solve_membership(mp, cfg);
    CHECK(quick.status == SolveStatus::CertifiedMember);
    CHECK(quick.best_alpha >= 0.0);
  }
}

TEST_CASE("solve_membership: x^2 + 1 has SOS lower bound 1") {
  MembershipProblem mp{logdet_oracle(2, hankel_basis_2x2()), Vec{{1.0, 0.0, 1.0}}, Vec{{1.0, 0.0, 0.0}},
                       std::nullopt, false};
  SolverConfig cfg;
  cfg.early_exit = false;
  SolveReport r = solve_membership(mp, cfg);
  CHECK(r.status == SolveStatus::CertifiedMember);
  CHECK(r.best_alpha == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(r.best_alpha <= 1.0 + 1e-12);
}

TEST_CASE("solve_membership: p(x) = x is never certified") {
  // x − α is not SOS for any α, so no iterate can carry a valid certificate
  MembershipProblem mp{logdet_oracle(2, hankel_basis_2x2()), Vec{{0.0, 1.0, 0.0}}, Vec{{1.0, 0.0, 0.0}},
                       std::nullopt, false};
  SolverConfig cfg;
  cfg.max_iters = 300;
  SolveReport r = solve_membership(mp, cfg);
  CHECK(r.status != SolveStatus::CertifiedMember);
  CHECK_FALSE(r.certificate.has_value());
}

TEST_CASE("H mode is refused on non-hyperbolic cones") {
  MembershipProblem mp{expcone_oracle(), Vec{{1.0, 1.0, -1.0}}, Vec{}, std::nullopt};
  SolverConfig cfg;
  try {
    solve_membership(mp, cfg);
    FAIL("expected HNotValidForCone");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::HNotValidForCone);
  }
  cfg.mode = CertKind::B;
  cfg.early_exit = false;
  SolveReport r = solve_membership(mp, cfg);
  CHECK(r.status != SolveStatus::Inconclusive);
}

TEST_CASE("trace invariants: neighborhood, certificates, alpha bookkeeping") {
  struct Case {
    MembershipProblem mp;
    CertKind mode;
  };
  StandardForm sf = lp_example();
  ImageCone stacked = stack_standard_form(sf);
  std::vector<Case> cases{
      {{orthant_oracle(3), Vec{{3.0, 1.0, 2.0}}, Vec::Ones(3), std::nullopt}, CertKind::B},
      {{expcone_oracle(), Vec{{2.0, 1.0, 0.5}}, Vec{}, std::nullopt}, CertKind::B},
      {{relentropy_dual_oracle(2), Vec{{3.0, 1.0, 2.0, 1.0, 1.5}}, Vec{}, std::nullopt}, CertKind::B},
      {lp_membership(stacked, sf), CertKind::B},
      {lp_membership(stacked, sf), CertKind::H}};
  for (auto& c : cases) {
    SolverConfig cfg;
    cfg.mode = c.mode;
    cfg.early_exit = false;
    cfg.max_iters = 400;
    PreparedProblem p = prepare(c.mp);
    SolveReport r = solve_membership(c.mp, cfg);
    INFO(c.mp.oracle->name());
    REQUIRE(!r.trace.empty());
    for (const auto& e : r.trace) {
      CHECK(e.centrality <= r.eta);
      CHECK(e.certified);
    }
    // re-run one step at a time and check the certificate of every iterate
    PathIterate it = initialize(p, cfg);
    for (int k = 0; k < 40; ++k) {
      CHECK(check_certificate(*p.oracle, it.y, p.b - it.alpha * p.w, c.mode).accepted);
      const double consistency = std::abs(it.alpha - (p.b.dot(it.y) - it.tau * r.nu));
      CHECK(consistency <= r.eta * it.tau * std::sqrt(r.nu) + 1e-12);
      it = step(p, it, r.eta, cfg.theta);
    }
  }
}

TEST_CASE("solve_standard_form: LP example") {
  StandardForm sf = lp_example();
  SolverConfig cfg;
  cfg.tol = 1e-6;
  StandardFormReport r = solve_standard_form(sf, cfg);
  REQUIRE(r.path.certificate);
  CHECK(r.gamma - r.dual_value <= 1e-6);
  CHECK(r.gamma >= 5.5 - 1e-9);
  CHECK(r.dual_value <= 5.5 + 1e-9);
  REQUIRE(r.primal);
  Vec xstar{{0.0, 1.5, 0.0, 4.0}};
  CHECK((r.primal->x - xstar).cwiseAbs().maxCoeff() <= 1e-4);
  CHECK(r.primal->residual <= 1e-6);
  CHECK(r.primal->base_margin >= 0.0);
  REQUIRE(r.exact_witness);
  REQUIRE(r.exact_gamma);
  CHECK(*r.exact_gamma >= q(11, 2));
  CHECK(abs(*r.exact_gamma - q(11, 2)) <= q(1, 100000));
  const RationalVector xg = r.exact_witness->at(*r.exact_gamma);
  CHECK(sf.a * xg == sf.b);
  for (const auto& xi : xg) CHECK(xi >= 0);
  for (const auto& e : r.path.trace) {
    REQUIRE(e.gamma);
    CHECK(e.centrality <= r.path.eta);
  }
}

TEST_CASE("solve_standard_form: symmetric orthant instance") {
  for (std::size_t n : {2u, 5u}) {
    RationalMatrix a(1, n);
    RationalVector c(n, Rational(1));
    for (std::size_t j = 0; j < n; ++j) a(0, j) = 1;
    // c = 𝟙 = Aᵀ·1 is in the row space, so tilt one cost
    c[0] = 2;
    StandardForm sf{orthant_oracle(n), c, a, RationalVector{Rational(1)}};
    StandardFormReport r = solve_standard_form(sf, SolverConfig{});
    CHECK(r.gamma == doctest::Approx(1.0).epsilon(1e-6));
  }
  // c = 𝟙 with A = 𝟙ᵀ is degenerate for the stacked matrix
  StandardForm degenerate{orthant_oracle(3), RationalVector(3, Rational(1)), RationalMatrix{{q(1), q(1), q(1)}},
                          RationalVector{Rational(1)}};
  CHECK_THROWS_AS(solve_standard_form(degenerate, SolverConfig{}), Error);
}

TEST_CASE("solve_standard_form: SOS lower bound of x^4 - 3x^2 + 2") {
  StandardForm sf = sos_lower_bound_sdp({q(2), q(0), q(-3), q(0), q(1)});
  SolverConfig cfg;
  cfg.tol = 1e-8;
  StandardFormReport r = solve_standard_form(sf, cfg);
  REQUIRE(r.path.certificate);
  // γ* = p₀ − min X₀₀
  const double certified = 2.0 - r.gamma;
  double grid_min = 1e300;
  for (int i = 0; i <= 100000; ++i) {
    double x = -3.0 + 6.0 * i / 100000.0;
    grid_min = std::min(grid_min, x * x * x * x - 3.0 * x * x + 2.0);
  }
  CHECK(std::abs(certified - grid_min) <= 1e-3);
  CHECK(certified <= -0.25 + 1e-12);
}

TEST_CASE("solver config and trace serialisation") {
  SolverConfig c = solver_config_from_json(
      nlohmann::json{{"eta", 0.2}, {"theta", 0.1}, {"mode", "B"}, {"snap_denominator_cap", "1000"}});
  CHECK(c.eta == 0.2);
  CHECK(c.mode == CertKind::B);
  CHECK(c.snap_denominator_cap == 1000);
  CHECK(c.effective_eta(9.0) == doctest::Approx(0.045));
  CHECK_THROWS_AS(solver_config_from_json(nlohmann::json{{"eta", 2.0}}), Error);
  CHECK(solver_config_from_json(to_json(c)).theta == 0.1);

  MembershipProblem mp{orthant_oracle(2), Vec{{3.0, 1.0}}, Vec::Ones(2), std::nullopt};
  std::vector<TraceEntry> streamed;
  SolveReport r = solve_membership(mp, SolverConfig{}, [&](const TraceEntry& e) { streamed.push_back(e); });
  CHECK(streamed.size() == r.trace.size());
  std::ostringstream os;
  write_trace(os, r.trace);
  std::istringstream is(os.str());
  std::string line;
  std::size_t lines = 0;
  while (std::getline(is, line)) {
    auto j = nlohmann::json::parse(line);
    CHECK(j.contains("tau"));
    ++lines;
  }
  CHECK(lines == r.trace.size());
  CHECK(to_json(r)["status"] == "CertifiedMember");
}
