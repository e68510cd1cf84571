#pragma once

#include <memory>
#include <optional>
#include <utility>

#include "conecert/barriers.hpp"
#include "conecert/certify.hpp"

namespace conecert {

/// K_A = {Ax : x ∈ K} for A with full row rank. `base` is the barrier oracle
/// of K*; the dual of K_A is described by the pullback of that oracle by A.
class ImageCone {
 public:
  ImageCone(OraclePtr base, exact::RationalMatrix a);

  const OraclePtr& base() const noexcept { return base_; }
  const exact::RationalMatrix& a_exact() const noexcept { return a_exact_; }
  const Mat& a() const noexcept { return a_; }
  const std::shared_ptr<const PullbackOracle>& dual_oracle() const noexcept { return dual_; }
  std::size_t rows() const noexcept { return a_exact_.rows(); }
  std::size_t cols() const noexcept { return a_exact_.cols(); }

  nlohmann::json to_json() const;
  static ImageCone from_json(const nlohmann::json& j);

 private:
  OraclePtr base_;
  exact::RationalMatrix a_exact_;
  Mat a_;
  std::shared_ptr<const PullbackOracle> dual_;
};

struct PrimalWitness {
  Vec x;
  std::optional<exact::RationalVector> x_exact;
  /// ‖Ax − b‖∞; exactly zero on the rational path.
  double residual = 0.0;
  /// K membership slack of x (nonnegative iff x ∈ K); NaN when the base has no primal test.
  double base_margin = 0.0;
  std::optional<bool> exact_member;
  /// True when B(s) was replaced by a rational approximation (transcendental base).
  bool rationalised = false;
};

nlohmann::json to_json(const PrimalWitness& w, bool exact_values = false);

/// x = M Aᵀ(A M Aᵀ)⁻¹b with M = B(Aᵀy) or H(Aᵀy). Throws NotCertificate unless
/// y is an accepted kind-certificate of b for K_A.
PrimalWitness reconstruct_primal(const ImageCone& ic, const Vec& y, const Vec& b, CertKind kind);

/// Rational replay. Uses the exact barrier matrices when the base has them
/// and a snapped B(Aᵀy) otherwise; either way Ax = b holds exactly and the
/// exact primal test of K decides membership.
PrimalWitness reconstruct_primal_exact(const ImageCone& ic, const exact::RationalVector& y,
                                       const exact::RationalVector& b, CertKind kind,
                                       const mpz_class& max_denominator = mpz_class("1000000000000"));

/// Rational rounding of an approximate preimage x: snap to denominators
/// 10, 10², …, 10¹², project exactly onto {Ax = b} along range(Aᵀ) and keep
/// the first result that passes the exact primal test of K. Settles boundary
/// points that no interior certificate can reach. nullopt when every cap fails
/// or K has no exact test.
std::optional<PrimalWitness> round_primal_exact(const ImageCone& ic, const Vec& x, const exact::RationalVector& b);

/// Relative gap between ‖−g(Aᵀy) − x*‖ in the B(Aᵀy)⁻¹ norm and ‖−g_A(y) − b‖
/// in the B_A(y)⁻¹ norm.
double lsq_consistency_check(const ImageCone& ic, const Vec& y, const Vec& b);

/// min cᵀx s.t. Ax = b, x ∈ K, handled as the image cone of A_c = [cᵀ; −A].
struct StandardForm {
  OraclePtr base;
  exact::RationalVector c;
  exact::RationalMatrix a;
  exact::RationalVector b;
};

StandardForm standard_form_from_json(const nlohmann::json& j);
nlohmann::json to_json(const StandardForm& sf);

exact::RationalMatrix stacked_matrix(const StandardForm& sf);

/// Throws RankDeficient when A_c loses row rank (c in the row space of A).
ImageCone stack_standard_form(const StandardForm& sf);

/// x_γ = u + γv; A u = b, cᵀu = 0, A v = 0, cᵀv = 1.
struct AffineWitness {
  Vec u;
  Vec v;
  std::optional<exact::RationalVector> u_exact;
  std::optional<exact::RationalVector> v_exact;
  bool rationalised = false;

  Vec at(double gamma) const { return u + gamma * v; }
  exact::RationalVector at(const exact::Rational& gamma) const;
};

nlohmann::json to_json(const AffineWitness& w, bool exact_values = false);

/// Throws NotDualFeasible unless c − Aᵀy is interior in K*.
AffineWitness reconstruct_optimal(const StandardForm& sf, const Vec& y);
AffineWitness reconstruct_optimal_exact(const StandardForm& sf, const exact::RationalVector& y,
                                        const mpz_class& max_denominator = mpz_class("1000000000000"));

/// Smallest γ with x_γ ≥ 0 by a ratio test on (u, v); nullopt when no γ works.
std::optional<exact::Rational> min_gamma_orthant(const AffineWitness& w);

/// Smallest γ in [lo, hi] with x_γ ∈ K, by bisection on the primal margin.
/// `lo` can be bᵀy (weak duality); nullopt when x_hi ∉ K.
std::optional<double> min_gamma(const BarrierOracle& base, const AffineWitness& w, double lo, double hi,
                                double tol = 1e-12);

/// Open interval of γ with ‖(γ,−b)/τ + g(1,y)‖* < r at (1,y) for the stacked
/// barrier (τ = 1 is the unscaled ball). Empty when the discriminant is ≤ 0.
struct GammaInterval {
  bool empty = true;
  double lower = 0.0;
  double upper = 0.0;
  double tau = 1.0;
};

GammaInterval gamma_interval(const StandardForm& sf, const Vec& y, double r, double tau = 1.0);

/// Same, with τ chosen on a log grid over [1e-6, 1e2] plus golden-section
/// refinement to minimise the lower endpoint.
GammaInterval gamma_interval_best(const StandardForm& sf, const Vec& y, double r);

/// ‖−τ g(1,y) − (bᵀy + τν, −b)‖∞ for the stacked barrier.
double on_path_gradient_identity_check(const StandardForm& sf, const Vec& y, double tau);

}  // namespace conecert
