#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <string>

#include <json.hpp>

#include "conecert/exact/linalg.hpp"
#include "conecert/linalg.hpp"

namespace conecert {

struct BarrierEval {
  double f = 0.0;
  Vec g;
  Mat H;
};

struct ExactEval {
  exact::RationalVector g;
  exact::RationalMatrix H;
};

/// Logarithmically homogeneous self-concordant barrier on a closed convex
/// cone C (in this library C is always the dual cone K* of the cone whose
/// membership is being certified). `y` ranges over C, primal vectors `x` over
/// K = C*.
class BarrierOracle {
 public:
  virtual ~BarrierOracle() = default;

  virtual std::size_t dim() const = 0;
  virtual double nu() const = 0;

  /// Smallest slack of the defining inequalities of C at y. Positive iff y is
  /// strictly interior; nonnegative iff y ∈ C (up to rounding).
  virtual double margin(const Vec& y) const = 0;
  bool interior(const Vec& y) const { return margin(y) > 0.0; }

  /// Throws Errc::NotInterior outside the interior.
  virtual BarrierEval eval(const Vec& y) const = 0;
  virtual double value(const Vec& y) const { return eval(y).f; }

  /// Some strictly interior point of C.
  virtual Vec reference_point() const = 0;

  /// H-certificates are only accepted for log-det type barriers.
  virtual bool hyperbolic() const { return false; }

  virtual bool has_exact() const { return false; }
  virtual ExactEval exact_eval(const exact::RationalVector& y) const;
  /// Exact membership y ∈ C; nullopt when not decidable in rationals.
  virtual std::optional<bool> exact_member(const exact::RationalVector& y) const;

  /// Membership slack of x in K = C*. Nonnegative iff x ∈ K.
  virtual double primal_margin(const Vec& x) const;
  virtual std::optional<bool> exact_primal_member(const exact::RationalVector& x) const;

  virtual nlohmann::json to_json() const = 0;
  virtual std::string name() const = 0;

 protected:
  void require_dim(const Vec& y) const;
  void require_interior(const Vec& y) const;
};

using OraclePtr = std::shared_ptr<const BarrierOracle>;

struct InteriorPoint {
  Vec coords;
  double margin = 0.0;
};

InteriorPoint make_interior_point(const BarrierOracle& oracle, const Vec& y);

/// Cached Cholesky factor of H at a fixed center.
class LocalNormContext {
 public:
  LocalNormContext(const BarrierOracle& oracle, const Vec& center);
  LocalNormContext(const InteriorPoint& center, const BarrierEval& ev);

  const InteriorPoint& center() const noexcept { return center_; }
  const BarrierEval& eval() const noexcept { return eval_; }
  const Eigen::LLT<Mat>& factor() const noexcept { return llt_; }

  /// H⁻¹v via the stored factor.
  Vec solve(const Vec& v) const;

  double local_norm(const Vec& v) const;
  double dual_local_norm(const Vec& v) const;
  bool dikin_contains(const Vec& point, double radius, bool dual) const;

 private:
  void factorize();

  InteriorPoint center_;
  BarrierEval eval_;
  Eigen::LLT<Mat> llt_;
};

double local_norm(const LocalNormContext& ctx, const Vec& v);
double dual_local_norm(const LocalNormContext& ctx, const Vec& v);
bool dikin_contains(const LocalNormContext& ctx, const Vec& point, double radius, bool dual);

/// Random interior point: a short Dikin walk from the reference point
/// followed by a random positive rescaling.
Vec sample_interior(const BarrierOracle& oracle, std::mt19937_64& rng, int walk_steps = 4);

struct SelfCheckReport {
  std::string oracle;
  int samples = 0;
  double grad_fd_error = 0.0;
  double hess_fd_error = 0.0;
  double hy_plus_g = 0.0;
  double nu_error = 0.0;
  double homogeneity_error = 0.0;

  bool passed() const {
    return grad_fd_error <= 1e-4 && hess_fd_error <= 1e-3 && hy_plus_g <= 1e-8 && nu_error <= 1e-8 &&
           homogeneity_error <= 1e-8;
  }
};

SelfCheckReport lhscb_selfcheck(const BarrierOracle& oracle, int samples, std::uint64_t seed);
SelfCheckReport lhscb_selfcheck_at(const BarrierOracle& oracle, const Vec& y);
nlohmann::json to_json(const SelfCheckReport& r);

struct NewtonResult {
  Vec y;
  double decrement = 0.0;
  int iterations = 0;
  bool converged = false;
};

struct NewtonOptions {
  double tol = 1e-10;
  int max_iters = 200;
  /// Rows of E: the iterates keep E·y fixed.
  Mat equality;
  /// Checked after every accepted step; returning true stops early.
  std::function<bool(const Vec&)> stop;
};

/// Damped Newton on y ↦ f(y) + cᵀy: step 1/(1+λ) while λ > 1/4, full steps
/// after, backtracking on loss of interiority. λ is the Newton decrement
/// (projected onto the null space of E when given).
NewtonResult newton_minimize(const BarrierOracle& oracle, const Vec& c, Vec y0, const NewtonOptions& opt);

/// Newton direction Δ = −H⁻¹(r − Eᵀμ) with E·Δ = 0; returns Δ and μ.
struct ProjectedStep {
  Vec delta;
  Vec mu;
  double decrement = 0.0;
};
ProjectedStep projected_newton_step(const LocalNormContext& ctx, const Vec& r, const Mat& equality);

}  // namespace conecert
