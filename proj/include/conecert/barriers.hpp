#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "conecert/kernels.hpp"
#include "conecert/oracle.hpp"

namespace conecert {

/// −Σ ln yᵢ on the nonnegative orthant (self-dual).
OraclePtr orthant_oracle(std::size_t n);

/// −ln det Λ(y) for Λ(y) = Σ y_p Λ_p, Λ_p symmetric M×M with rational
/// entries. Primal membership is only available for the packed basis.
OraclePtr logdet_oracle(std::size_t m, kernels::SymBasis<exact::Rational> basis);

/// Packed upper triangle, row-major: (0,0),(0,1),…,(0,M−1),(1,1),…
/// Λ(y) has y on the diagonal and y/2 off it, so with the plain dot product
/// the cone is self-dual: x packs X with plain entries, y pairs as ⟨X, Λ(y)⟩.
OraclePtr psd_packed_oracle(std::size_t m);
std::size_t packed_dim(std::size_t m);
std::size_t packed_index(std::size_t i, std::size_t j, std::size_t m);
Mat unpack_symmetric(const Vec& x, std::size_t m);
exact::RationalMatrix unpack_symmetric(const exact::RationalVector& x, std::size_t m);

/// f(x) = −ln x₁ − ln x₂ − ln(x₂ ln(x₁/x₂) − x₃).
OraclePtr expcone_oracle();

/// f(v,z) = −ln(∏vᵢ^{2λᵢ} − z²) − Σ(1−λᵢ) ln vᵢ on P_λ, coordinates (v₁…v_r, z).
OraclePtr powercone_oracle(exact::RationalVector lambda);

/// f(u,v,w) = −Σ ln(wᵢ − u ln(u/vᵢ) + u) − N ln u − Σ ln vᵢ, coordinates
/// (u, v₁…v_N, w₁…w_N). The primal cone is {(U,V,W) : U ≥ Σ Wᵢ ln(Wᵢ/Vᵢ)}.
OraclePtr relentropy_dual_oracle(std::size_t n);

class ProductOracle final : public BarrierOracle {
 public:
  explicit ProductOracle(std::vector<OraclePtr> parts);

  std::size_t dim() const override { return dim_; }
  double nu() const override { return nu_; }
  double margin(const Vec& y) const override;
  BarrierEval eval(const Vec& y) const override;
  double value(const Vec& y) const override;
  Vec reference_point() const override;
  bool hyperbolic() const override;
  bool has_exact() const override;
  ExactEval exact_eval(const exact::RationalVector& y) const override;
  std::optional<bool> exact_member(const exact::RationalVector& y) const override;
  double primal_margin(const Vec& x) const override;
  std::optional<bool> exact_primal_member(const exact::RationalVector& x) const override;
  nlohmann::json to_json() const override;
  std::string name() const override;

  const std::vector<OraclePtr>& parts() const noexcept { return parts_; }
  const std::vector<std::size_t>& offsets() const noexcept { return offsets_; }

 private:
  std::vector<OraclePtr> parts_;
  std::vector<std::size_t> offsets_;
  std::size_t dim_ = 0;
  double nu_ = 0.0;
};

OraclePtr product_oracle(std::vector<OraclePtr> parts);

/// f_A(y) = f(Aᵀy) for A with full row rank. Construction runs a phase-1
/// search for y with Aᵀy interior and then centers it.
class PullbackOracle final : public BarrierOracle {
 public:
  PullbackOracle(OraclePtr base, exact::RationalMatrix a);
  PullbackOracle(OraclePtr base, exact::RationalMatrix a, Vec reference);

  std::size_t dim() const override { return static_cast<std::size_t>(a_.rows()); }
  double nu() const override { return base_->nu(); }
  double margin(const Vec& y) const override;
  BarrierEval eval(const Vec& y) const override;
  double value(const Vec& y) const override;
  Vec reference_point() const override { return reference_; }
  bool hyperbolic() const override { return base_->hyperbolic(); }
  bool has_exact() const override { return base_->has_exact(); }
  ExactEval exact_eval(const exact::RationalVector& y) const override;
  std::optional<bool> exact_member(const exact::RationalVector& y) const override;
  double primal_margin(const Vec& x) const override;
  std::optional<bool> exact_primal_member(const exact::RationalVector& x) const override;
  nlohmann::json to_json() const override;
  std::string name() const override;

  const OraclePtr& base() const noexcept { return base_; }
  const Mat& a() const noexcept { return a_; }
  const exact::RationalMatrix& a_exact() const noexcept { return a_exact_; }

 private:
  void check_shape() const;
  Vec find_interior() const;

  OraclePtr base_;
  exact::RationalMatrix a_exact_;
  Mat a_;
  Vec reference_;
};

OraclePtr pullback_oracle(OraclePtr base, exact::RationalMatrix a);

/// Primal cone {x : diag(s)x ∈ K} for positive (possibly irrational) s; its
/// dual barrier is f(y ⊘ s). No exact evaluation.
OraclePtr scaled_oracle(OraclePtr base, Vec scale);

/// One representative of every barrier family (orthant, log-det, exp cone,
/// power cone, relative-entropy dual, pullback, product, scaled), used by
/// self-checks.
std::vector<OraclePtr> registered_oracles();

/// Interior y, z, w with ⟨w, H(y)z⟩ < 0: H(y)z leaves the dual cone, so
/// H-certificates are unsound on the cone in question.
struct HessianCounterexample {
  std::string cone;
  Vec y, z, w;
  double value = 0.0;
  double closed_form = 0.0;
  /// The value must also fall below this.
  double threshold = 0.0;
  bool all_interior = false;

  bool reproduced() const;
};

/// Exp-cone triple (6,2,−3), (2,4,−3), (416,1,6) and power-cone (λ = (2/3,1/3))
/// triple (10,1,1), (1,20,2), (355,1,50), each with its closed-form value.
std::vector<HessianCounterexample> hessian_counterexamples();
nlohmann::json to_json(const HessianCounterexample& c);

/// ConeSpec JSON: {"kind": "Orthant", "n": 3}, {"kind": "PsdLogDet", "M": 2
/// [, "basis": [[[i, j, "v"], …], …]]}, {"kind": "ExpCone"},
/// {"kind": "PowerCone", "lambda": ["2/3", "1/3"]}, {"kind": "RelEntropyDual",
/// "N": 2}, {"kind": "Product", "parts": [...]}, {"kind": "Pullback", "base":
/// {...}, "A": [["1", "0"], …]}, {"kind": "Scaled", "base": {...}, "scale": [2.5, …]}.
OraclePtr oracle_from_json(const nlohmann::json& j);

nlohmann::json rational_matrix_to_json(const exact::RationalMatrix& m);
exact::RationalMatrix rational_matrix_from_json(const nlohmann::json& j);
nlohmann::json rational_vector_to_json(const exact::RationalVector& v);
exact::RationalVector rational_vector_from_json(const nlohmann::json& j);
exact::Rational rational_from_json(const nlohmann::json& j);

}  // namespace conecert
