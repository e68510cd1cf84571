#include <cmath>
#include <limits>
#include <numeric>

#include "conecert/barriers.hpp"
#include "conecert/error.hpp"

namespace conecert {

namespace {

mpq_class pow_q(const mpq_class& base, unsigned long e) {
  mpz_class n, d;
  mpz_pow_ui(n.get_mpz_t(), base.get_num_mpz_t(), e);
  mpz_pow_ui(d.get_mpz_t(), base.get_den_mpz_t(), e);
  mpq_class r(n, d);
  r.canonicalize();
  return r;
}

class PowerConeOracle final : public BarrierOracle {
 public:
  explicit PowerConeOracle(exact::RationalVector lambda) : lambda_(std::move(lambda)) {
    if (lambda_.size() < 2) throw Error(Errc::ConfigError, "power cone needs at least two weights");
    exact::Rational total = 0;
    for (const auto& l : lambda_) {
      if (sgn(l) <= 0 || l >= 1) throw Error(Errc::ConfigError, "power cone weights must lie in (0,1)");
      total += l;
    }
    if (total != 1) throw Error(Errc::ConfigError, "power cone weights must sum to 1");
    lam_ = to_eigen(lambda_);
    mpz_class q = 1;
    for (const auto& l : lambda_) mpz_lcm(q.get_mpz_t(), q.get_mpz_t(), l.get_den_mpz_t());
    if (!q.fits_ulong_p()) throw Error(Errc::ConfigError, "power cone weight denominators too large");
    q_ = q.get_ui();
    for (const auto& l : lambda_) {
      mpq_class p = l * q;
      p_.push_back(p.get_num().get_ui());
    }
  }

  std::size_t r() const { return lambda_.size(); }
  std::size_t dim() const override { return r() + 1; }
  double nu() const override { return static_cast<double>(r() + 1); }

  double margin(const Vec& y) const override {
    require_dim(y);
    Vec v = y.head(r());
    double vmin = v.minCoeff();
    if (!(vmin > 0.0)) return vmin;
    double geo = std::exp(lam_.dot(v.array().log().matrix()));
    return std::min(vmin, geo - std::abs(y(r())));
  }

  BarrierEval eval(const Vec& y) const override {
    require_interior(y);
    const std::size_t n = r();
    Vec v = y.head(n);
    const double z = y(n);
    const double prod = std::exp(2.0 * lam_.dot(v.array().log().matrix()));
    const double phi = prod - z * z;

    Vec dphi(n + 1);
    Mat d2phi = Mat::Zero(n + 1, n + 1);
    for (std::size_t i = 0; i < n; ++i) {
      dphi(i) = 2.0 * lam_(i) * prod / v(i);
      for (std::size_t j = 0; j < n; ++j) d2phi(i, j) = 4.0 * lam_(i) * lam_(j) * prod / (v(i) * v(j));
      d2phi(i, i) -= 2.0 * lam_(i) * prod / (v(i) * v(i));
    }
    dphi(n) = -2.0 * z;
    d2phi(n, n) = -2.0;

    BarrierEval ev;
    ev.f = -std::log(phi);
    ev.g = -dphi / phi;
    ev.H = dphi * dphi.transpose() / (phi * phi) - d2phi / phi;
    for (std::size_t i = 0; i < n; ++i) {
      const double w = 1.0 - lam_(i);
      ev.f -= w * std::log(v(i));
      ev.g(i) -= w / v(i);
      ev.H(i, i) += w / (v(i) * v(i));
    }
    return ev;
  }

  Vec reference_point() const override {
    Vec y = Vec::Ones(dim());
    y(r()) = 0.0;
    return y;
  }

  // P_λ: v ≥ 0, |z|^q ≤ ∏ vᵢ^{pᵢ} with λᵢ = pᵢ/q
  std::optional<bool> exact_member(const exact::RationalVector& y) const override {
    return exact_test(y, false);
  }

  // P*_λ: |z| ≤ ∏ (vᵢ/λᵢ)^{λᵢ}
  double primal_margin(const Vec& x) const override {
    require_dim(x);
    Vec v = x.head(r());
    double vmin = v.minCoeff();
    if (vmin < 0.0) return vmin;
    double geo = 0.0;
    if (vmin > 0.0) geo = std::exp(lam_.dot((v.array() / lam_.array()).log().matrix()));
    return std::min(vmin, geo - std::abs(x(r())));
  }

  std::optional<bool> exact_primal_member(const exact::RationalVector& x) const override {
    return exact_test(x, true);
  }

  nlohmann::json to_json() const override {
    return {{"kind", "PowerCone"}, {"lambda", rational_vector_to_json(lambda_)}};
  }

  std::string name() const override {
    std::string s = "PowerCone(";
    for (std::size_t i = 0; i < lambda_.size(); ++i) s += (i ? "," : "") + exact::to_string(lambda_[i]);
    return s + ")";
  }

 private:
  bool exact_test(const exact::RationalVector& y, bool dual_weights) const {
    if (y.size() != dim()) throw Error(Errc::DimensionMismatch, name());
    exact::Rational rhs = 1;
    for (std::size_t i = 0; i < r(); ++i) {
      if (sgn(y[i]) < 0) return false;
      exact::Rational base = dual_weights ? exact::Rational(y[i] / lambda_[i]) : y[i];
      rhs *= pow_q(base, p_[i]);
    }
    exact::Rational lhs = pow_q(abs(y[r()]), q_);
    return lhs <= rhs;
  }

  exact::RationalVector lambda_;
  Vec lam_;
  unsigned long q_ = 1;
  std::vector<unsigned long> p_;
};

}  // namespace

OraclePtr powercone_oracle(exact::RationalVector lambda) { return std::make_shared<PowerConeOracle>(std::move(lambda)); }

}  // namespace conecert
