#include <cmath>
#include <limits>

#include "conecert/barriers.hpp"
#include "conecert/error.hpp"

namespace conecert {

namespace {

class ExpConeOracle final : public BarrierOracle {
 public:
  std::size_t dim() const override { return 3; }
  double nu() const override { return 3.0; }

  double margin(const Vec& x) const override {
    require_dim(x);
    if (!(x(0) > 0.0) || !(x(1) > 0.0)) return std::min(x(0), x(1));
    return std::min({x(0), x(1), psi(x)});
  }

  BarrierEval eval(const Vec& x) const override {
    require_interior(x);
    const double x1 = x(0), x2 = x(1);
    const double p = psi(x);
    Vec dp(3);
    dp << x2 / x1, std::log(x1 / x2) - 1.0, -1.0;
    Mat d2p = Mat::Zero(3, 3);
    d2p(0, 0) = -x2 / (x1 * x1);
    d2p(0, 1) = d2p(1, 0) = 1.0 / x1;
    d2p(1, 1) = -1.0 / x2;

    BarrierEval ev;
    ev.f = -std::log(x1) - std::log(x2) - std::log(p);
    ev.g = -dp / p;
    ev.g(0) -= 1.0 / x1;
    ev.g(1) -= 1.0 / x2;
    ev.H = dp * dp.transpose() / (p * p) - d2p / p;
    ev.H(0, 0) += 1.0 / (x1 * x1);
    ev.H(1, 1) += 1.0 / (x2 * x2);
    return ev;
  }

  Vec reference_point() const override { return Vec{{1.0, 1.0, -1.0}}; }

  // E* = {s₃ < 0, −s₃ e^{s₂/s₃} ≤ e·s₁} ∪ {s₃ = 0, s₁ ≥ 0, s₂ ≥ 0}
  double primal_margin(const Vec& s) const override {
    require_dim(s);
    if (s(2) > 0.0) return -s(2);
    if (s(2) == 0.0) return std::min(s(0), s(1));
    return std::exp(1.0) * s(0) + s(2) * std::exp(s(1) / s(2));
  }

  nlohmann::json to_json() const override { return {{"kind", "ExpCone"}}; }
  std::string name() const override { return "ExpCone"; }

 private:
  static double psi(const Vec& x) { return x(1) * std::log(x(0) / x(1)) - x(2); }
};

}  // namespace

OraclePtr expcone_oracle() { return std::make_shared<ExpConeOracle>(); }

}  // namespace conecert
