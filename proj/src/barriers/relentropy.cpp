#include <cmath>
#include <limits>

#include "conecert/barriers.hpp"
#include "conecert/error.hpp"

namespace conecert {

namespace {

class RelEntropyDualOracle final : public BarrierOracle {
 public:
  explicit RelEntropyDualOracle(std::size_t n) : n_(n) {
    if (n == 0) throw Error(Errc::DimensionMismatch, "relative entropy cone needs N >= 1");
  }

  std::size_t dim() const override { return 2 * n_ + 1; }
  double nu() const override { return 3.0 * static_cast<double>(n_); }

  double margin(const Vec& y) const override {
    require_dim(y);
    const double u = y(0);
    double m = u;
    for (std::size_t i = 0; i < n_; ++i) m = std::min(m, y(1 + i));
    if (!(m > 0.0)) return m;
    for (std::size_t i = 0; i < n_; ++i) m = std::min(m, psi(y, i));
    return m;
  }

  BarrierEval eval(const Vec& y) const override {
    require_interior(y);
    const std::size_t d = dim();
    const double u = y(0);
    BarrierEval ev;
    ev.f = -static_cast<double>(n_) * std::log(u);
    ev.g = Vec::Zero(d);
    ev.H = Mat::Zero(d, d);
    ev.g(0) = -static_cast<double>(n_) / u;
    ev.H(0, 0) = static_cast<double>(n_) / (u * u);
    for (std::size_t i = 0; i < n_; ++i) {
      const std::size_t iv = 1 + i, iw = 1 + n_ + i;
      const double v = y(iv);
      const double p = psi(y, i);
      // ψ has gradient (ln(v/u), u/v, 1) on (u, vᵢ, wᵢ)
      const double gu = std::log(v / u), gv = u / v;
      const std::size_t idx[3] = {0, iv, iw};
      const double grad[3] = {gu, gv, 1.0};
      for (int a = 0; a < 3; ++a) {
        ev.g(idx[a]) -= grad[a] / p;
        for (int b = 0; b < 3; ++b) ev.H(idx[a], idx[b]) += grad[a] * grad[b] / (p * p);
      }
      ev.H(0, 0) += 1.0 / (u * p);
      ev.H(0, iv) -= 1.0 / (v * p);
      ev.H(iv, 0) -= 1.0 / (v * p);
      ev.H(iv, iv) += u / (v * v * p);

      ev.f -= std::log(p) + std::log(v);
      ev.g(iv) -= 1.0 / v;
      ev.H(iv, iv) += 1.0 / (v * v);
    }
    return ev;
  }

  Vec reference_point() const override { return Vec::Ones(dim()); }

  // R_N = {(U,V,W) : V, W ≥ 0, U ≥ Σ Wᵢ ln(Wᵢ/Vᵢ)}
  double primal_margin(const Vec& x) const override {
    require_dim(x);
    double m = std::numeric_limits<double>::infinity();
    double ent = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      const double v = x(1 + i), w = x(1 + n_ + i);
      m = std::min({m, v, w});
      if (w > 0.0) ent += v > 0.0 ? w * std::log(w / v) : std::numeric_limits<double>::infinity();
    }
    if (m < 0.0) return m;
    return std::min(m, x(0) - ent);
  }

  nlohmann::json to_json() const override { return {{"kind", "RelEntropyDual"}, {"N", n_}}; }
  std::string name() const override { return "RelEntropyDual(" + std::to_string(n_) + ")"; }

 private:
  double psi(const Vec& y, std::size_t i) const {
    const double u = y(0), v = y(1 + i), w = y(1 + n_ + i);
    return w - u * std::log(u / v) + u;
  }

  std::size_t n_;
};

}  // namespace

OraclePtr relentropy_dual_oracle(std::size_t n) { return std::make_shared<RelEntropyDualOracle>(n); }

}  // namespace conecert
