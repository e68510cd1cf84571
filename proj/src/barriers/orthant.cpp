#include <cmath>

#include "conecert/barriers.hpp"
#include "conecert/error.hpp"

namespace conecert {

namespace {

class OrthantOracle final : public BarrierOracle {
 public:
  explicit OrthantOracle(std::size_t n) : n_(n) {
    if (n == 0) throw Error(Errc::DimensionMismatch, "orthant needs n >= 1");
  }

  std::size_t dim() const override { return n_; }
  double nu() const override { return static_cast<double>(n_); }

  double margin(const Vec& y) const override {
    require_dim(y);
    return y.minCoeff();
  }

  BarrierEval eval(const Vec& y) const override {
    require_interior(y);
    BarrierEval ev;
    ev.f = -y.array().log().sum();
    ev.g = -y.cwiseInverse();
    ev.H = y.array().square().inverse().matrix().asDiagonal();
    return ev;
  }

  double value(const Vec& y) const override {
    require_interior(y);
    return -y.array().log().sum();
  }

  Vec reference_point() const override { return Vec::Ones(n_); }
  bool hyperbolic() const override { return true; }
  bool has_exact() const override { return true; }

  ExactEval exact_eval(const exact::RationalVector& y) const override {
    if (y.size() != n_) throw Error(Errc::DimensionMismatch, name());
    ExactEval ev{exact::RationalVector(n_), exact::RationalMatrix(n_, n_)};
    for (std::size_t i = 0; i < n_; ++i) {
      if (sgn(y[i]) <= 0) throw Error(Errc::NotInterior, name() + ": nonpositive entry");
      ev.g[i] = -1 / y[i];
      ev.H(i, i) = 1 / (y[i] * y[i]);
    }
    return ev;
  }

  std::optional<bool> exact_member(const exact::RationalVector& y) const override { return nonneg(y); }

  double primal_margin(const Vec& x) const override {
    require_dim(x);
    return x.minCoeff();
  }

  std::optional<bool> exact_primal_member(const exact::RationalVector& x) const override { return nonneg(x); }

  nlohmann::json to_json() const override { return {{"kind", "Orthant"}, {"n", n_}}; }
  std::string name() const override { return "Orthant(" + std::to_string(n_) + ")"; }

 private:
  bool nonneg(const exact::RationalVector& v) const {
    if (v.size() != n_) throw Error(Errc::DimensionMismatch, name());
    for (const auto& x : v)
      if (sgn(x) < 0) return false;
    return true;
  }

  std::size_t n_;
};

}  // namespace

OraclePtr orthant_oracle(std::size_t n) { return std::make_shared<OrthantOracle>(n); }

}  // namespace conecert
