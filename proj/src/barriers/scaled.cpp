#include "conecert/barriers.hpp"
#include "conecert/error.hpp"

namespace conecert {

namespace {

class ScaledOracle final : public BarrierOracle {
 public:
  ScaledOracle(OraclePtr base, Vec scale) : base_(std::move(base)), scale_(std::move(scale)) {
    if (!base_) throw Error(Errc::ConfigError, "scaling of a null cone");
    if (static_cast<std::size_t>(scale_.size()) != base_->dim())
      throw Error(Errc::DimensionMismatch, "scale vector does not match the cone dimension");
    if (!(scale_.minCoeff() > 0.0)) throw Error(Errc::ConfigError, "scale factors must be positive");
  }

  std::size_t dim() const override { return base_->dim(); }
  double nu() const override { return base_->nu(); }
  double margin(const Vec& y) const override {
    require_dim(y);
    return base_->margin(unscale(y));
  }

  BarrierEval eval(const Vec& y) const override {
    require_dim(y);
    BarrierEval ev = base_->eval(unscale(y));
    const Vec inv = scale_.cwiseInverse();
    ev.g = ev.g.cwiseProduct(inv);
    ev.H = inv.asDiagonal() * ev.H * inv.asDiagonal();
    return ev;
  }

  double value(const Vec& y) const override { return base_->value(unscale(y)); }
  Vec reference_point() const override { return base_->reference_point().cwiseProduct(scale_); }
  bool hyperbolic() const override { return base_->hyperbolic(); }

  double primal_margin(const Vec& x) const override {
    require_dim(x);
    return base_->primal_margin(x.cwiseProduct(scale_));
  }

  nlohmann::json to_json() const override {
    return {{"kind", "Scaled"}, {"base", base_->to_json()}, {"scale", std::vector<double>(scale_.data(), scale_.data() + scale_.size())}};
  }
  std::string name() const override { return "Scaled(" + base_->name() + ")"; }

 private:
  Vec unscale(const Vec& y) const { return y.cwiseQuotient(scale_); }

  OraclePtr base_;
  Vec scale_;
};

}  // namespace

OraclePtr scaled_oracle(OraclePtr base, Vec scale) {
  return std::make_shared<ScaledOracle>(std::move(base), std::move(scale));
}

}  // namespace conecert
