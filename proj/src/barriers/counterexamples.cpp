#include <cmath>

#include "conecert/barriers.hpp"

namespace conecert {

namespace {

Vec v3(double a, double b, double c) { return Vec{{a, b, c}}; }

HessianCounterexample evaluate(const BarrierOracle& o, Vec y, Vec z, Vec w, double closed_form, double threshold) {
  HessianCounterexample c;
  c.cone = o.name();
  c.all_interior = o.interior(y) && o.interior(z) && o.interior(w);
  c.value = w.dot(o.eval(y).H * z);
  c.y = std::move(y);
  c.z = std::move(z);
  c.w = std::move(w);
  c.closed_form = closed_form;
  c.threshold = threshold;
  return c;
}

}  // namespace

std::vector<OraclePtr> registered_oracles() {
  using exact::make_rational;
  // univariate Gram map (x00, x01, x11) ↦ (x00, 2x01, x11)
  exact::RationalMatrix sos{{1, 0, 0}, {0, 2, 0}, {0, 0, 1}};
  return {orthant_oracle(3),
          psd_packed_oracle(3),
          expcone_oracle(),
          powercone_oracle({make_rational(1, 5), make_rational(3, 10), make_rational(1, 2)}),
          relentropy_dual_oracle(2),
          pullback_oracle(psd_packed_oracle(2), sos),
          product_oracle({orthant_oracle(2), expcone_oracle()}),
          scaled_oracle(relentropy_dual_oracle(1), Vec{{1.0, std::exp(1.0), 1.0}})};
}

bool HessianCounterexample::reproduced() const {
  return all_interior && std::abs(value - closed_form) <= 1e-9 * std::abs(closed_form) && value < threshold;
}

std::vector<HessianCounterexample> hessian_counterexamples() {
  const double l3 = std::log(3.0), l9 = std::log(9.0);
  const double exp_ref = (l3 * (3211.0 + 904.0 * l3) - 4637.0) / (9.0 * (3.0 + l9) * (3.0 + l9));
  const double c1 = std::cbrt(10.0), c2 = std::cbrt(100.0);
  const double pow_ref = (12871.0 - 443620.0 * c1 + 195500.0 * c2) / (60.0 * (1.0 - 10.0 * c1) * (1.0 - 10.0 * c1));

  auto pc = powercone_oracle({exact::make_rational(2, 3), exact::make_rational(1, 3)});
  return {evaluate(*expcone_oracle(), v3(6, 2, -3), v3(2, 4, -3), v3(416, 1, 6), exp_ref, -0.075),
          evaluate(*pc, v3(10, 1, 1), v3(1, 20, 2), v3(355, 1, 50), pow_ref, -1.399)};
}

nlohmann::json to_json(const HessianCounterexample& c) {
  return {{"cone", c.cone},
          {"value", c.value},
          {"closed_form", c.closed_form},
          {"threshold", c.threshold},
          {"all_interior", c.all_interior},
          {"reproduced", c.reproduced()}};
}

}  // namespace conecert
