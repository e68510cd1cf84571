#include <cmath>

#include "conecert/barriers.hpp"
#include "conecert/error.hpp"

namespace conecert {

PullbackOracle::PullbackOracle(OraclePtr base, exact::RationalMatrix a)
    : base_(std::move(base)), a_exact_(std::move(a)), a_(to_eigen(a_exact_)) {
  check_shape();
  reference_ = find_interior();
}

PullbackOracle::PullbackOracle(OraclePtr base, exact::RationalMatrix a, Vec reference)
    : base_(std::move(base)), a_exact_(std::move(a)), a_(to_eigen(a_exact_)), reference_(std::move(reference)) {
  check_shape();
  if (!(margin(reference_) > 0.0)) throw Error(Errc::NotInterior, name() + ": supplied reference point");
}

void PullbackOracle::check_shape() const {
  if (!base_) throw Error(Errc::ConfigError, "pullback of a null cone");
  if (static_cast<std::size_t>(a_.cols()) != base_->dim())
    throw Error(Errc::DimensionMismatch, "pullback matrix has " + std::to_string(a_.cols()) + " columns, base dimension is " +
                                             std::to_string(base_->dim()));
  if (a_.rows() == 0 || numeric_rank(a_) != a_.rows())
    throw Error(Errc::RankDeficient, "pullback matrix does not have full row rank");
}

Vec PullbackOracle::find_interior() const {
  const Vec s0 = base_->reference_point();
  const Eigen::Index m = a_.rows();
  Vec y = (a_ * a_.transpose()).ldlt().solve(a_ * s0);

  if (!(base_->margin(a_.transpose() * y) > 0.0)) {
    // Ã = [A; s₀ᵀ] is interior at (0,…,0,1); push the last coordinate down.
    exact::RationalMatrix aug(m + 1, a_.cols());
    for (Eigen::Index i = 0; i < m; ++i)
      for (Eigen::Index j = 0; j < a_.cols(); ++j) aug(i, j) = a_exact_(i, j);
    const exact::RationalVector s0q = to_rational(s0);
    for (Eigen::Index j = 0; j < a_.cols(); ++j) aug(m, j) = s0q[j];
    Vec start = Vec::Zero(m + 1);
    start(m) = 1.0;
    Mat af = to_eigen(aug);
    if (numeric_rank(af) != m + 1) throw Error(Errc::EmptyInterior, name() + ": no interior dual point found");
    PullbackOracle aux(base_, aug, start);

    auto found = [&](const Vec& yt) { return base_->margin(a_.transpose() * yt.head(m)) > 0.0; };
    NewtonOptions opt;
    opt.tol = 1e-6;
    opt.max_iters = 100;
    opt.stop = found;
    Vec yt = start;
    bool ok = false;
    for (double sigma = 1.0; sigma <= 1e10; sigma *= 4.0) {
      Vec c = Vec::Zero(m + 1);
      c(m) = sigma;
      yt = newton_minimize(aux, c, yt, opt).y;
      if (found(yt)) {
        ok = true;
        break;
      }
    }
    if (!ok) throw Error(Errc::EmptyInterior, name() + ": no interior dual point found");
    y = yt.head(m);
  }

  // Recenter at the y with −g_A(y) = A·(−g(s₀)), a point well inside.
  Vec x0 = -base_->eval(s0).g;
  PullbackOracle self(base_, a_exact_, y);
  NewtonOptions opt;
  opt.tol = 1e-9;
  opt.max_iters = 200;
  NewtonResult r = newton_minimize(self, a_ * x0, y, opt);
  if (r.converged || margin(r.y) > 0.0) return r.y;
  return y;
}

double PullbackOracle::margin(const Vec& y) const {
  require_dim(y);
  return base_->margin(a_.transpose() * y);
}

BarrierEval PullbackOracle::eval(const Vec& y) const {
  require_dim(y);
  BarrierEval b = base_->eval(a_.transpose() * y);
  BarrierEval ev;
  ev.f = b.f;
  ev.g = a_ * b.g;
  ev.H = kernels::congruence(a_, b.H);
  return ev;
}

double PullbackOracle::value(const Vec& y) const {
  require_dim(y);
  return base_->value(a_.transpose() * y);
}

ExactEval PullbackOracle::exact_eval(const exact::RationalVector& y) const {
  if (y.size() != dim()) throw Error(Errc::DimensionMismatch, name());
  const exact::RationalMatrix at = a_exact_.transpose();
  ExactEval b = base_->exact_eval(at * y);
  return {a_exact_ * b.g, a_exact_ * b.H * at};
}

std::optional<bool> PullbackOracle::exact_member(const exact::RationalVector& y) const {
  if (y.size() != dim()) throw Error(Errc::DimensionMismatch, name());
  return base_->exact_member(a_exact_.transpose() * y);
}

double PullbackOracle::primal_margin(const Vec& x) const {
  require_dim(x);
  if (a_.rows() != a_.cols()) return BarrierOracle::primal_margin(x);
  return base_->primal_margin(a_.partialPivLu().solve(x));
}

std::optional<bool> PullbackOracle::exact_primal_member(const exact::RationalVector& x) const {
  if (a_.rows() != a_.cols()) return std::nullopt;
  return base_->exact_primal_member(exact::solve(a_exact_, x));
}

nlohmann::json PullbackOracle::to_json() const {
  return {{"kind", "Pullback"}, {"base", base_->to_json()}, {"A", rational_matrix_to_json(a_exact_)}};
}

std::string PullbackOracle::name() const {
  return "Pullback(" + base_->name() + "," + std::to_string(a_.rows()) + "x" + std::to_string(a_.cols()) + ")";
}

OraclePtr pullback_oracle(OraclePtr base, exact::RationalMatrix a) {
  return std::make_shared<PullbackOracle>(std::move(base), std::move(a));
}

}  // namespace conecert
