#include "conecert/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "conecert/error.hpp"

namespace conecert {

ExactEval BarrierOracle::exact_eval(const exact::RationalVector&) const {
  throw Error(Errc::ExactUnavailable, name() + " barrier has no rational evaluation");
}

std::optional<bool> BarrierOracle::exact_member(const exact::RationalVector&) const { return std::nullopt; }

double BarrierOracle::primal_margin(const Vec&) const {
  throw Error(Errc::UnsupportedShape, name() + " has no primal membership test");
}

std::optional<bool> BarrierOracle::exact_primal_member(const exact::RationalVector&) const { return std::nullopt; }

void BarrierOracle::require_dim(const Vec& y) const {
  if (static_cast<std::size_t>(y.size()) != dim())
    throw Error(Errc::DimensionMismatch,
                name() + ": expected dimension " + std::to_string(dim()) + ", got " + std::to_string(y.size()));
}

void BarrierOracle::require_interior(const Vec& y) const {
  require_dim(y);
  double m = margin(y);
  if (!(m > 0.0)) throw Error(Errc::NotInterior, name() + ": point is not interior (margin " + std::to_string(m) + ")");
}

InteriorPoint make_interior_point(const BarrierOracle& oracle, const Vec& y) {
  double m = oracle.margin(y);
  if (!(m > 0.0)) throw Error(Errc::NotInterior, oracle.name() + ": point is not interior");
  return {y, m};
}

LocalNormContext::LocalNormContext(const BarrierOracle& oracle, const Vec& center)
    : center_(make_interior_point(oracle, center)), eval_(oracle.eval(center)) {
  factorize();
}

LocalNormContext::LocalNormContext(const InteriorPoint& center, const BarrierEval& ev) : center_(center), eval_(ev) {
  factorize();
}

void LocalNormContext::factorize() {
  llt_.compute(eval_.H);
  if (llt_.info() != Eigen::Success) throw Error(Errc::SingularMatrix, "Hessian is not numerically positive definite");
}

Vec LocalNormContext::solve(const Vec& v) const {
  if (v.size() != eval_.H.rows()) throw Error(Errc::DimensionMismatch, "local solve");
  return llt_.solve(v);
}

double LocalNormContext::local_norm(const Vec& v) const {
  if (v.size() != eval_.H.rows()) throw Error(Errc::DimensionMismatch, "local norm");
  return (llt_.matrixU() * v).norm();
}

double LocalNormContext::dual_local_norm(const Vec& v) const {
  if (v.size() != eval_.H.rows()) throw Error(Errc::DimensionMismatch, "dual local norm");
  return llt_.matrixL().solve(v).norm();
}

bool LocalNormContext::dikin_contains(const Vec& point, double radius, bool dual) const {
  if (!(radius > 0.0)) throw Error(Errc::ConfigError, "Dikin radius must be positive");
  if (point.size() != center_.coords.size()) throw Error(Errc::DimensionMismatch, "Dikin point");
  Vec d = point - center_.coords;
  return (dual ? dual_local_norm(d) : local_norm(d)) < radius;
}

double local_norm(const LocalNormContext& ctx, const Vec& v) { return ctx.local_norm(v); }
double dual_local_norm(const LocalNormContext& ctx, const Vec& v) { return ctx.dual_local_norm(v); }
bool dikin_contains(const LocalNormContext& ctx, const Vec& point, double radius, bool dual) {
  return ctx.dikin_contains(point, radius, dual);
}

Vec sample_interior(const BarrierOracle& oracle, std::mt19937_64& rng, int walk_steps) {
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Vec y = oracle.reference_point();
  for (int k = 0; k < walk_steps; ++k) {
    LocalNormContext ctx(oracle, y);
    Vec u(y.size());
    for (Eigen::Index i = 0; i < u.size(); ++i) u(i) = normal(rng);
    // ‖L⁻ᵀu‖_y = ‖u‖
    Vec d = ctx.factor().matrixU().solve(u);
    d *= 0.5 * unit(rng) / u.norm();
    y += d;
  }
  std::uniform_real_distribution<double> logscale(std::log(0.5), std::log(2.0));
  return y * std::exp(logscale(rng));
}

namespace {

double rel_inf(const Vec& err, const Vec& ref) { return err.lpNorm<Eigen::Infinity>() / std::max(ref.lpNorm<Eigen::Infinity>(), 1e-300); }

double rel_max(const Mat& err, const Mat& ref) {
  return err.cwiseAbs().maxCoeff() / std::max(ref.cwiseAbs().maxCoeff(), 1e-300);
}

// Central-difference step that keeps y ± h·e_j interior.
double fd_step(const BarrierOracle& oracle, const Vec& y, Eigen::Index j) {
  double h = 1e-6 * std::max(y.lpNorm<Eigen::Infinity>(), 1e-3);
  for (int k = 0; k < 40; ++k) {
    Vec p = y, m = y;
    p(j) += h;
    m(j) -= h;
    if (oracle.margin(p) > 0.0 && oracle.margin(m) > 0.0) return h;
    h *= 0.5;
  }
  throw Error(Errc::NotInterior, oracle.name() + ": no interior finite-difference step");
}

}  // namespace

SelfCheckReport lhscb_selfcheck_at(const BarrierOracle& oracle, const Vec& y) {
  if (static_cast<std::size_t>(y.size()) != oracle.dim()) throw Error(Errc::DimensionMismatch, "self-check point");
  SelfCheckReport r;
  r.oracle = oracle.name();
  r.samples = 1;
  if (!(oracle.margin(y) > 0.0)) throw Error(Errc::NotInterior, oracle.name() + ": self-check sample not interior");
  BarrierEval ev = oracle.eval(y);
  const Eigen::Index n = y.size();

  Vec gfd(n);
  Mat hfd(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double h = fd_step(oracle, y, j);
    Vec p = y, m = y;
    p(j) += h;
    m(j) -= h;
    BarrierEval ep = oracle.eval(p), em = oracle.eval(m);
    gfd(j) = (ep.f - em.f) / (2 * h);
    hfd.col(j) = (ep.g - em.g) / (2 * h);
  }
  r.grad_fd_error = rel_inf(gfd - ev.g, ev.g);
  r.hess_fd_error = rel_max(hfd - ev.H, ev.H);
  r.hy_plus_g = rel_inf(ev.H * y + ev.g, ev.g);
  r.nu_error = std::abs(y.dot(ev.H * y) - oracle.nu()) / oracle.nu();
  for (double t : {0.5, 2.0}) {
    BarrierEval et = oracle.eval(t * y);
    r.homogeneity_error = std::max(r.homogeneity_error, rel_inf(t * et.g - ev.g, ev.g));
    r.homogeneity_error = std::max(r.homogeneity_error, rel_max(t * t * et.H - ev.H, ev.H));
  }
  return r;
}

SelfCheckReport lhscb_selfcheck(const BarrierOracle& oracle, int samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  SelfCheckReport total;
  total.oracle = oracle.name();
  for (int s = 0; s < samples; ++s) {
    Vec y = sample_interior(oracle, rng);
    SelfCheckReport r = lhscb_selfcheck_at(oracle, y);
    total.grad_fd_error = std::max(total.grad_fd_error, r.grad_fd_error);
    total.hess_fd_error = std::max(total.hess_fd_error, r.hess_fd_error);
    total.hy_plus_g = std::max(total.hy_plus_g, r.hy_plus_g);
    total.nu_error = std::max(total.nu_error, r.nu_error);
    total.homogeneity_error = std::max(total.homogeneity_error, r.homogeneity_error);
    ++total.samples;
  }
  return total;
}

nlohmann::json to_json(const SelfCheckReport& r) {
  return {{"oracle", r.oracle},
          {"samples", r.samples},
          {"grad_fd_error", r.grad_fd_error},
          {"hess_fd_error", r.hess_fd_error},
          {"hy_plus_g", r.hy_plus_g},
          {"nu_error", r.nu_error},
          {"homogeneity_error", r.homogeneity_error},
          {"passed", r.passed()}};
}

ProjectedStep projected_newton_step(const LocalNormContext& ctx, const Vec& r, const Mat& equality) {
  ProjectedStep s;
  Vec hr = ctx.solve(r);
  if (equality.rows() == 0) {
    s.delta = -hr;
  } else {
    Mat he = ctx.factor().solve(equality.transpose());
    Mat schur = equality * he;
    s.mu = schur.ldlt().solve(equality * hr);
    s.delta = -(hr - he * s.mu);
  }
  s.decrement = ctx.local_norm(s.delta);
  return s;
}

NewtonResult newton_minimize(const BarrierOracle& oracle, const Vec& c, Vec y0, const NewtonOptions& opt) {
  if (c.size() != y0.size()) throw Error(Errc::DimensionMismatch, "newton_minimize");
  NewtonResult res;
  res.y = std::move(y0);
  for (;;) {
    std::optional<LocalNormContext> ctx;
    try {
      ctx.emplace(oracle, res.y);
    } catch (const Error&) {
      return res;
    }
    ProjectedStep st = projected_newton_step(*ctx, ctx->eval().g + c, opt.equality);
    res.decrement = st.decrement;
    if (!std::isfinite(st.decrement)) return res;
    if (st.decrement <= opt.tol) {
      res.converged = true;
      return res;
    }
    if (res.iterations >= opt.max_iters) return res;

    double t = st.decrement > 0.25 ? 1.0 / (1.0 + st.decrement) : 1.0;
    bool moved = false;
    for (int k = 0; k < 60; ++k) {
      Vec trial = res.y + t * st.delta;
      if (oracle.margin(trial) > 0.0) {
        res.y = std::move(trial);
        moved = true;
        break;
      }
      t *= 0.5;
    }
    if (!moved) return res;
    ++res.iterations;
    if (opt.stop && opt.stop(res.y)) return res;
  }
}

}  // namespace conecert
