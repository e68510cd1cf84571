#include "conecert/ipa.hpp"

#include <cmath>
#include <limits>

#include "conecert/error.hpp"

namespace conecert {

double SolverConfig::effective_eta(double nu) const {
  return mode == CertKind::B ? std::min(eta, 0.9 / (2.0 * (1.0 + nu))) : eta;
}

SolverConfig solver_config_from_json(const nlohmann::json& j) {
  SolverConfig c;
  try {
    c.eta = j.value("eta", c.eta);
    c.theta = j.value("theta", c.theta);
    c.tol = j.value("tol", c.tol);
    c.max_iters = j.value("max_iters", c.max_iters);
    c.early_exit = j.value("early_exit", c.early_exit);
    c.centering_iters = j.value("centering_iters", c.centering_iters);
    if (j.contains("mode")) c.mode = cert_kind_from_string(j.at("mode").get<std::string>());
    if (j.contains("snap_denominator_cap")) {
      const auto& v = j.at("snap_denominator_cap");
      c.snap_denominator_cap = v.is_string() ? mpz_class(v.get<std::string>()) : mpz_class(v.get<double>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::ConfigError, std::string("solver config: ") + e.what());
  } catch (const std::invalid_argument&) {
    throw Error(Errc::ConfigError, "solver config: bad snap_denominator_cap");
  }
  if (!(c.eta > 0.0 && c.eta < 1.0)) throw Error(Errc::ConfigError, "eta must lie in (0, 1)");
  if (!(c.theta >= 0.0 && c.theta < 1.0)) throw Error(Errc::ConfigError, "theta must lie in [0, 1)");
  if (!(c.tol > 0.0)) throw Error(Errc::ConfigError, "tol must be positive");
  if (c.max_iters <= 0) throw Error(Errc::ConfigError, "max_iters must be positive");
  if (c.snap_denominator_cap <= 0) throw Error(Errc::ConfigError, "snap_denominator_cap must be positive");
  return c;
}

nlohmann::json to_json(const SolverConfig& c) {
  return {{"eta", c.eta},
          {"theta", c.theta},
          {"tol", c.tol},
          {"max_iters", c.max_iters},
          {"mode", to_string(c.mode)},
          {"snap_denominator_cap", c.snap_denominator_cap.get_str()},
          {"early_exit", c.early_exit}};
}

nlohmann::json to_json(const TraceEntry& e) {
  nlohmann::json j{{"iter", e.iter},
                   {"tau", e.tau},
                   {"alpha", e.alpha},
                   {"centrality", e.centrality},
                   {"certified", e.certified}};
  if (e.y.size() > 0) j["y"] = vector_to_json(e.y);
  if (e.gamma) {
    if (e.gamma->empty)
      j["gamma_interval"] = nullptr;
    else
      j["gamma_interval"] = {e.gamma->lower, e.gamma->upper};
  }
  return j;
}

const char* to_string(SolveStatus s) noexcept {
  switch (s) {
    case SolveStatus::CertifiedMember:
      return "CertifiedMember";
    case SolveStatus::CertifiedBoundOnly:
      return "CertifiedBoundOnly";
    default:
      return "Inconclusive";
  }
}

PreparedProblem prepare(const MembershipProblem& p) {
  if (!p.oracle) throw Error(Errc::ConfigError, "membership problem without a cone");
  const auto n = static_cast<Eigen::Index>(p.oracle->dim());
  if (p.b.size() != n) throw Error(Errc::DimensionMismatch, "b has the wrong length");
  PreparedProblem out{p.oracle, p.b, p.w, p.y0 ? *p.y0 : p.oracle->reference_point()};
  if (!p.oracle->interior(out.y0)) throw Error(Errc::NotInterior, "dual start is not interior");
  if (out.w.size() == 0) {
    out.w = -p.oracle->eval(out.y0).g;
  } else {
    if (out.w.size() != n) throw Error(Errc::DimensionMismatch, "w has the wrong length");
    if (p.check_w) {
      try {
        gradient_certificate(*p.oracle, out.w, 1e-8, 500, out.y0);
      } catch (const Error& e) {
        if (e.code() != Errc::MaxIters) throw;
        throw Error(Errc::ConfigError, "w is not in the interior of the cone");
      }
    }
  }
  if (!(out.w.dot(out.y0) > 0.0)) {
    // interior y with wᵀy > 0: pull back K* × R₊ by [I | w]
    exact::RationalMatrix m(static_cast<std::size_t>(n), static_cast<std::size_t>(n) + 1);
    for (Eigen::Index i = 0; i < n; ++i) {
      m(i, i) = 1;
      m(i, n) = exact::from_double(out.w[i]);
    }
    try {
      PullbackOracle aux(product_oracle({p.oracle, orthant_oracle(1)}), m);
      out.y0 = aux.reference_point();
    } catch (const Error& e) {
      if (e.code() != Errc::EmptyInterior) throw;
      throw Error(Errc::ConfigError, "w is not positive on any interior dual point");
    }
  }
  return out;
}

namespace {

Mat w_row(const Vec& w) { return w.transpose(); }

double certify_radius(CertKind mode, double nu) { return mode == CertKind::H ? 1.0 : 1.0 / (2.0 * (nu + 1.0)); }

}  // namespace

PathIterate evaluate_iterate(const PreparedProblem& p, const Vec& y, double tau) {
  LocalNormContext ctx(*p.oracle, y);
  ProjectedStep st = projected_newton_step(ctx, p.b / tau + ctx.eval().g, w_row(p.w));
  PathIterate it;
  it.y = y;
  it.tau = tau;
  it.alpha = tau * st.mu[0];
  it.centrality = st.decrement;
  return it;
}

PathIterate initialize(const PreparedProblem& p, const SolverConfig& cfg) {
  Vec y = p.y0 / p.w.dot(p.y0);
  LocalNormContext ctx(*p.oracle, y);
  // τ₀ = 1/s with s minimising ‖s·b + g − μw‖* over s and μ
  auto ip = [&](const Vec& u, const Vec& v) { return u.dot(ctx.solve(v)); };
  const double ww = ip(p.w, p.w);
  auto project = [&](const Vec& v) -> Vec { return v - (ip(v, p.w) / ww) * p.w; };
  const Vec bp = project(p.b), gp = project(ctx.eval().g);
  const double bb = ip(bp, bp), gg = ip(gp, gp);
  double tau = 1.0;
  if (bb > 1e-300) {
    double s = -ip(bp, gp) / bb;
    if (!(s > 0.0)) s = 0.1 * std::sqrt(gg / bb);
    if (s > 0.0 && std::isfinite(1.0 / s)) tau = 1.0 / s;
  }
  NewtonOptions opt;
  opt.tol = cfg.effective_eta(p.oracle->nu()) / 2.0;
  opt.max_iters = cfg.centering_iters;
  opt.equality = w_row(p.w);
  NewtonResult r = newton_minimize(*p.oracle, p.b / tau, y, opt);
  if (!r.converged)
    throw Error(Errc::CenteringFailed, "initial centering stalled at decrement " + std::to_string(r.decrement) +
                                           " after " + std::to_string(r.iterations) + " steps");
  PathIterate it = evaluate_iterate(p, r.y / p.w.dot(r.y), tau);
  it.newton_steps = r.iterations;
  return it;
}

PathIterate step(const PreparedProblem& p, const PathIterate& it, double eta, double theta, int max_newton) {
  const double tau = it.tau * (1.0 - theta / std::sqrt(p.oracle->nu()));
  NewtonOptions opt;
  opt.tol = eta;
  opt.max_iters = max_newton;
  opt.equality = w_row(p.w);
  NewtonResult r = newton_minimize(*p.oracle, p.b / tau, it.y, opt);
  if (!r.converged)
    throw Error(Errc::StepFailed, "recentering failed at tau " + std::to_string(tau) + " (decrement " +
                                      std::to_string(r.decrement) + ")");
  PathIterate next;
  try {
    next = evaluate_iterate(p, r.y / p.w.dot(r.y), tau);
  } catch (const Error& e) {
    throw Error(Errc::StepFailed, std::string("lost interiority: ") + e.what());
  }
  next.newton_steps = r.iterations;
  return next;
}

namespace {

struct PathHooks {
  std::function<void(const PathIterate&, TraceEntry&)> annotate;
  /// Returns true to stop after this (certified) iterate.
  std::function<bool(const PathIterate&, bool certified)> stop;
};

SolveReport run_path(const PreparedProblem& p, const SolverConfig& cfg, const TraceSink& sink, const PathHooks& hooks,
                     bool stabilization_stop) {
  SolveReport rep;
  rep.nu = p.oracle->nu();
  rep.eta = cfg.effective_eta(rep.nu);
  rep.w = p.w;
  if (cfg.mode == CertKind::H && !p.oracle->hyperbolic())
    throw Error(Errc::HNotValidForCone, p.oracle->name() + " needs B mode");
  const double r = certify_radius(cfg.mode, rep.nu);

  PathIterate it;
  try {
    it = initialize(p, cfg);
  } catch (const Error& e) {
    if (e.code() != Errc::CenteringFailed) throw;
    rep.note = e.what();
    return rep;
  }

  int stable = 0;
  double prev_alpha = std::numeric_limits<double>::quiet_NaN();
  for (int k = 0;; ++k) {
    const Vec z = p.b - it.alpha * p.w;
    DualCertificate c = check_certificate(*p.oracle, it.y, z, cfg.mode);
    const bool certified = c.accepted;
    // Inside the certification radius every iterate is a certificate; a failed
    // replay there means rounding has taken over, so the path ends.
    if (!certified && it.centrality < r && k > 0) {
      rep.note = "numerical floor: iterate at tau " + std::to_string(it.tau) + " failed certificate replay";
      break;
    }
    if (certified && it.alpha > rep.best_alpha) {
      rep.best_alpha = it.alpha;
      rep.certificate = std::move(c);
      rep.best_y = it.y;
      rep.best_tau = it.tau;
    }
    TraceEntry e{k, it.tau, it.alpha, it.centrality, certified, std::nullopt, it.y};
    if (hooks.annotate) hooks.annotate(it, e);
    rep.trace.push_back(e);
    if (sink) sink(e);
    rep.iterations = k;

    if (certified && it.alpha >= 0.0 && cfg.early_exit) break;
    if (hooks.stop && hooks.stop(it, certified)) break;
    if (stabilization_stop) {
      if (!std::isnan(prev_alpha) && std::abs(it.alpha - prev_alpha) < cfg.tol * std::max(1.0, std::abs(it.alpha)))
        ++stable;
      else
        stable = 0;
      if (stable >= 10) break;
    }
    prev_alpha = it.alpha;
    if (k >= cfg.max_iters) {
      rep.note = "iteration limit reached";
      break;
    }
    try {
      it = step(p, it, rep.eta, cfg.theta);
    } catch (const Error& e) {
      if (e.code() != Errc::StepFailed) throw;
      rep.note = e.what();
      break;
    }
  }

  if (rep.certificate)
    rep.status = rep.best_alpha >= 0.0 ? SolveStatus::CertifiedMember : SolveStatus::CertifiedBoundOnly;
  return rep;
}

}  // namespace

SolveReport solve_membership(const MembershipProblem& problem, const SolverConfig& cfg, const TraceSink& sink) {
  PreparedProblem p = prepare(problem);
  return run_path(p, cfg, sink, {}, true);
}

StandardFormReport solve_standard_form(const StandardForm& sf, const SolverConfig& cfg, bool reconstruct,
                                       const TraceSink& sink) {
  ImageCone stacked = stack_standard_form(sf);
  const auto m = static_cast<Eigen::Index>(sf.a.rows());
  const Vec b = to_eigen(sf.b);
  MembershipProblem mp;
  mp.oracle = stacked.dual_oracle();
  mp.b = Vec::Zero(m + 1);
  mp.b.tail(m) = -b;
  mp.w = Vec::Zero(m + 1);
  mp.w[0] = 1.0;
  mp.check_w = false;
  PreparedProblem p = prepare(mp);

  SolverConfig c = cfg;
  c.early_exit = false;
  const double nu = p.oracle->nu();
  const double r = certify_radius(cfg.mode, nu);
  PathHooks hooks;
  hooks.annotate = [&](const PathIterate& it, TraceEntry& e) {
    try {
      e.gamma = gamma_interval(sf, Vec(it.y.tail(m)), r, it.tau);
    } catch (const Error&) {
      e.gamma = GammaInterval{};
    }
  };
  hooks.stop = [&](const PathIterate& it, bool certified) {
    const double gap = -it.alpha - b.dot(it.y.tail(m));
    return certified && gap <= cfg.tol;
  };

  StandardFormReport out;
  out.path = run_path(p, c, sink, hooks, false);
  if (!out.path.certificate) return out;
  out.y = out.path.best_y.tail(m);
  out.gamma = -out.path.best_alpha;
  out.dual_value = b.dot(out.y);
  if (!reconstruct) return out;

  out.witness = reconstruct_optimal(sf, out.y);
  double g = out.gamma;
  GammaInterval gi = gamma_interval(sf, out.y, r, out.path.best_tau);
  if (!gi.empty && gi.lower < g) g = gi.lower;
  PrimalWitness pw;
  pw.x = out.witness->at(g);
  pw.residual = (to_eigen(sf.a) * pw.x - b).cwiseAbs().maxCoeff();
  try {
    pw.base_margin = sf.base->primal_margin(pw.x);
  } catch (const Error&) {
    pw.base_margin = std::numeric_limits<double>::quiet_NaN();
  }
  out.primal = pw;

  try {
    exact::RationalVector yq = snap(out.y, cfg.snap_denominator_cap);
    out.exact_witness = reconstruct_optimal_exact(sf, yq, cfg.snap_denominator_cap);
    if (sf.base->to_json().value("kind", "") == "Orthant") out.exact_gamma = min_gamma_orthant(*out.exact_witness);
  } catch (const Error& e) {
    if (e.code() != Errc::NotDualFeasible && e.code() != Errc::RankDeficient) throw;
  }
  return out;
}

nlohmann::json to_json(const SolveReport& r, bool exact_values) {
  nlohmann::json j;
  j["status"] = to_string(r.status);
  if (std::isfinite(r.best_alpha))
    j["best_alpha"] = r.best_alpha;
  else
    j["best_alpha"] = nullptr;
  j["iterations"] = r.iterations;
  j["nu"] = r.nu;
  j["eta"] = r.eta;
  if (r.certificate) {
    j["certificate"] = {{"kind", to_string(r.certificate->kind)},
                        {"y", vector_to_json(r.certificate->y, exact_values)},
                        {"b", vector_to_json(r.certificate->b, exact_values)},
                        {"witness", vector_to_json(r.certificate->witness, exact_values)},
                        {"margins", {{"y", r.certificate->y_margin}, {"witness", r.certificate->witness_margin}}},
                        {"tau", r.best_tau}};
  }
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

nlohmann::json to_json(const StandardFormReport& r, bool exact_values) {
  nlohmann::json j = to_json(r.path, exact_values);
  if (std::isfinite(r.gamma)) {
    j["gamma"] = r.gamma;
    j["dual_value"] = r.dual_value;
    j["gap"] = r.gamma - r.dual_value;
    j["y"] = vector_to_json(r.y, exact_values);
  }
  if (r.witness) j["affine_witness"] = to_json(*r.witness, false);
  if (r.primal) j["primal"] = to_json(*r.primal, false);
  if (r.exact_witness) j["exact_affine_witness"] = to_json(*r.exact_witness, true);
  if (r.exact_gamma) j["exact_gamma"] = exact::to_string(*r.exact_gamma);
  return j;
}

void write_trace(std::ostream& os, const std::vector<TraceEntry>& trace) {
  for (const auto& e : trace) os << to_json(e).dump() << '\n';
}

}  // namespace conecert
