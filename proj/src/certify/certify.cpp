#include "conecert/certify.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include "conecert/barriers.hpp"
#include "conecert/error.hpp"

namespace conecert {

const char* to_string(CertKind k) noexcept { return k == CertKind::B ? "B" : "H"; }

const char* to_string(ExactStatus s) noexcept {
  switch (s) {
    case ExactStatus::Proven:
      return "Proven";
    case ExactStatus::Refuted:
      return "Refuted";
    default:
      return "Skipped";
  }
}

CertKind cert_kind_from_string(const std::string& s) {
  if (s == "B" || s == "b") return CertKind::B;
  if (s == "H" || s == "h") return CertKind::H;
  throw Error(Errc::ConfigError, "certificate kind must be B or H, got '" + s + "'");
}

ExactStatus exact_status_from_string(const std::string& s) {
  if (s == "Proven") return ExactStatus::Proven;
  if (s == "Refuted") return ExactStatus::Refuted;
  if (s == "Skipped" || s.empty()) return ExactStatus::Skipped;
  throw Error(Errc::ParseError, "unknown exact status '" + s + "'");
}

Mat build_B_matrix(const BarrierOracle& oracle, const Vec& y) {
  BarrierEval ev = oracle.eval(y);
  return ev.H + ev.g * ev.g.transpose();
}

Vec apply_B_inverse(const LocalNormContext& ctx, double nu, const Vec& b) {
  const Vec& y = ctx.center().coords;
  return ctx.solve(b) - (y.dot(b) / (1.0 + nu)) * y;
}

Vec apply_B_inverse(const BarrierOracle& oracle, const Vec& y, const Vec& b) {
  if (static_cast<std::size_t>(b.size()) != oracle.dim()) throw Error(Errc::DimensionMismatch, "apply_B_inverse");
  LocalNormContext ctx(oracle, y);
  return apply_B_inverse(ctx, oracle.nu(), b);
}

namespace {

void require_kind(const BarrierOracle& oracle, CertKind kind) {
  if (kind == CertKind::H && !oracle.hyperbolic())
    throw Error(Errc::HNotValidForCone, oracle.name() + " is not a log-det type cone; use a B-certificate");
}

}  // namespace

DualCertificate check_certificate(const BarrierOracle& oracle, const Vec& y, const Vec& b, CertKind kind) {
  if (static_cast<std::size_t>(y.size()) != oracle.dim() || static_cast<std::size_t>(b.size()) != oracle.dim())
    throw Error(Errc::DimensionMismatch, "check_certificate");
  require_kind(oracle, kind);
  LocalNormContext ctx(oracle, y);
  DualCertificate c;
  c.y = y;
  c.kind = kind;
  c.b = b;
  c.y_margin = ctx.center().margin;
  c.witness = kind == CertKind::B ? apply_B_inverse(ctx, oracle.nu(), b) : ctx.solve(b);
  c.witness_margin = oracle.margin(c.witness);
  c.accepted = c.witness_margin >= 0.0;
  return c;
}

CertificateSearchReport gradient_certificate(const BarrierOracle& oracle, const Vec& b, double tol, int max_iters,
                                             std::optional<Vec> start) {
  if (static_cast<std::size_t>(b.size()) != oracle.dim()) throw Error(Errc::DimensionMismatch, "gradient_certificate");
  NewtonOptions opt;
  opt.tol = tol;
  opt.max_iters = max_iters;
  NewtonResult nr = newton_minimize(oracle, b, start ? *start : oracle.reference_point(), opt);
  if (!nr.converged)
    throw Error(Errc::MaxIters, "gradient certificate did not converge (decrement " + std::to_string(nr.decrement) +
                                    " after " + std::to_string(nr.iterations) + " steps); inconclusive");
  CertificateSearchReport rep;
  rep.y_b = nr.y;
  rep.newton_iters = nr.iterations;
  rep.final_residual = nr.decrement;
  rep.certificate = check_certificate(oracle, nr.y, b, CertKind::B);
  return rep;
}

bool dikin_sufficient_H(const BarrierOracle& oracle, const Vec& y, const Vec& b) {
  LocalNormContext ctx(oracle, y);
  return ctx.dual_local_norm(-ctx.eval().g - b) < 1.0;
}

// ‖b + g(δy)‖*_{δy} = ‖δb + g(y)‖*_y by homogeneity.
double dikin_B_distance(const LocalNormContext& ctx, const Vec& b, double delta) {
  return ctx.dual_local_norm(delta * b + ctx.eval().g);
}

namespace {

double best_log_delta(const LocalNormContext& ctx, const Vec& b) {
  constexpr int grid = 61;
  const double lo = std::log(1e-3), hi = std::log(1e3), step = (hi - lo) / (grid - 1);
  auto dist = [&](double t) { return dikin_B_distance(ctx, b, std::exp(t)); };
  int best = 0;
  double best_val = std::numeric_limits<double>::infinity();
  for (int i = 0; i < grid; ++i) {
    double v = dist(lo + i * step);
    if (v < best_val) {
      best_val = v;
      best = i;
    }
  }
  double a = lo + std::max(best - 1, 0) * step, c = lo + std::min(best + 1, grid - 1) * step;
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = c - phi * (c - a), x2 = a + phi * (c - a);
  double f1 = dist(x1), f2 = dist(x2);
  for (int it = 0; it < 100 && c - a > 1e-12; ++it) {
    if (f1 < f2) {
      c = x2;
      x2 = x1;
      f2 = f1;
      x1 = c - phi * (c - a);
      f1 = dist(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (c - a);
      f2 = dist(x2);
    }
  }
  double t = 0.5 * (a + c);
  return dist(t) <= best_val ? t : lo + best * step;
}

}  // namespace

double dikin_B_best_delta(const BarrierOracle& oracle, const Vec& y, const Vec& b) {
  LocalNormContext ctx(oracle, y);
  return std::exp(best_log_delta(ctx, b));
}

bool dikin_sufficient_B(const BarrierOracle& oracle, const Vec& y, const Vec& b, bool delta_search) {
  LocalNormContext ctx(oracle, y);
  const double r = 1.0 / (2.0 * (oracle.nu() + 1.0));
  if (dikin_B_distance(ctx, b, 1.0) < r) return true;
  if (!delta_search) return false;
  return dikin_B_distance(ctx, b, std::exp(best_log_delta(ctx, b))) < r;
}

namespace {

exact::Rational rational_nu(const BarrierOracle& oracle) {
  double nu = oracle.nu();
  exact::Rational q = exact::snap(nu, 1000000);
  if (std::abs(q.get_d() - nu) > 1e-12) throw Error(Errc::ExactUnavailable, "barrier parameter is not rational");
  return q;
}

}  // namespace

exact::RationalVector exact_witness(const BarrierOracle& oracle, const exact::RationalVector& y,
                                    const exact::RationalVector& b, CertKind kind) {
  if (y.size() != oracle.dim() || b.size() != oracle.dim()) throw Error(Errc::DimensionMismatch, "exact_witness");
  require_kind(oracle, kind);
  ExactEval ev = oracle.exact_eval(y);
  exact::RationalVector w = exact::solve(ev.H, b);
  if (kind == CertKind::B) {
    exact::Rational s = exact::dot(y, b) / (1 + rational_nu(oracle));
    for (std::size_t i = 0; i < w.size(); ++i) w[i] -= s * y[i];
  }
  return w;
}

ExactStatus exact_verify(const BarrierOracle& oracle, const exact::RationalVector& y, const exact::RationalVector& b,
                         CertKind kind) {
  if (!oracle.has_exact()) throw Error(Errc::ExactUnavailable, oracle.name() + " has no rational replay");
  std::optional<bool> y_in = oracle.exact_member(y);
  if (!y_in) throw Error(Errc::ExactUnavailable, oracle.name() + " has no exact membership test");
  if (!*y_in) return ExactStatus::Refuted;
  exact::RationalVector w;
  try {
    w = exact_witness(oracle, y, b, kind);
  } catch (const Error& e) {
    // y on the boundary: the Hessian is singular and y is no certificate
    if (e.code() == Errc::SingularMatrix || e.code() == Errc::NotInterior) return ExactStatus::Refuted;
    throw;
  }
  std::optional<bool> in = oracle.exact_member(w);
  if (!in) throw Error(Errc::ExactUnavailable, oracle.name() + " has no exact membership test");
  return *in ? ExactStatus::Proven : ExactStatus::Refuted;
}

ExactStatus exact_verify(const BarrierOracle& oracle, DualCertificate& cert, const mpz_class& max_denominator) {
  if (!cert.y_exact) cert.y_exact = snap(cert.y, max_denominator);
  if (!cert.b_exact) cert.b_exact = to_rational(cert.b);
  cert.exact = exact_verify(oracle, *cert.y_exact, *cert.b_exact, cert.kind);
  return cert.exact;
}

nlohmann::json vector_to_json(const Vec& v, bool exact_values) {
  nlohmann::json out = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (exact_values) {
      out.push_back(exact::to_string(exact::from_double(v[i])));
    } else {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.12g", v[i]);
      out.push_back(std::strtod(buf, nullptr));
    }
  }
  return out;
}

Vec vector_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw Error(Errc::ParseError, "expected a JSON array of numbers");
  Vec v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = rational_from_json(j[i]).get_d();
  return v;
}

nlohmann::json to_json(const DualCertificate& c, const BarrierOracle& oracle, bool exact_values) {
  nlohmann::json j;
  j["cone"] = oracle.to_json();
  j["kind"] = to_string(c.kind);
  j["y"] = exact_values && c.y_exact ? rational_vector_to_json(*c.y_exact) : vector_to_json(c.y, exact_values);
  j["b"] = exact_values && c.b_exact ? rational_vector_to_json(*c.b_exact) : vector_to_json(c.b, exact_values);
  j["witness"] = vector_to_json(c.witness, exact_values);
  j["margins"] = {{"y", c.y_margin}, {"witness", c.witness_margin}};
  j["accepted"] = c.accepted;
  j["exact"] = to_string(c.exact);
  return j;
}

DualCertificate certificate_from_json(const nlohmann::json& j) {
  try {
    DualCertificate c;
    c.kind = cert_kind_from_string(j.at("kind").get<std::string>());
    c.y = vector_from_json(j.at("y"));
    c.b = vector_from_json(j.at("b"));
    if (j.contains("witness")) c.witness = vector_from_json(j.at("witness"));
    auto all_strings = [](const nlohmann::json& a) {
      for (const auto& e : a)
        if (!e.is_string()) return false;
      return true;
    };
    if (all_strings(j.at("y"))) c.y_exact = rational_vector_from_json(j.at("y"));
    if (all_strings(j.at("b"))) c.b_exact = rational_vector_from_json(j.at("b"));
    if (j.contains("margins")) {
      c.y_margin = j["margins"].value("y", 0.0);
      c.witness_margin = j["margins"].value("witness", 0.0);
    }
    c.accepted = j.value("accepted", false);
    c.exact = exact_status_from_string(j.value("exact", std::string("Skipped")));
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::ParseError, std::string("certificate JSON: ") + e.what());
  }
}

}  // namespace conecert
