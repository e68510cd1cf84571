#include "conecert/image_cone.hpp"

#include <cmath>
#include <limits>

#include "conecert/error.hpp"

namespace conecert {

namespace {

void require_full_row_rank(const exact::RationalMatrix& a, const char* what) {
  if (a.rows() == 0 || a.rows() > a.cols() || exact::rank(a) != a.rows())
    throw Error(Errc::RankDeficient, std::string(what) + " does not have full row rank");
}

double primal_margin_or_nan(const BarrierOracle& base, const Vec& x) {
  try {
    return base.primal_margin(x);
  } catch (const Error& e) {
    if (e.code() == Errc::UnsupportedShape) return std::numeric_limits<double>::quiet_NaN();
    throw;
  }
}

Mat barrier_matrix(const BarrierEval& ev, CertKind kind) {
  return kind == CertKind::B ? Mat(ev.H + ev.g * ev.g.transpose()) : ev.H;
}

exact::RationalMatrix barrier_matrix(const ExactEval& ev, CertKind kind) {
  if (kind == CertKind::H) return ev.H;
  exact::RationalMatrix m = ev.H;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) += ev.g[i] * ev.g[j];
  return m;
}

// Symmetric rational approximation of a floating matrix.
exact::RationalMatrix snap_symmetric(const Mat& m, const mpz_class& cap) {
  exact::RationalMatrix out(static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = i; j < m.cols(); ++j) {
      exact::Rational q = exact::snap(0.5 * (m(i, j) + m(j, i)), cap);
      out(i, j) = q;
      out(j, i) = q;
    }
  return out;
}

// M Aᵀ (A M Aᵀ)⁻¹ applied to each column of `rhs`, as L·C⁺ with M = LLᵀ and
// C = AL; the QR of Cᵀ avoids squaring the (large) condition number of M.
Mat reconstruction_map(const Mat& a, const Mat& m, const Mat& rhs) {
  Eigen::LLT<Mat> llt(m);
  Mat l;
  if (llt.info() == Eigen::Success) {
    l = llt.matrixL();
  } else {
    // numerically semidefinite near the boundary: symmetric square root
    Eigen::SelfAdjointEigenSolver<Mat> es(m);
    l = es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
  }
  const Mat ct = (a * l).transpose();
  Eigen::HouseholderQR<Mat> qr(ct);
  const Eigen::Index r = a.rows();
  const Mat rr = qr.matrixQR().topLeftCorner(r, r).triangularView<Eigen::Upper>();
  if ((rr.diagonal().cwiseAbs().array() <= 1e-14 * rr.diagonal().cwiseAbs().maxCoeff()).any())
    throw Error(Errc::RankDeficient, "A M Aᵀ is singular");
  Mat t = rr.transpose().triangularView<Eigen::Lower>().solve(rhs);
  Mat z = qr.householderQ() * (Mat(ct.rows(), rhs.cols()) << t, Mat::Zero(ct.rows() - r, rhs.cols())).finished();
  return l * z;
}

exact::RationalVector reconstruction_map(const exact::RationalMatrix& a, const exact::RationalMatrix& m,
                                         const exact::RationalVector& rhs) {
  exact::RationalMatrix mat = m * a.transpose();
  exact::RationalMatrix gram = a * mat;
  try {
    return mat * exact::solve(gram, rhs);
  } catch (const Error& e) {
    if (e.code() == Errc::SingularMatrix) throw Error(Errc::RankDeficient, "A M Aᵀ is singular");
    throw;
  }
}

double inf_norm(const Vec& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace

ImageCone::ImageCone(OraclePtr base, exact::RationalMatrix a)
    : base_(std::move(base)), a_exact_(std::move(a)), a_(to_eigen(a_exact_)) {
  if (!base_) throw Error(Errc::ConfigError, "image cone of a null cone");
  if (a_exact_.cols() != base_->dim()) throw Error(Errc::DimensionMismatch, "image cone matrix width");
  require_full_row_rank(a_exact_, "image cone matrix");
  dual_ = std::make_shared<PullbackOracle>(base_, a_exact_);
}

nlohmann::json ImageCone::to_json() const { return {{"base", base_->to_json()}, {"A", rational_matrix_to_json(a_exact_)}}; }

ImageCone ImageCone::from_json(const nlohmann::json& j) {
  if (!j.contains("base") || !j.contains("A")) throw Error(Errc::ParseError, "ImageCone JSON needs base and A");
  return ImageCone(oracle_from_json(j.at("base")), rational_matrix_from_json(j.at("A")));
}

nlohmann::json to_json(const PrimalWitness& w, bool exact_values) {
  nlohmann::json j;
  j["x"] = exact_values && w.x_exact ? rational_vector_to_json(*w.x_exact) : vector_to_json(w.x);
  j["exact"] = w.x_exact.has_value();
  j["residual"] = w.residual;
  if (std::isnan(w.base_margin))
    j["base_margin"] = nullptr;
  else
    j["base_margin"] = w.base_margin;
  if (w.exact_member)
    j["exact_member"] = *w.exact_member;
  else
    j["exact_member"] = nullptr;
  j["rationalised"] = w.rationalised;
  return j;
}

PrimalWitness reconstruct_primal(const ImageCone& ic, const Vec& y, const Vec& b, CertKind kind) {
  if (static_cast<std::size_t>(b.size()) != ic.rows()) throw Error(Errc::DimensionMismatch, "reconstruct_primal b");
  DualCertificate cert = check_certificate(*ic.dual_oracle(), y, b, kind);
  if (!cert.accepted)
    throw Error(Errc::NotCertificate, "y is not an accepted " + std::string(to_string(kind)) + "-certificate of b");
  const Vec s = ic.a().transpose() * y;
  Mat m = barrier_matrix(ic.base()->eval(s), kind);
  PrimalWitness w;
  w.x = reconstruction_map(ic.a(), m, b);
  w.residual = inf_norm(ic.a() * w.x - b);
  w.base_margin = primal_margin_or_nan(*ic.base(), w.x);
  return w;
}

PrimalWitness reconstruct_primal_exact(const ImageCone& ic, const exact::RationalVector& y,
                                       const exact::RationalVector& b, CertKind kind, const mpz_class& max_denominator) {
  if (b.size() != ic.rows() || y.size() != ic.rows())
    throw Error(Errc::DimensionMismatch, "reconstruct_primal_exact");
  const exact::RationalVector s = ic.a_exact().transpose() * y;
  exact::RationalMatrix m;
  PrimalWitness w;
  if (ic.base()->has_exact()) {
    if (exact_verify(*ic.dual_oracle(), y, b, kind) != ExactStatus::Proven)
      throw Error(Errc::NotCertificate, "rational replay rejects the certificate");
    m = barrier_matrix(ic.base()->exact_eval(s), kind);
  } else {
    const Vec yd = to_eigen(y);
    DualCertificate cert = check_certificate(*ic.dual_oracle(), yd, to_eigen(b), kind);
    if (!cert.accepted) throw Error(Errc::NotCertificate, "y is not an accepted certificate of b");
    m = snap_symmetric(barrier_matrix(ic.base()->eval(to_eigen(s)), kind), max_denominator);
    w.rationalised = true;
  }
  exact::RationalVector x = reconstruction_map(ic.a_exact(), m, b);
  if (ic.a_exact() * x != b) throw Error(Errc::SingularMatrix, "exact reconstruction lost Ax = b");
  w.x = to_eigen(x);
  w.residual = 0.0;
  w.base_margin = primal_margin_or_nan(*ic.base(), w.x);
  w.exact_member = ic.base()->exact_primal_member(x);
  w.x_exact = std::move(x);
  return w;
}

std::optional<PrimalWitness> round_primal_exact(const ImageCone& ic, const Vec& x, const exact::RationalVector& b) {
  if (static_cast<std::size_t>(x.size()) != ic.cols() || b.size() != ic.rows())
    throw Error(Errc::DimensionMismatch, "round_primal_exact");
  const exact::RationalMatrix& a = ic.a_exact();
  const exact::RationalMatrix at = a.transpose();
  const exact::RationalMatrix gram = a * at;
  mpz_class cap = 1;
  for (int k = 1; k <= 12; ++k) {
    cap *= 10;
    exact::RationalVector xq = snap(x, cap);
    exact::RationalVector r = a * xq;
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
    const exact::RationalVector corr = at * exact::solve(gram, r);
    for (std::size_t i = 0; i < xq.size(); ++i) xq[i] += corr[i];
    const std::optional<bool> member = ic.base()->exact_primal_member(xq);
    if (!member) return std::nullopt;
    if (!*member) continue;
    PrimalWitness w;
    w.x = to_eigen(xq);
    w.residual = 0.0;
    w.base_margin = primal_margin_or_nan(*ic.base(), w.x);
    w.exact_member = true;
    w.x_exact = std::move(xq);
    return w;
  }
  return std::nullopt;
}

double lsq_consistency_check(const ImageCone& ic, const Vec& y, const Vec& b) {
  PrimalWitness w = reconstruct_primal(ic, y, b, CertKind::B);
  const Vec s = ic.a().transpose() * y;
  BarrierEval ev = ic.base()->eval(s);
  LocalNormContext ctx(make_interior_point(*ic.base(), s), ev);
  Vec r1 = -ev.g - w.x;
  Vec b_inv_r1 = apply_B_inverse(ctx, ic.base()->nu(), r1);
  double lhs = std::sqrt(std::max(0.0, r1.dot(b_inv_r1)));

  LocalNormContext dctx(*ic.dual_oracle(), y);
  Vec r2 = -dctx.eval().g - b;
  Vec b_inv_r2 = apply_B_inverse(dctx, ic.dual_oracle()->nu(), r2);
  double rhs = std::sqrt(std::max(0.0, r2.dot(b_inv_r2)));
  return std::abs(lhs - rhs) / std::max(1.0, rhs);
}

exact::RationalMatrix stacked_matrix(const StandardForm& sf) {
  const std::size_t m = sf.a.rows(), n = sf.a.cols();
  if (sf.c.size() != n || sf.b.size() != m) throw Error(Errc::DimensionMismatch, "standard form shapes");
  if (sf.base && sf.base->dim() != n) throw Error(Errc::DimensionMismatch, "standard form cone dimension");
  exact::RationalMatrix ac(m + 1, n);
  for (std::size_t j = 0; j < n; ++j) ac(0, j) = sf.c[j];
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) ac(i + 1, j) = -sf.a(i, j);
  return ac;
}

ImageCone stack_standard_form(const StandardForm& sf) {
  exact::RationalMatrix ac = stacked_matrix(sf);
  require_full_row_rank(ac, "stacked matrix [c; -A]");
  return ImageCone(sf.base, std::move(ac));
}

StandardForm standard_form_from_json(const nlohmann::json& j) {
  for (const char* k : {"cone", "c", "A", "b"})
    if (!j.contains(k)) throw Error(Errc::ParseError, std::string("standard form JSON lacks '") + k + "'");
  StandardForm sf{oracle_from_json(j.at("cone")), rational_vector_from_json(j.at("c")),
                  rational_matrix_from_json(j.at("A")), rational_vector_from_json(j.at("b"))};
  stacked_matrix(sf);
  return sf;
}

nlohmann::json to_json(const StandardForm& sf) {
  return {{"cone", sf.base->to_json()},
          {"c", rational_vector_to_json(sf.c)},
          {"A", rational_matrix_to_json(sf.a)},
          {"b", rational_vector_to_json(sf.b)}};
}

exact::RationalVector AffineWitness::at(const exact::Rational& gamma) const {
  if (!u_exact || !v_exact) return to_rational(at(gamma.get_d()));
  exact::RationalVector x = *u_exact;
  for (std::size_t i = 0; i < x.size(); ++i) x[i] += gamma * (*v_exact)[i];
  return x;
}

nlohmann::json to_json(const AffineWitness& w, bool exact_values) {
  nlohmann::json j;
  j["u"] = exact_values && w.u_exact ? rational_vector_to_json(*w.u_exact) : vector_to_json(w.u);
  j["v"] = exact_values && w.v_exact ? rational_vector_to_json(*w.v_exact) : vector_to_json(w.v);
  j["exact"] = w.u_exact.has_value();
  j["rationalised"] = w.rationalised;
  return j;
}

namespace {

Vec stacked_point(const StandardForm& sf, const Vec& y) {
  if (static_cast<std::size_t>(y.size()) != sf.a.rows()) throw Error(Errc::DimensionMismatch, "dual vector length");
  Vec yt(y.size() + 1);
  yt << 1.0, y;
  return to_eigen(stacked_matrix(sf)).transpose() * yt;
}

void require_dual_feasible(const StandardForm& sf, const Vec& s) {
  if (!(sf.base->margin(s) > 0.0)) throw Error(Errc::NotDualFeasible, "c − Aᵀy is not interior in K*");
}

}  // namespace

AffineWitness reconstruct_optimal(const StandardForm& sf, const Vec& y) {
  exact::RationalMatrix acq = stacked_matrix(sf);
  require_full_row_rank(acq, "stacked matrix [c; -A]");
  const Vec s = stacked_point(sf, y);
  require_dual_feasible(sf, s);
  const Mat ac = to_eigen(acq);
  Mat rhs = Mat::Zero(ac.rows(), 2);
  rhs.col(0).tail(y.size()) = -to_eigen(sf.b);
  rhs(0, 1) = 1.0;
  Mat uv = reconstruction_map(ac, barrier_matrix(sf.base->eval(s), CertKind::B), rhs);
  AffineWitness w;
  w.u = uv.col(0);
  w.v = uv.col(1);
  return w;
}

AffineWitness reconstruct_optimal_exact(const StandardForm& sf, const exact::RationalVector& y,
                                        const mpz_class& max_denominator) {
  exact::RationalMatrix ac = stacked_matrix(sf);
  require_full_row_rank(ac, "stacked matrix [c; -A]");
  if (y.size() != sf.a.rows()) throw Error(Errc::DimensionMismatch, "dual vector length");
  exact::RationalVector yt(y.size() + 1);
  yt[0] = 1;
  for (std::size_t i = 0; i < y.size(); ++i) yt[i + 1] = y[i];
  const exact::RationalVector s = ac.transpose() * yt;
  const Vec sd = to_eigen(s);
  require_dual_feasible(sf, sd);

  AffineWitness w;
  exact::RationalMatrix m;
  if (sf.base->has_exact()) {
    std::optional<bool> in = sf.base->exact_member(s);
    if (in && !*in) throw Error(Errc::NotDualFeasible, "c − Aᵀy is outside K*");
    m = barrier_matrix(sf.base->exact_eval(s), CertKind::B);
  } else {
    m = snap_symmetric(barrier_matrix(sf.base->eval(sd), CertKind::B), max_denominator);
    w.rationalised = true;
  }
  exact::RationalVector bu(ac.rows()), bv(ac.rows());
  for (std::size_t i = 0; i < sf.b.size(); ++i) bu[i + 1] = -sf.b[i];
  bv[0] = 1;
  w.u_exact = reconstruction_map(ac, m, bu);
  w.v_exact = reconstruction_map(ac, m, bv);
  w.u = to_eigen(*w.u_exact);
  w.v = to_eigen(*w.v_exact);
  return w;
}

std::optional<exact::Rational> min_gamma_orthant(const AffineWitness& w) {
  const exact::RationalVector u = w.u_exact ? *w.u_exact : to_rational(w.u);
  const exact::RationalVector v = w.v_exact ? *w.v_exact : to_rational(w.v);
  // u_i + γ v_i ≥ 0 for all i
  std::optional<exact::Rational> lo, hi;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (v[i] == 0) {
      if (u[i] < 0) return std::nullopt;
      continue;
    }
    exact::Rational t = -u[i] / v[i];
    if (v[i] > 0) {
      if (!lo || t > *lo) lo = t;
    } else if (!hi || t < *hi) {
      hi = t;
    }
  }
  if (!lo) return std::nullopt;  // unbounded below cannot happen when cᵀv = 1 and K pointed
  if (hi && *hi < *lo) return std::nullopt;
  return lo;
}

std::optional<double> min_gamma(const BarrierOracle& base, const AffineWitness& w, double lo, double hi, double tol) {
  if (!(base.primal_margin(w.at(hi)) >= 0.0)) return std::nullopt;
  if (base.primal_margin(w.at(lo)) >= 0.0) return lo;
  while (hi - lo > tol * std::max(1.0, std::abs(hi))) {
    double mid = 0.5 * (lo + hi);
    if (base.primal_margin(w.at(mid)) >= 0.0)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

namespace {

struct StackedEval {
  Vec g;
  Mat h;
  double nu;
};

StackedEval stacked_eval(const StandardForm& sf, const Vec& y) {
  const Vec s = stacked_point(sf, y);
  require_dual_feasible(sf, s);
  const Mat ac = to_eigen(stacked_matrix(sf));
  BarrierEval ev = sf.base->eval(s);
  return {ac * ev.g, ac * ev.H * ac.transpose(), sf.base->nu()};
}

GammaInterval interval_from(const StackedEval& se, const Eigen::LDLT<Mat>& hinv, const Vec& b, double r, double tau) {
  // ‖γe + d‖²_{H⁻¹} < r² with e = e₀/τ, d = (0, −b)/τ + g
  const Eigen::Index n = se.g.size();
  Vec e = Vec::Zero(n);
  e(0) = 1.0 / tau;
  Vec d = se.g;
  d.tail(n - 1) -= b / tau;
  Vec he = hinv.solve(e), hd = hinv.solve(d);
  const double a2 = e.dot(he), a1 = 2.0 * e.dot(hd), a0 = d.dot(hd) - r * r;
  GammaInterval gi;
  gi.tau = tau;
  const double disc = a1 * a1 - 4.0 * a2 * a0;
  if (!(disc > 0.0) || !(a2 > 0.0)) return gi;
  const double sq = std::sqrt(disc);
  // stable roots
  const double q = -0.5 * (a1 + std::copysign(sq, a1));
  double r1 = q / a2, r2 = a0 / q;
  if (q == 0.0) r1 = r2 = -a1 / (2.0 * a2);
  gi.empty = false;
  gi.lower = std::min(r1, r2);
  gi.upper = std::max(r1, r2);
  return gi;
}

}  // namespace

GammaInterval gamma_interval(const StandardForm& sf, const Vec& y, double r, double tau) {
  if (!(r > 0.0) || !(tau > 0.0)) throw Error(Errc::ConfigError, "gamma_interval needs r > 0 and tau > 0");
  StackedEval se = stacked_eval(sf, y);
  Eigen::LDLT<Mat> hinv(se.h);
  return interval_from(se, hinv, to_eigen(sf.b), r, tau);
}

GammaInterval gamma_interval_best(const StandardForm& sf, const Vec& y, double r) {
  if (!(r > 0.0)) throw Error(Errc::ConfigError, "gamma_interval needs r > 0");
  StackedEval se = stacked_eval(sf, y);
  Eigen::LDLT<Mat> hinv(se.h);
  const Vec b = to_eigen(sf.b);
  auto lower = [&](double t) {
    GammaInterval gi = interval_from(se, hinv, b, r, std::exp(t));
    return gi.empty ? std::numeric_limits<double>::infinity() : gi.lower;
  };
  constexpr int grid = 81;
  const double lo = std::log(1e-6), hi = std::log(1e2), step = (hi - lo) / (grid - 1);
  int best = -1;
  double best_val = std::numeric_limits<double>::infinity();
  for (int i = 0; i < grid; ++i) {
    double v = lower(lo + i * step);
    if (v < best_val) {
      best_val = v;
      best = i;
    }
  }
  if (best < 0) return GammaInterval{};
  double a = lo + std::max(best - 1, 0) * step, c = lo + std::min(best + 1, grid - 1) * step;
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = c - phi * (c - a), x2 = a + phi * (c - a), f1 = lower(x1), f2 = lower(x2);
  for (int it = 0; it < 100 && c - a > 1e-12; ++it) {
    if (f1 < f2) {
      c = x2;
      x2 = x1;
      f2 = f1;
      x1 = c - phi * (c - a);
      f1 = lower(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (c - a);
      f2 = lower(x2);
    }
  }
  double t = 0.5 * (a + c);
  if (!(lower(t) <= best_val)) t = lo + best * step;
  return interval_from(se, hinv, b, r, std::exp(t));
}

double on_path_gradient_identity_check(const StandardForm& sf, const Vec& y, double tau) {
  StackedEval se = stacked_eval(sf, y);
  const Vec b = to_eigen(sf.b);
  Vec target(se.g.size());
  target << b.dot(y) + tau * se.nu, -b;
  return inf_norm(-tau * se.g - target);
}

}  // namespace conecert
