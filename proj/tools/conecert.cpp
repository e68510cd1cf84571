// conecert: command-line front end for membership certificates, polynomial
// nonnegativity, certificate replay and primal reconstruction.
//
// Exit codes: 0 success (CertifiedMember / Proven), 1 error, 2 inconclusive
// or flagged, 3 refuted, 4 exact replay unavailable.

#include <omp.h>
#include <unistd.h>

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "conecert/barriers.hpp"
#include "conecert/error.hpp"
#include "conecert/polyfront.hpp"

using namespace conecert;
namespace fs = std::filesystem;

namespace {

enum Exit { kOk = 0, kError = 1, kInconclusive = 2, kRefuted = 3, kExactUnavailable = 4 };

struct SolverFlags {
  std::string config;
  std::optional<double> eta, theta, tol;
  std::optional<int> max_iters;
  std::string mode;
  bool exact = false;
  std::string trace;
  std::uint64_t seed = 1;
  std::string out;

  SolverConfig resolve() const {
    nlohmann::json j = config.empty() ? nlohmann::json::object() : nlohmann::json(nullptr);
    if (!config.empty()) {
      std::ifstream in(config);
      if (!in) throw Error(Errc::ConfigError, "cannot open " + config);
      try {
        j = nlohmann::json::parse(in);
      } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::ParseError, config + ": " + e.what());
      }
    }
    if (eta) j["eta"] = *eta;
    if (theta) j["theta"] = *theta;
    if (tol) j["tol"] = *tol;
    if (max_iters) j["max_iters"] = *max_iters;
    if (!mode.empty()) j["mode"] = mode;
    return solver_config_from_json(j);
  }
};

void add_solver_flags(CLI::App* cmd, SolverFlags& f) {
  cmd->add_option("--config", f.config, "Solver configuration JSON");
  cmd->add_option("--eta", f.eta, "Neighborhood radius");
  cmd->add_option("--theta", f.theta, "Path step parameter");
  cmd->add_option("--tol", f.tol, "Stopping tolerance");
  cmd->add_option("--max-iters", f.max_iters, "Iteration limit");
  cmd->add_option("--mode", f.mode, "Certificate kind")->check(CLI::IsMember({"H", "B"}));
  cmd->add_flag("--exact", f.exact, "Rational replay; emit rationals verbatim");
  cmd->add_option("--trace", f.trace, "Write the iterate trace as JSON lines");
  cmd->add_option("--seed", f.seed, "Random seed (selfcheck sampling)");
  cmd->add_option("-o,--out", f.out, "Output file (default: stdout)");
}

// Write to a sibling temporary, then rename over the target.
void write_atomic(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text << '\n';
    return;
  }
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream os(tmp);
    if (!os) throw Error(Errc::ConfigError, "cannot write " + tmp.string());
    os << text << '\n';
    if (!os.flush()) throw Error(Errc::ConfigError, "write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw Error(Errc::ConfigError, "cannot rename onto " + path + ": " + ec.message());
  }
}

nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::ConfigError, "cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::ParseError, path + ": " + e.what());
  }
}

PolySpec read_poly(const std::string& text, const std::string& file) {
  if (!file.empty()) {
    if (fs::path(file).extension() == ".json") return poly_from_json(read_json(file));
    std::ifstream in(file);
    if (!in) throw Error(Errc::ConfigError, "cannot open " + file);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_poly(ss.str());
  }
  return parse_poly(text);
}

// Streams trace entries into a temporary file that replaces `path` on commit.
class TraceFile {
 public:
  explicit TraceFile(std::string path) : path_(std::move(path)) {}

  TraceSink sink() {
    if (path_.empty()) return {};
    return [this](const TraceEntry& e) { buf_ << to_json(e).dump() << '\n'; };
  }
  void commit() {
    if (path_.empty()) return;
    std::string s = buf_.str();
    if (!s.empty() && s.back() == '\n') s.pop_back();
    write_atomic(path_, s);
  }

 private:
  std::string path_;
  std::ostringstream buf_;
};

// A certificate whose y survives the 12-digit rendering keeps it; otherwise the
// full double is written.
nlohmann::json certificate_json(DualCertificate cert, const BarrierOracle& oracle, const SolverConfig& cfg, bool exact) {
  if (exact) {
    if (oracle.has_exact()) {
      cert.b_exact = exact::RationalVector{};
      for (Eigen::Index i = 0; i < cert.b.size(); ++i) cert.b_exact->push_back(exact::from_double(cert.b[i]));
      exact_verify(oracle, cert, cfg.snap_denominator_cap);
    }
    return to_json(cert, oracle, true);
  }
  nlohmann::json j = to_json(cert, oracle, false);
  DualCertificate back = certificate_from_json(j);
  if (!check_certificate(oracle, back.y, back.b, back.kind).accepted) {
    j["y"] = std::vector<double>(cert.y.data(), cert.y.data() + cert.y.size());
    j["b"] = std::vector<double>(cert.b.data(), cert.b.data() + cert.b.size());
  }
  return j;
}

// --- certify -----------------------------------------------------------------

struct CertifyArgs {
  SolverFlags s;
  std::string poly, poly_file, problem, standard_form, method = "sos";
  unsigned half_degree = 0;
  bool decomposition = false;
};

// Polynomial certify reports the best certified bound, so the path is not cut
// at the first member unless a config file asks for it.
int certify_poly(const CertifyArgs& a, SolverConfig cfg) {
  if (a.s.config.empty() || !read_json(a.s.config).contains("early_exit")) cfg.early_exit = false;
  PolySpec p = read_poly(a.poly, a.poly_file);
  const PolyMethod method = poly_method_from_string(a.method);
  PolyCone pc = method == PolyMethod::SONC ? build_sonc(p)
                : method == PolyMethod::AG ? build_odd_ag(p)
                                           : build_poly_cone(p, method, a.half_degree);
  NonnegOptions opts;
  opts.solver = cfg;
  if (!a.s.mode.empty()) opts.mode = cfg.mode;
  opts.want_decomposition = a.decomposition;
  opts.exact = a.s.exact;
  TraceFile trace(a.s.trace);
  NonnegReport r = certify_nonneg(pc, opts, trace.sink());
  trace.commit();

  nlohmann::json j = to_json(r, pc, a.s.exact);
  j["polynomial"] = to_json(p);
  j["polynomial_text"] = to_string(p);
  if (r.certificate) j["certificate"] = certificate_json(*r.certificate, *pc.cone->dual_oracle(), cfg, a.s.exact);
  write_atomic(a.s.out, j.dump(2));
  return r.status == SolveStatus::CertifiedMember ? kOk : kInconclusive;
}

int certify_membership(const CertifyArgs& a, const SolverConfig& cfg) {
  nlohmann::json spec = read_json(a.problem);
  MembershipProblem mp;
  mp.oracle = oracle_from_json(spec.at("cone"));
  mp.b = vector_from_json(spec.at("b"));
  if (spec.contains("w")) {
    mp.w = vector_from_json(spec.at("w"));
    mp.check_w = spec.value("check_w", true);
  }
  TraceFile trace(a.s.trace);
  SolveReport r = solve_membership(mp, cfg, trace.sink());
  trace.commit();
  nlohmann::json j = to_json(r, a.s.exact);
  if (r.certificate) j["certificate"] = certificate_json(*r.certificate, *mp.oracle, cfg, a.s.exact);
  write_atomic(a.s.out, j.dump(2));
  return r.status == SolveStatus::CertifiedMember ? kOk : kInconclusive;
}

int certify_standard_form(const CertifyArgs& a, const SolverConfig& cfg) {
  nlohmann::json spec = read_json(a.standard_form);
  StandardForm sf = standard_form_from_json(spec);
  SolverConfig c = cfg;
  if (a.s.mode.empty() && !sf.base->hyperbolic()) c.mode = CertKind::B;
  TraceFile trace(a.s.trace);
  StandardFormReport r = solve_standard_form(sf, c, true, trace.sink());
  trace.commit();
  nlohmann::json j = to_json(r, a.s.exact);
  j["standard_form"] = to_json(sf);
  write_atomic(a.s.out, j.dump(2));
  return r.path.status == SolveStatus::Inconclusive ? kInconclusive : kOk;
}

int cmd_certify(CertifyArgs& a) {
  const int inputs = !a.poly.empty() + !a.poly_file.empty() + !a.problem.empty() + !a.standard_form.empty();
  if (inputs != 1)
    throw Error(Errc::ConfigError, "give exactly one of --poly, --poly-file, --problem, --standard-form");
  SolverConfig cfg = a.s.resolve();
  if (!a.problem.empty()) {
    if (a.s.mode.empty()) {
      // default to B on cones without a hyperbolic barrier
      nlohmann::json spec = read_json(a.problem);
      if (!oracle_from_json(spec.at("cone"))->hyperbolic()) cfg.mode = CertKind::B;
    }
    return certify_membership(a, cfg);
  }
  if (!a.standard_form.empty()) return certify_standard_form(a, cfg);
  return certify_poly(a, cfg);
}

// --- verify ------------------------------------------------------------------

struct VerifyArgs {
  std::string file, out;
  bool exact = false;
};

int cmd_verify(const VerifyArgs& a) {
  nlohmann::json doc = read_json(a.file);
  const nlohmann::json& cj = doc.contains("certificate") ? doc.at("certificate") : doc;
  if (!cj.contains("cone")) throw Error(Errc::ParseError, "certificate has no cone");
  OraclePtr oracle = oracle_from_json(cj.at("cone"));
  DualCertificate cert = certificate_from_json(cj);

  nlohmann::json out = {{"file", a.file}, {"kind", to_string(cert.kind)}};
  auto finish = [&](const char* verdict, int code) {
    out["verdict"] = verdict;
    write_atomic(a.out, out.dump(2));
    return code;
  };

  DualCertificate replay;
  try {
    replay = check_certificate(*oracle, cert.y, cert.b, cert.kind);
  } catch (const Error& e) {
    if (e.code() != Errc::HNotValidForCone && e.code() != Errc::NotInterior && e.code() != Errc::DimensionMismatch)
      throw;
    out["reason"] = e.what();
    return finish("Refuted", kRefuted);
  }
  out["witness_margin"] = replay.witness_margin;
  if (!replay.accepted) return finish("Refuted", kRefuted);
  if (cert.witness.size() > 0) {
    const double scale = std::max(1.0, replay.witness.lpNorm<Eigen::Infinity>());
    if (cert.witness.size() != replay.witness.size() ||
        (cert.witness - replay.witness).lpNorm<Eigen::Infinity>() > 1e-6 * scale) {
      out["reason"] = "stored witness differs from the recomputed one";
      return finish("Refuted", kRefuted);
    }
  }
  if (!a.exact) return finish("Accepted", kOk);

  if (!oracle->has_exact()) {
    out["reason"] = "ExactUnavailable: " + oracle->name() + " has no rational evaluation";
    std::cerr << "conecert: " << out["reason"].get<std::string>() << '\n';
    return finish("ExactUnavailable", kExactUnavailable);
  }
  const exact::RationalVector y = cert.y_exact ? *cert.y_exact : snap(cert.y, mpz_class("1000000000000"));
  const exact::RationalVector b = cert.b_exact ? *cert.b_exact : to_rational(cert.b);
  ExactStatus st;
  try {
    st = exact_verify(*oracle, y, b, cert.kind);
  } catch (const Error& e) {
    if (e.code() != Errc::ExactUnavailable) throw;
    std::cerr << "conecert: " << e.what() << '\n';
    return finish("ExactUnavailable", kExactUnavailable);
  }
  return st == ExactStatus::Proven ? finish("Proven", kOk) : finish("Refuted", kRefuted);
}

// --- reconstruct -------------------------------------------------------------

struct ReconstructArgs {
  std::string file, gamma = "auto", out;
  bool exact = false;
};

// Smallest γ ≥ lo with x_γ ∈ K: double the bracket until x_hi ∈ K, then bisect.
std::optional<double> auto_gamma(const BarrierOracle& base, const AffineWitness& w, double lo) {
  double hi = lo + std::max(1.0, std::abs(lo));
  for (int k = 0; k < 60 && base.primal_margin(w.at(hi)) < 0.0; ++k) hi = lo + 2.0 * (hi - lo);
  return min_gamma(base, w, lo, hi);
}

int reconstruct_standard_form(const nlohmann::json& doc, const ReconstructArgs& a) {
  StandardForm sf = standard_form_from_json(doc.at("standard_form"));
  const nlohmann::json& yj = doc.at("y");
  const bool y_is_exact = yj.is_array() && !yj.empty() && yj[0].is_string();
  const bool exact = a.exact || y_is_exact;
  const bool orthant = sf.base->to_json().at("kind") == "Orthant";

  AffineWitness w = exact || orthant ? reconstruct_optimal_exact(sf, y_is_exact ? rational_vector_from_json(yj)
                                                                                  : snap(vector_from_json(yj), mpz_class("1000000000000")))
                                     : reconstruct_optimal(sf, vector_from_json(yj));
  nlohmann::json out = {{"affine_witness", to_json(w, exact)}};
  const Vec y = vector_from_json(yj);
  const double dual_value = to_eigen(sf.b).dot(y);
  out["dual_value"] = dual_value;

  bool member = false;
  if (a.gamma == "auto") {
    if (orthant) {
      auto g = min_gamma_orthant(w);
      if (!g) throw Error(Errc::NotCertificate, "no γ makes x_γ nonnegative");
      const exact::RationalVector x = w.at(*g);
      out["gamma"] = exact ? nlohmann::json(exact::to_string(*g)) : nlohmann::json(exact::to_double(*g));
      out["gamma_exact"] = exact::to_string(*g);
      out["x"] = exact ? rational_vector_to_json(x) : vector_to_json(to_eigen(x));
      member = true;
    } else {
      auto g = auto_gamma(*sf.base, w, dual_value);
      if (!g) throw Error(Errc::NotCertificate, "no feasible γ found above the dual value");
      out["gamma"] = *g;
      out["x"] = vector_to_json(w.at(*g));
      member = sf.base->primal_margin(w.at(*g)) >= 0.0;
    }
  } else {
    const exact::Rational g = exact::parse_rational(a.gamma);
    if (w.u_exact && w.v_exact) {
      const exact::RationalVector x = w.at(g);
      out["x"] = exact ? rational_vector_to_json(x) : vector_to_json(to_eigen(x));
      auto em = sf.base->exact_primal_member(x);
      member = em ? *em : sf.base->primal_margin(to_eigen(x)) >= 0.0;
    } else {
      const Vec x = w.at(exact::to_double(g));
      out["x"] = vector_to_json(x);
      member = sf.base->primal_margin(x) >= 0.0;
    }
    out["gamma"] = exact ? nlohmann::json(exact::to_string(g)) : nlohmann::json(exact::to_double(g));
  }
  out["member"] = member;
  if (!member) std::cerr << "conecert: x_gamma is not in the cone at the requested gamma\n";
  write_atomic(a.out, out.dump(2));
  return member ? kOk : kInconclusive;
}

int reconstruct_certificate(const nlohmann::json& doc, const ReconstructArgs& a) {
  const nlohmann::json& cj = doc.contains("certificate") ? doc.at("certificate") : doc;
  const nlohmann::json& cone = cj.at("cone");
  DualCertificate cert = certificate_from_json(cj);
  std::optional<ImageCone> ic;
  if (cone.at("kind") == "Pullback") {
    ic.emplace(ImageCone::from_json(cone));
  } else {
    OraclePtr o = oracle_from_json(cone);
    ic.emplace(o, exact::RationalMatrix::identity(o->dim()));
  }
  PrimalWitness w;
  if (a.exact) {
    const exact::RationalVector y = cert.y_exact ? *cert.y_exact : snap(cert.y, mpz_class("1000000000000"));
    const exact::RationalVector b = cert.b_exact ? *cert.b_exact : to_rational(cert.b);
    w = reconstruct_primal_exact(*ic, y, b, cert.kind);
  } else {
    w = reconstruct_primal(*ic, cert.y, cert.b, cert.kind);
  }
  nlohmann::json out = {{"witness", to_json(w, a.exact)}};
  write_atomic(a.out, out.dump(2));
  const bool member = w.exact_member ? *w.exact_member : !(w.base_margin < 0.0);
  return member ? kOk : kInconclusive;
}

int cmd_reconstruct(const ReconstructArgs& a) {
  nlohmann::json doc = read_json(a.file);
  if (doc.contains("standard_form")) return reconstruct_standard_form(doc, a);
  return reconstruct_certificate(doc, a);
}

// --- lowerbound ---------------------------------------------------------------

int cmd_lowerbound(CertifyArgs& a) {
  if (a.poly.empty() == a.poly_file.empty()) throw Error(Errc::ConfigError, "give exactly one of --poly, --poly-file");
  SolverConfig cfg = a.s.resolve();
  cfg.early_exit = false;
  PolySpec p = read_poly(a.poly, a.poly_file);
  const PolyMethod method = poly_method_from_string(a.method);
  PolyCone pc = method == PolyMethod::SONC ? build_sonc(p)
                : method == PolyMethod::AG ? build_odd_ag(p)
                                           : build_poly_cone(p, method, a.half_degree);
  NonnegOptions opts;
  opts.solver = cfg;
  if (!a.s.mode.empty()) opts.mode = cfg.mode;
  opts.want_decomposition = a.decomposition;
  opts.exact = a.s.exact;
  TraceFile trace(a.s.trace);
  NonnegReport r = certify_nonneg(pc, opts, trace.sink());
  trace.commit();
  nlohmann::json j = to_json(r, pc, a.s.exact);
  j["polynomial_text"] = to_string(p);
  if (r.certificate) j["certificate"] = certificate_json(*r.certificate, *pc.cone->dual_oracle(), cfg, a.s.exact);
  write_atomic(a.s.out, j.dump(2));
  return r.certificate ? kOk : kInconclusive;
}

// --- selfcheck ----------------------------------------------------------------

int cmd_selfcheck(const SolverFlags& s, int samples) {
  nlohmann::json out = {{"oracles", nlohmann::json::array()}, {"counterexamples", nlohmann::json::array()}};
  bool ok = true;
  for (const auto& o : registered_oracles()) {
    SelfCheckReport r = lhscb_selfcheck(*o, samples, s.seed);
    ok = ok && r.passed();
    out["oracles"].push_back(to_json(r));
  }
  for (const auto& c : hessian_counterexamples()) {
    ok = ok && c.reproduced();
    out["counterexamples"].push_back(to_json(c));
  }
  out["passed"] = ok;
  write_atomic(s.out, out.dump(2));
  return ok ? kOk : kError;
}

void apply_thread_cap() {
  if (const char* env = std::getenv("CONECERT_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) omp_set_num_threads(std::min(n, omp_get_max_threads()));
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Barrier-based certificates for conic membership and polynomial nonnegativity"};
  app.require_subcommand(1);

  CertifyArgs cert;
  auto* c = app.add_subcommand("certify", "Certify b ∈ K, a polynomial's nonnegativity, or a conic program's bound");
  add_solver_flags(c, cert.s);
  c->add_option("--poly", cert.poly, "Polynomial text, e.g. \"x^4 - 3x^2 + 2\"");
  c->add_option("--poly-file", cert.poly_file, "Polynomial file (.json or text)");
  c->add_option("--problem", cert.problem, "Membership JSON {cone, b[, w]}");
  c->add_option("--standard-form", cert.standard_form, "Conic program JSON {cone, c, A, b}");
  c->add_option("--method", cert.method, "sos, sonc, dsos, sdsos or ag")
      ->check(CLI::IsMember({"sos", "sonc", "dsos", "sdsos", "ag"}));
  c->add_option("--half-degree", cert.half_degree, "Gram basis degree (0: automatic)");
  c->add_flag("--decomposition", cert.decomposition, "Reconstruct an explicit decomposition");

  VerifyArgs ver;
  auto* v = app.add_subcommand("verify", "Replay a certificate file");
  v->add_option("file", ver.file, "Certificate JSON")->required();
  v->add_flag("--exact", ver.exact, "Also replay in rational arithmetic");
  v->add_option("-o,--out", ver.out, "Output file (default: stdout)");

  ReconstructArgs rec;
  auto* r = app.add_subcommand("reconstruct", "Primal witness from a certificate or a conic-program dual point");
  r->add_option("file", rec.file, "Certificate JSON, or {standard_form, y}")->required();
  r->add_option("--gamma", rec.gamma, "auto or a value for x_gamma");
  r->add_flag("--exact", rec.exact, "Rational reconstruction");
  r->add_option("-o,--out", rec.out, "Output file (default: stdout)");

  CertifyArgs lb;
  auto* l = app.add_subcommand("lowerbound", "Best certified lower bound of a polynomial");
  add_solver_flags(l, lb.s);
  l->add_option("--poly", lb.poly, "Polynomial text");
  l->add_option("--poly-file", lb.poly_file, "Polynomial file (.json or text)");
  l->add_option("--method", lb.method, "sos, sonc, dsos, sdsos or ag")
      ->check(CLI::IsMember({"sos", "sonc", "dsos", "sdsos", "ag"}));
  l->add_option("--half-degree", lb.half_degree, "Gram basis degree (0: automatic)");
  l->add_flag("--decomposition", lb.decomposition, "Reconstruct an explicit decomposition");

  SolverFlags sc;
  int samples = 50;
  auto* s = app.add_subcommand("selfcheck", "Barrier identity checks and Hessian counterexamples");
  s->add_option("--seed", sc.seed, "Sampling seed");
  s->add_option("--samples", samples, "Interior points per oracle");
  s->add_option("-o,--out", sc.out, "Output file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kError;
  }

  apply_thread_cap();
  try {
    if (c->parsed()) return cmd_certify(cert);
    if (v->parsed()) return cmd_verify(ver);
    if (r->parsed()) return cmd_reconstruct(rec);
    if (l->parsed()) return cmd_lowerbound(lb);
    if (s->parsed()) return cmd_selfcheck(sc, samples);
  } catch (const Error& e) {
    std::cerr << "conecert: " << e.what() << '\n';
    if (e.code() == Errc::NotCertificate || e.code() == Errc::NotDualFeasible) return kRefuted;
    if (e.code() == Errc::ExactUnavailable) return kExactUnavailable;
    return kError;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "conecert: malformed JSON input: " << e.what() << '\n';
    return kError;
  } catch (const std::exception& e) {
    std::cerr << "conecert: " << e.what() << '\n';
    return kError;
  }
  return kError;
}
