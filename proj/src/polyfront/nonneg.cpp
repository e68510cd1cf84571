#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "conecert/error.hpp"
#include "conecert/polyfront.hpp"

namespace conecert {

namespace {

Exponent add(const Exponent& a, const Exponent& b) {
  Exponent e(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) e[i] = a[i] + b[i];
  return e;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(Errc::MalformedPart, what);
}

void require_exponent(const Decomposition& dec, const Exponent& e) {
  require(e.size() == dec.nvars, "exponent length differs from nvars");
}

}  // namespace

Decomposition decomposition_from_primal(const PolyCone& pc, const exact::RationalVector& x, bool exact_values) {
  if (x.size() != pc.cone->cols()) throw Error(Errc::DimensionMismatch, "primal point does not match the cone");
  Decomposition dec;
  dec.nvars = pc.nvars;
  dec.exact = exact_values;
  dec.constant = 0;
  const std::size_t m = pc.basis.size();
  switch (pc.method) {
    case PolyMethod::SOS:
      dec.kind = DecompositionKind::SosGram;
      dec.basis = pc.basis;
      dec.gram = unpack_symmetric(x, m);
      break;
    case PolyMethod::DSOS: {
      dec.kind = DecompositionKind::DsosCombination;
      dec.basis = pc.basis;
      std::size_t col = 0;
      for (std::size_t i = 0; i < m; ++i) dec.rays.push_back({i, i, 1, x[col++]});
      for (std::size_t k = 0; k < pc.pairs.size(); ++k) {
        const int sign = k % 2 == 0 ? 1 : -1;
        dec.rays.push_back({pc.pairs[k].first, pc.pairs[k].second, sign, x[col++]});
      }
      break;
    }
    case PolyMethod::SDSOS:
      dec.kind = DecompositionKind::SdsosParts;
      dec.basis = pc.basis;
      for (std::size_t k = 0; k < pc.pairs.size(); ++k)
        dec.blocks.push_back({pc.pairs[k].first, pc.pairs[k].second, x[3 * k], x[3 * k + 1], x[3 * k + 2]});
      break;
    case PolyMethod::SONC: {
      dec.kind = DecompositionKind::SoncParts;
      std::size_t col = 0;
      for (const auto& c : pc.circuits) {
        Decomposition::CircuitPart part{c, {}, 0};
        for (std::size_t i = 0; i < c.outer.size(); ++i) part.outer.push_back(x[col++]);
        part.inner = x[col++];
        dec.circuit_parts.push_back(std::move(part));
      }
      for (const auto& s : pc.squares) dec.squares.emplace_back(s, x[col++]);
      break;
    }
    case PolyMethod::AG: {
      dec.kind = DecompositionKind::AgParts;
      const std::size_t n = pc.ag_support.size();
      Decomposition::AgPart ag{pc.ag_support, {}, pc.ag_beta, x[0], {}};
      for (std::size_t i = 0; i < n; ++i) {
        ag.c.push_back(x[1 + i]);
        ag.nu.push_back(x[1 + n + i]);
      }
      dec.ag = std::move(ag);
      break;
    }
  }
  return dec;
}

PolySpec decomposition_reassemble(const Decomposition& dec) {
  PolySpec p(dec.nvars);
  require(sgn(dec.constant) >= 0, "negative constant");
  p.add(Exponent(dec.nvars, 0), dec.constant);
  for (const auto& e : dec.basis) require_exponent(dec, e);
  const std::size_t m = dec.basis.size();
  auto basis_at = [&](std::size_t i) -> const Exponent& {
    require(i < m, "basis index out of range");
    return dec.basis[i];
  };

  if (dec.gram.rows() != 0 || dec.gram.cols() != 0) {
    require(dec.gram.rows() == m && dec.gram.cols() == m, "Gram matrix does not match the basis");
    require(dec.gram.is_symmetric(), "Gram matrix is not symmetric");
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) p.add(add(dec.basis[i], dec.basis[j]), dec.gram(i, j));
  }
  for (const auto& b : dec.blocks) {
    require(b.i != b.j, "SDSOS block on a single index");
    const Exponent& mi = basis_at(b.i);
    const Exponent& mj = basis_at(b.j);
    p.add(add(mi, mi), b.a);
    p.add(add(mi, mj), 2 * b.b);
    p.add(add(mj, mj), b.c);
  }
  for (const auto& r : dec.rays) {
    require(r.sign == 1 || r.sign == -1, "ray sign must be ±1");
    const Exponent& mi = basis_at(r.i);
    if (r.i == r.j) {
      p.add(add(mi, mi), r.weight);
      continue;
    }
    const Exponent& mj = basis_at(r.j);
    p.add(add(mi, mi), r.weight);
    p.add(add(mj, mj), r.weight);
    p.add(add(mi, mj), 2 * r.sign * r.weight);
  }
  for (const auto& part : dec.circuit_parts) {
    require(part.outer.size() == part.circuit.outer.size(), "circuit coefficients do not match its points");
    require_exponent(dec, part.circuit.inner);
    for (std::size_t i = 0; i < part.outer.size(); ++i) {
      require_exponent(dec, part.circuit.outer[i]);
      p.add(part.circuit.outer[i], part.outer[i]);
    }
    p.add(part.circuit.inner, part.inner);
  }
  for (const auto& [e, c] : dec.squares) {
    require_exponent(dec, e);
    p.add(e, c);
  }
  if (dec.ag) {
    require(dec.ag->c.size() == dec.ag->support.size(), "AG coefficients do not match the support");
    require_exponent(dec, dec.ag->beta);
    for (std::size_t i = 0; i < dec.ag->support.size(); ++i) {
      require_exponent(dec, dec.ag->support[i]);
      p.add(dec.ag->support[i], dec.ag->c[i]);
    }
    p.add(dec.ag->beta, dec.ag->d);
  }
  return p;
}

namespace {

nlohmann::json num(const exact::Rational& q, bool exact_values) {
  if (exact_values) return exact::to_string(q);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", exact::to_double(q));
  return std::strtod(buf, nullptr);
}

nlohmann::json nums(const exact::RationalVector& v, bool exact_values) {
  nlohmann::json a = nlohmann::json::array();
  for (const auto& q : v) a.push_back(num(q, exact_values));
  return a;
}

}  // namespace

nlohmann::json to_json(const Decomposition& dec) {
  const bool ex = dec.exact;
  nlohmann::json j = {{"kind", to_string(dec.kind)}, {"nvars", dec.nvars}, {"exact", ex},
                      {"constant", num(dec.constant, ex)}};
  if (!dec.basis.empty()) j["basis"] = dec.basis;
  if (dec.gram.rows() > 0) {
    nlohmann::json g = nlohmann::json::array();
    for (std::size_t i = 0; i < dec.gram.rows(); ++i) {
      exact::RationalVector row(dec.gram.cols());
      for (std::size_t k = 0; k < dec.gram.cols(); ++k) row[k] = dec.gram(i, k);
      g.push_back(nums(row, ex));
    }
    j["gram"] = g;
  }
  if (!dec.blocks.empty()) {
    j["blocks"] = nlohmann::json::array();
    for (const auto& b : dec.blocks) j["blocks"].push_back({{"i", b.i}, {"j", b.j}, {"block", nums({b.a, b.b, b.c}, ex)}});
  }
  if (!dec.rays.empty()) {
    j["rays"] = nlohmann::json::array();
    for (const auto& r : dec.rays)
      j["rays"].push_back({{"i", r.i}, {"j", r.j}, {"sign", r.sign}, {"weight", num(r.weight, ex)}});
  }
  if (!dec.circuit_parts.empty()) {
    j["circuits"] = nlohmann::json::array();
    for (const auto& c : dec.circuit_parts)
      j["circuits"].push_back({{"outer", c.circuit.outer},
                               {"inner", c.circuit.inner},
                               {"lambda", rational_vector_to_json(c.circuit.lambda)},
                               {"outer_coeffs", nums(c.outer, ex)},
                               {"inner_coeff", num(c.inner, ex)}});
  }
  if (!dec.squares.empty()) {
    j["squares"] = nlohmann::json::array();
    for (const auto& [e, c] : dec.squares) j["squares"].push_back({{"exp", e}, {"coeff", num(c, ex)}});
  }
  if (dec.ag)
    j["ag"] = {{"support", dec.ag->support}, {"c", nums(dec.ag->c, ex)}, {"beta", dec.ag->beta},
               {"d", num(dec.ag->d, ex)},    {"nu", nums(dec.ag->nu, ex)}};
  return j;
}

NonnegReport certify_nonneg(const PolySpec& p, PolyMethod method, const NonnegOptions& opts, const TraceSink& sink) {
  PolyCone pc = method == PolyMethod::SONC ? build_sonc(p, opts.cover_negative_even)
                : method == PolyMethod::AG ? build_odd_ag(p, opts.ag_beta)
                                           : build_poly_cone(p, method, opts.half_degree);
  return certify_nonneg(pc, opts, sink);
}

NonnegReport certify_nonneg(const PolyCone& pc, const NonnegOptions& opts, const TraceSink& sink) {
  const auto& dual = pc.cone->dual_oracle();
  if (!(pc.w.squaredNorm() > 0.0)) throw Error(Errc::ConfigError, "the constant polynomial is not in the cone span");
  SolverConfig cfg = opts.solver;
  cfg.mode = opts.mode.value_or(dual->hyperbolic() ? CertKind::H : CertKind::B);

  MembershipProblem mp{dual, pc.b, pc.w, std::nullopt, false};
  NonnegReport r;
  r.method = pc.method;
  r.solve = solve_membership(mp, cfg, sink);
  r.status = r.solve.status;
  r.certificate = r.solve.certificate;
  r.note = r.solve.note;
  if (!r.certificate) return r;
  r.lower_bound = r.solve.best_alpha;

  const Vec& y = r.certificate->y;
  const CertKind kind = r.certificate->kind;
  if (opts.exact && r.lower_bound < 0.0 && r.lower_bound >= -opts.boundary_tol) {
    try {
      PrimalWitness near = reconstruct_primal(*pc.cone, y, pc.b - r.lower_bound * pc.w, kind);
      if (auto w = round_primal_exact(*pc.cone, near.x, pc.b_exact)) {
        r.decomposition = decomposition_from_primal(pc, *w->x_exact, true);
        r.witness = std::move(*w);
        r.status = SolveStatus::CertifiedMember;
        r.lower_bound = 0.0;
        r.note += (r.note.empty() ? "" : " ") + std::string("boundary member: rounded exact decomposition");
        return r;
      }
    } catch (const Error& e) {
      if (e.code() != Errc::NotCertificate) throw;
    }
  }
  if (!opts.want_decomposition) return r;

  // Candidate shifts: p itself (constant part 0) when the bound is nonnegative,
  // then exactly the certified α.
  const exact::Rational alpha = exact::from_double(r.lower_bound);
  std::vector<exact::Rational> shifts;
  if (sgn(alpha) > 0) shifts.push_back(0);
  shifts.push_back(alpha);
  std::string failures;
  for (const auto& s : shifts) {
    exact::RationalVector bq = pc.b_exact;
    for (std::size_t i = 0; i < bq.size(); ++i) bq[i] -= s * pc.w_exact[i];
    try {
      PrimalWitness w;
      exact::RationalVector x;
      if (opts.exact) {
        w = reconstruct_primal_exact(*pc.cone, snap(y, cfg.snap_denominator_cap), bq, kind, cfg.snap_denominator_cap);
        if (w.exact_member == std::optional<bool>(false)) {
          failures += " exact membership fails at shift " + exact::to_string(s) + ";";
          continue;
        }
        x = *w.x_exact;
      } else {
        w = reconstruct_primal(*pc.cone, y, to_eigen(bq), kind);
        x = to_rational(w.x);
      }
      r.decomposition = decomposition_from_primal(pc, x, opts.exact);
      // a member's decomposition is of p − s with s ≥ 0 added back as a constant
      if (sgn(alpha) >= 0) r.decomposition->constant = s;
      r.witness = std::move(w);
      return r;
    } catch (const Error& e) {
      if (e.code() != Errc::NotCertificate && e.code() != Errc::SingularMatrix) throw;
      failures += std::string(" ") + e.what() + ";";
    }
  }
  r.note += (r.note.empty() ? "" : " ") + std::string("no decomposition:") + failures;
  return r;
}

nlohmann::json to_json(const NonnegReport& r, const PolyCone& pc, bool exact_values) {
  nlohmann::json j = {{"method", to_string(r.method)}, {"status", to_string(r.status)},
                      {"iterations", r.solve.iterations}};
  if (std::isfinite(r.lower_bound))
    j["lower_bound"] = r.lower_bound;
  else
    j["lower_bound"] = nullptr;
  if (r.certificate) j["certificate"] = to_json(*r.certificate, *pc.cone->dual_oracle(), exact_values);
  if (r.decomposition) j["decomposition"] = to_json(*r.decomposition);
  if (r.witness) j["witness"] = to_json(*r.witness, exact_values);
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

}  // namespace conecert
