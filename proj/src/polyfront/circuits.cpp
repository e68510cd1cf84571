#include <algorithm>
#include <set>

#include "conecert/error.hpp"
#include "conecert/polyfront.hpp"

namespace conecert {

namespace {

constexpr std::size_t kMaxSupport = 20;

// λ with Σλᵢαᵢ = β, Σλᵢ = 1 when the points are affinely independent and β
// lies strictly inside their simplex.
std::optional<exact::RationalVector> barycentric(const std::vector<const Exponent*>& pts, const Exponent& beta) {
  const std::size_t r = pts.size(), n = beta.size();
  exact::RationalMatrix m(n + 1, r);
  exact::RationalVector rhs(n + 1);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < r; ++i) m(k, i) = (*pts[i])[k];
    rhs[k] = beta[k];
  }
  for (std::size_t i = 0; i < r; ++i) m(n, i) = 1;
  rhs[n] = 1;

  std::vector<std::size_t> rows = exact::independent_rows(m);
  if (rows.size() < r) return std::nullopt;  // affinely dependent
  exact::RationalMatrix sq(r, r);
  exact::RationalVector sr(r);
  for (std::size_t a = 0; a < r; ++a) {
    for (std::size_t i = 0; i < r; ++i) sq(a, i) = m(rows[a], i);
    sr[a] = rhs[rows[a]];
  }
  exact::RationalVector lambda = exact::solve(sq, sr);
  if (m * lambda != rhs) return std::nullopt;
  for (const auto& l : lambda)
    if (sgn(l) <= 0) return std::nullopt;
  return lambda;
}

// Cheap necessary condition: every coordinate of β lies within the range of
// the candidate points' coordinates.
bool in_bounding_box(const std::vector<const Exponent*>& pts, const Exponent& beta) {
  for (std::size_t k = 0; k < beta.size(); ++k) {
    unsigned lo = (*pts[0])[k], hi = lo;
    for (const auto* p : pts) {
      lo = std::min(lo, (*p)[k]);
      hi = std::max(hi, (*p)[k]);
    }
    if (beta[k] < lo || beta[k] > hi) return false;
  }
  return true;
}

std::vector<Circuit> circuits_for(const std::vector<Exponent>& even, const Exponent& beta) {
  std::vector<Circuit> out;
  std::vector<const Exponent*> cand;
  for (const auto& e : even)
    if (e != beta) cand.push_back(&e);
  const std::size_t maxr = std::min(cand.size(), beta.size() + 1);
  for (std::size_t r = 2; r <= maxr; ++r) {
    std::vector<std::size_t> idx(r);
    for (std::size_t i = 0; i < r; ++i) idx[i] = i;
    for (;;) {
      std::vector<const Exponent*> pts;
      for (std::size_t i : idx) pts.push_back(cand[i]);
      if (in_bounding_box(pts, beta)) {
        if (auto lambda = barycentric(pts, beta)) {
          Circuit c;
          for (const auto* p : pts) c.outer.push_back(*p);
          c.inner = beta;
          c.lambda = std::move(*lambda);
          out.push_back(std::move(c));
        }
      }
      // next r-subset in lexicographic order
      std::size_t i = r;
      while (i > 0 && idx[i - 1] == cand.size() - r + i - 1) --i;
      if (i == 0) break;
      ++idx[i - 1];
      for (std::size_t k = i; k < r; ++k) idx[k] = idx[k - 1] + 1;
    }
  }
  return out;
}

struct Targets {
  std::vector<Exponent> even;
  std::vector<Exponent> targets;
};

Targets split(const std::vector<Exponent>& support, const std::vector<Exponent>& extra_inner) {
  if (support.size() > kMaxSupport)
    throw Error(Errc::UnsupportedShape, "circuit enumeration is limited to " + std::to_string(kMaxSupport) +
                                            " support points, got " + std::to_string(support.size()));
  std::set<Exponent> seen;
  Targets t;
  for (const auto& e : support) {
    if (!seen.insert(e).second) continue;
    if (!support.empty() && e.size() != support.front().size())
      throw Error(Errc::DimensionMismatch, "exponents of different lengths");
    (is_even(e) ? t.even : t.targets).push_back(e);
  }
  for (const auto& e : extra_inner)
    if (std::find(t.targets.begin(), t.targets.end(), e) == t.targets.end()) t.targets.push_back(e);
  return t;
}

CircuitCover assemble(Targets t, std::vector<std::vector<Circuit>> per) {
  CircuitCover cover;
  cover.squares = std::move(t.even);
  for (std::size_t k = 0; k < t.targets.size(); ++k) {
    if (per[k].empty()) cover.uncovered.push_back(t.targets[k]);
    for (auto& c : per[k]) cover.circuits.push_back(std::move(c));
  }
  return cover;
}

}  // namespace

CircuitCover enumerate_circuits_serial(const std::vector<Exponent>& support, const std::vector<Exponent>& extra_inner) {
  Targets t = split(support, extra_inner);
  std::vector<std::vector<Circuit>> per(t.targets.size());
  for (std::size_t k = 0; k < t.targets.size(); ++k) per[k] = circuits_for(t.even, t.targets[k]);
  return assemble(std::move(t), std::move(per));
}

CircuitCover enumerate_circuits(const std::vector<Exponent>& support, const std::vector<Exponent>& extra_inner) {
  Targets t = split(support, extra_inner);
  std::vector<std::vector<Circuit>> per(t.targets.size());
  const long nt = static_cast<long>(t.targets.size());
#pragma omp parallel for schedule(dynamic)
  for (long k = 0; k < nt; ++k) per[k] = circuits_for(t.even, t.targets[k]);
  return assemble(std::move(t), std::move(per));
}

}  // namespace conecert
