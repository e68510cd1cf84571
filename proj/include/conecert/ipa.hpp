#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "conecert/certify.hpp"
#include "conecert/image_cone.hpp"

namespace conecert {

struct SolverConfig {
  double eta = 0.25;
  double theta = 0.125;
  double tol = 1e-8;
  int max_iters = 2000;
  CertKind mode = CertKind::H;
  mpz_class snap_denominator_cap = mpz_class("1000000000000");
  /// Stop at the first certified α ≥ 0 (membership proven).
  bool early_exit = true;
  int centering_iters = 100;

  /// η actually used: min(η, 0.9/(2(1+ν))) in B mode.
  double effective_eta(double nu) const;
};

SolverConfig solver_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SolverConfig& c);

/// max α s.t. b − αw ∈ K, with the barrier oracle living on K*. The dual is
/// min bᵀy s.t. wᵀy = 1, y ∈ K*.
struct MembershipProblem {
  OraclePtr oracle;
  Vec b;
  /// Empty: w = −g(y₀).
  Vec w;
  std::optional<Vec> y0;
  /// Confirm w ∈ K° by a gradient-certificate round trip before solving.
  bool check_w = true;
};

struct PathIterate {
  Vec y;
  double tau = 1.0;
  double alpha = 0.0;
  double centrality = 0.0;
  int newton_steps = 0;
};

struct TraceEntry {
  int iter = 0;
  double tau = 0.0;
  double alpha = 0.0;
  double centrality = 0.0;
  bool certified = false;
  std::optional<GammaInterval> gamma;
  /// Dual iterate (normalised to wᵀy = 1).
  Vec y;
};

nlohmann::json to_json(const TraceEntry& e);

enum class SolveStatus { CertifiedMember, CertifiedBoundOnly, Inconclusive };
const char* to_string(SolveStatus s) noexcept;

struct SolveReport {
  SolveStatus status = SolveStatus::Inconclusive;
  double best_alpha = -std::numeric_limits<double>::infinity();
  std::optional<DualCertificate> certificate;
  Vec best_y;
  double best_tau = 0.0;
  int iterations = 0;
  std::vector<TraceEntry> trace;
  std::string note;
  /// Dimension-level constants used by the run.
  double nu = 0.0;
  double eta = 0.0;
  Vec w;
};

/// Called after every iterate; the CLI uses it to stream JSON lines.
using TraceSink = std::function<void(const TraceEntry&)>;

/// Resolves w and a dual start with wᵀy₀ > 0; throws ConfigError when w is
/// not interior (or not positive on any dual interior point).
struct PreparedProblem {
  OraclePtr oracle;
  Vec b;
  Vec w;
  Vec y0;
};
PreparedProblem prepare(const MembershipProblem& p);

/// Scales y₀ onto wᵀy = 1, picks τ₀ minimising the initial centrality and
/// centers to η/2. Throws CenteringFailed.
PathIterate initialize(const PreparedProblem& p, const SolverConfig& cfg);

/// τ ← τ(1 − θ/√ν), then projected Newton until centrality ≤ η.
/// Throws StepFailed.
PathIterate step(const PreparedProblem& p, const PathIterate& it, double eta, double theta, int max_newton = 50);

/// α = τμ and centrality at y for the given τ (μ the multiplier of wᵀy = 1).
PathIterate evaluate_iterate(const PreparedProblem& p, const Vec& y, double tau);

SolveReport solve_membership(const MembershipProblem& problem, const SolverConfig& cfg, const TraceSink& sink = {});

struct StandardFormReport {
  SolveReport path;
  /// Best certified objective bound γ = −α and the dual value bᵀy it came with.
  double gamma = std::numeric_limits<double>::infinity();
  double dual_value = -std::numeric_limits<double>::infinity();
  Vec y;
  std::optional<AffineWitness> witness;
  std::optional<PrimalWitness> primal;
  /// Snapped-dual replay: exact affine family and, for orthants, the exact best γ.
  std::optional<AffineWitness> exact_witness;
  std::optional<exact::Rational> exact_gamma;
};

/// Path-follows the dual of min cᵀx s.t. Ax = b, x ∈ K through the stacked
/// membership problem (γ, −b) ∈ K_{c,A}; every trace entry carries the
/// γ-interval of its iterate. Stops when the gap γ − bᵀy ≤ tol.
StandardFormReport solve_standard_form(const StandardForm& sf, const SolverConfig& cfg,
                                       bool reconstruct = true, const TraceSink& sink = {});

nlohmann::json to_json(const SolveReport& r, bool exact_values = false);
nlohmann::json to_json(const StandardFormReport& r, bool exact_values = false);

/// One JSON object per line.
void write_trace(std::ostream& os, const std::vector<TraceEntry>& trace);

}  // namespace conecert
