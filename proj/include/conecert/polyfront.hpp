#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "conecert/image_cone.hpp"
#include "conecert/ipa.hpp"

namespace conecert {

using Exponent = std::vector<unsigned>;

/// Total degree first, then lexicographic.
struct GradedLess {
  bool operator()(const Exponent& a, const Exponent& b) const;
};

unsigned degree(const Exponent& e);
bool is_even(const Exponent& e);

/// Sparse polynomial in the monomial basis; zero coefficients are never stored.
class PolySpec {
 public:
  PolySpec() = default;
  explicit PolySpec(std::size_t nvars) : nvars_(nvars) {}

  std::size_t nvars() const noexcept { return nvars_; }
  const std::map<Exponent, exact::Rational, GradedLess>& terms() const noexcept { return terms_; }

  /// Adds c·x^e (merging with an existing term, dropping zeros).
  void add(const Exponent& e, const exact::Rational& c);
  exact::Rational coeff(const Exponent& e) const;

  unsigned degree() const;
  std::vector<Exponent> support() const;
  double evaluate(const std::vector<double>& x) const;

  friend bool operator==(const PolySpec& a, const PolySpec& b) {
    return a.nvars_ == b.nvars_ && a.terms_ == b.terms_;
  }
  friend bool operator!=(const PolySpec& a, const PolySpec& b) { return !(a == b); }

 private:
  std::size_t nvars_ = 0;
  std::map<Exponent, exact::Rational, GradedLess> terms_;
};

/// Sparse text such as "x^4 - 3*x^2 + 2", "1/2 x1^2 x2 - 3e-1" or
/// "x^4*y^2 + x^2*y^4 - 3x^2y^2 + 1". Variables named x1…xn are indexed by
/// their suffix; any other names are ordered alphabetically. Throws ParseError.
PolySpec parse_poly(std::string_view text);

/// Variables print as x, y, z for up to three variables and x1…xn beyond.
std::string to_string(const PolySpec& p);

/// {"nvars": n, "terms": [{"exp": [..], "coeff": "p/q"}, ...]}
nlohmann::json to_json(const PolySpec& p);
PolySpec poly_from_json(const nlohmann::json& j);

/// All exponents of total degree ≤ d in n variables, in GradedLess order.
std::vector<Exponent> monomials_up_to(std::size_t nvars, unsigned d);

struct Circuit {
  std::vector<Exponent> outer;
  Exponent inner;
  exact::RationalVector lambda;
};

struct CircuitCover {
  std::vector<Circuit> circuits;
  /// Even support points.
  std::vector<Exponent> squares;
  /// Targets without any covering circuit.
  std::vector<Exponent> uncovered;
};

/// Every minimal circuit (affinely independent even outer points with the
/// target strictly inside their simplex) for each non-even support point and
/// each exponent in `extra_inner`. Exhaustive over subsets; |support| ≤ 20.
/// Targets are distributed over OpenMP threads.
CircuitCover enumerate_circuits(const std::vector<Exponent>& support, const std::vector<Exponent>& extra_inner = {});
CircuitCover enumerate_circuits_serial(const std::vector<Exponent>& support,
                                       const std::vector<Exponent>& extra_inner = {});

enum class PolyMethod { SOS, SONC, DSOS, SDSOS, AG };
const char* to_string(PolyMethod m) noexcept;
PolyMethod poly_method_from_string(const std::string& s);

/// A polynomial cone K_A ⊂ R^rows with the data needed to read a primal
/// point back as a decomposition.
struct PolyCone {
  PolyMethod method = PolyMethod::SOS;
  std::size_t nvars = 0;
  std::shared_ptr<const ImageCone> cone;
  exact::RationalVector b_exact;
  Vec b;
  /// The constant polynomial 1 in row coordinates.
  exact::RationalVector w_exact;
  Vec w;
  /// Row monomials (SOS family, SONC).
  std::vector<Exponent> rows;
  /// Half-degree basis (SOS, DSOS, SDSOS).
  std::vector<Exponent> basis;
  /// SDSOS blocks, DSOS off-diagonal rays (each pair twice: + then −).
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  std::vector<Circuit> circuits;
  std::vector<Exponent> squares;
  /// Odd AG: even support (with 0), the odd exponent.
  std::vector<Exponent> ag_support;
  Exponent ag_beta;
};

/// Half-degree 0 means ⌈deg p / 2⌉. Throw DegreeMismatch when deg p > 2d.
PolyCone build_sos(const PolySpec& p, unsigned half_degree = 0);
PolyCone build_dsos(const PolySpec& p, unsigned half_degree = 0);
PolyCone build_sdsos(const PolySpec& p, unsigned half_degree = 0);

/// K = ∏ P*_λ × R₊^squares. Even terms with negative coefficients are also
/// offered as circuit targets when `cover_negative_even`. Throws UncoverableTerm.
PolyCone build_sonc(const PolySpec& p, bool cover_negative_even = true);

/// Σ c_α x^α + d x^β with all α even, c_α ≥ 0 and a single non-even β
/// (pass `beta` when d = 0). Throws UnsupportedShape otherwise.
PolyCone build_odd_ag(const PolySpec& p, std::optional<Exponent> beta = std::nullopt);

PolyCone build_poly_cone(const PolySpec& p, PolyMethod method, unsigned half_degree = 0);

enum class DecompositionKind { SosGram, SoncParts, DsosCombination, SdsosParts, AgParts };
const char* to_string(DecompositionKind k) noexcept;

/// Polynomial = parts + `constant` (a nonnegative number).
struct Decomposition {
  DecompositionKind kind = DecompositionKind::SosGram;
  std::size_t nvars = 0;
  bool exact = false;
  exact::Rational constant;

  /// SOS family: m_i for Gram rows.
  std::vector<Exponent> basis;
  /// Σ X_ij m_i m_j.
  exact::RationalMatrix gram;

  /// a m_i² + 2b m_i m_j + c m_j².
  struct Block {
    std::size_t i = 0, j = 0;
    exact::Rational a, b, c;
  };
  std::vector<Block> blocks;

  /// weight·(m_i + sign·m_j)²; weight·m_i² when i == j.
  struct Ray {
    std::size_t i = 0, j = 0;
    int sign = 1;
    exact::Rational weight;
  };
  std::vector<Ray> rays;

  /// Σ outer_k x^{α_k} + inner·x^β.
  struct CircuitPart {
    Circuit circuit;
    exact::RationalVector outer;
    exact::Rational inner;
  };
  std::vector<CircuitPart> circuit_parts;
  std::vector<std::pair<Exponent, exact::Rational>> squares;

  /// Σ c_α x^α + d x^β with the AM/GM weights ν.
  struct AgPart {
    std::vector<Exponent> support;
    exact::RationalVector c;
    Exponent beta;
    exact::Rational d;
    exact::RationalVector nu;
  };
  std::optional<AgPart> ag;
};

/// Reads x ∈ K (columns of the cone's A) as a decomposition of A x.
Decomposition decomposition_from_primal(const PolyCone& pc, const exact::RationalVector& x, bool exact_values);

/// Expands in rational arithmetic. Throws MalformedPart.
PolySpec decomposition_reassemble(const Decomposition& dec);

nlohmann::json to_json(const Decomposition& dec);

struct NonnegOptions {
  unsigned half_degree = 0;
  bool want_decomposition = false;
  /// Replay the decomposition in rational arithmetic.
  bool exact = false;
  SolverConfig solver;
  /// Unset: H on hyperbolic cones (SOS, DSOS, SDSOS), B otherwise.
  std::optional<CertKind> mode;
  bool cover_negative_even = true;
  std::optional<Exponent> ag_beta;
  /// With `exact`, a certified bound in [−boundary_tol, 0) triggers rational
  /// rounding of the primal point onto p itself.
  double boundary_tol = 1e-6;
};

struct NonnegReport {
  PolyMethod method = PolyMethod::SOS;
  SolveStatus status = SolveStatus::Inconclusive;
  /// Certified lower bound on p over Rⁿ (−∞ when nothing was certified).
  double lower_bound = -std::numeric_limits<double>::infinity();
  /// Certificate of p − lower_bound·1 for the dual of the polynomial cone.
  std::optional<DualCertificate> certificate;
  SolveReport solve;
  std::optional<Decomposition> decomposition;
  std::optional<PrimalWitness> witness;
  std::string note;
};

/// sup {α : p − α ∈ cone} by the path-following method with w = 1. A member
/// (α ≥ 0) decomposes p itself; a bound-only result decomposes p − α, unless
/// exact rounding proves p itself on the boundary.
NonnegReport certify_nonneg(const PolySpec& p, PolyMethod method, const NonnegOptions& opts = {},
                            const TraceSink& sink = {});
NonnegReport certify_nonneg(const PolyCone& pc, const NonnegOptions& opts = {}, const TraceSink& sink = {});

nlohmann::json to_json(const NonnegReport& r, const PolyCone& pc, bool exact_values = false);

}  // namespace conecert
