#pragma once

#include <optional>
#include <string>

#include "conecert/oracle.hpp"

namespace conecert {

enum class CertKind { B, H };
enum class ExactStatus { Skipped, Proven, Refuted };

const char* to_string(CertKind k) noexcept;
const char* to_string(ExactStatus s) noexcept;
CertKind cert_kind_from_string(const std::string& s);
ExactStatus exact_status_from_string(const std::string& s);

/// A dual certificate y for b. `accepted` means the witness passed the
/// membership test of K*; a rejection only means "inconclusive".
struct DualCertificate {
  Vec y;
  CertKind kind = CertKind::B;
  Vec b;
  Vec witness;
  double y_margin = 0.0;
  double witness_margin = 0.0;
  bool accepted = false;
  ExactStatus exact = ExactStatus::Skipped;
  std::optional<exact::RationalVector> y_exact;
  std::optional<exact::RationalVector> b_exact;
};

struct CertificateSearchReport {
  Vec y_b;
  int newton_iters = 0;
  double final_residual = 0.0;
  DualCertificate certificate;
};

/// H(y) + g(y)g(y)ᵀ.
Mat build_B_matrix(const BarrierOracle& oracle, const Vec& y);

/// H⁻¹b − (yᵀb)y/(1+ν), one Hessian solve.
Vec apply_B_inverse(const BarrierOracle& oracle, const Vec& y, const Vec& b);
Vec apply_B_inverse(const LocalNormContext& ctx, double nu, const Vec& b);

DualCertificate check_certificate(const BarrierOracle& oracle, const Vec& y, const Vec& b, CertKind kind);

/// Damped Newton for −g(y_b) = b; throws MaxIters when it does not settle.
CertificateSearchReport gradient_certificate(const BarrierOracle& oracle, const Vec& b, double tol = 1e-10,
                                             int max_iters = 500, std::optional<Vec> start = std::nullopt);

/// ‖−g(y) − b‖*_y < 1.
bool dikin_sufficient_H(const BarrierOracle& oracle, const Vec& y, const Vec& b);

/// ‖δb + g(y)‖*_y, the scaled ball distance behind the B test.
double dikin_B_distance(const LocalNormContext& ctx, const Vec& b, double delta);

/// ‖b + g(δy)‖*_{δy} < 1/(2(ν+1)) for δ = 1, or for the best δ found by a
/// log grid on [1e-3, 1e3] plus golden-section refinement.
bool dikin_sufficient_B(const BarrierOracle& oracle, const Vec& y, const Vec& b, bool delta_search);

/// Best δ found by the same search.
double dikin_B_best_delta(const BarrierOracle& oracle, const Vec& y, const Vec& b);

/// Rational replay: exact witness and exact K* membership.
ExactStatus exact_verify(const BarrierOracle& oracle, const exact::RationalVector& y, const exact::RationalVector& b,
                         CertKind kind);
ExactStatus exact_verify(const BarrierOracle& oracle, DualCertificate& cert, const mpz_class& max_denominator);

/// Exact witness B(y)⁻¹b or H(y)⁻¹b.
exact::RationalVector exact_witness(const BarrierOracle& oracle, const exact::RationalVector& y,
                                    const exact::RationalVector& b, CertKind kind);

/// Twelve significant digits unless `exact`, in which case rationals as strings.
nlohmann::json vector_to_json(const Vec& v, bool exact_values = false);
Vec vector_from_json(const nlohmann::json& j);

nlohmann::json to_json(const DualCertificate& c, const BarrierOracle& oracle, bool exact_values = false);
DualCertificate certificate_from_json(const nlohmann::json& j);

}  // namespace conecert
