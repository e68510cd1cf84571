#include <Eigen/Eigenvalues>
#include <cmath>

#include "conecert/barriers.hpp"
#include "conecert/error.hpp"

namespace conecert {

std::size_t packed_dim(std::size_t m) { return m * (m + 1) / 2; }

std::size_t packed_index(std::size_t i, std::size_t j, std::size_t m) {
  if (i > j) std::swap(i, j);
  return i * m - i * (i - 1) / 2 + (j - i);
}

Mat unpack_symmetric(const Vec& x, std::size_t m) {
  if (static_cast<std::size_t>(x.size()) != packed_dim(m)) throw Error(Errc::DimensionMismatch, "packed symmetric");
  Mat out(m, m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i; j < m; ++j) out(i, j) = out(j, i) = x(packed_index(i, j, m));
  return out;
}

exact::RationalMatrix unpack_symmetric(const exact::RationalVector& x, std::size_t m) {
  if (x.size() != packed_dim(m)) throw Error(Errc::DimensionMismatch, "packed symmetric");
  exact::RationalMatrix out(m, m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i; j < m; ++j) out(i, j) = out(j, i) = x[packed_index(i, j, m)];
  return out;
}

namespace {

double min_eigenvalue(const Mat& s) {
  if (!s.allFinite()) return -std::numeric_limits<double>::infinity();
  Eigen::SelfAdjointEigenSolver<Mat> es(s, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

class LogDetOracle final : public BarrierOracle {
 public:
  LogDetOracle(std::size_t m, kernels::SymBasis<exact::Rational> basis, bool packed)
      : m_(m), basis_(std::move(basis)), packed_(packed) {
    if (m == 0 || basis_.empty()) throw Error(Errc::DimensionMismatch, "log-det oracle needs M >= 1 and a basis");
    basis_d_.resize(basis_.size());
    for (std::size_t p = 0; p < basis_.size(); ++p)
      for (const auto& e : basis_[p]) {
        if (e.i >= m || e.j >= m) throw Error(Errc::DimensionMismatch, "basis entry outside M×M");
        basis_d_[p].push_back({e.i, e.j, e.v.get_d()});
      }
    for (std::size_t p = 0; p < basis_.size(); ++p) {
      exact::RationalMatrix lp(m, m);
      for (const auto& e : basis_[p]) lp(e.i, e.j) += e.v;
      if (!lp.is_symmetric()) throw Error(Errc::NotSymmetric, "basis matrix " + std::to_string(p));
    }
    reference_ = packed_ ? packed_identity() : least_squares_identity();
  }

  std::size_t dim() const override { return basis_.size(); }
  double nu() const override { return static_cast<double>(m_); }

  double margin(const Vec& y) const override {
    require_dim(y);
    return min_eigenvalue(lambda(y));
  }

  BarrierEval eval(const Vec& y) const override {
    require_dim(y);
    Mat s = lambda(y);
    Eigen::LLT<Mat> llt(s);
    if (!s.allFinite() || llt.info() != Eigen::Success) throw Error(Errc::NotInterior, name() + ": Λ(y) not positive definite");
    BarrierEval ev;
    ev.f = -2.0 * llt.matrixLLT().diagonal().array().log().sum();
    Mat t = llt.solve(Mat::Identity(m_, m_));
    ev.g.resize(dim());
    kernels::logdet_gradient(basis_d_, t, ev.g);
    kernels::logdet_hessian(basis_d_, t, ev.H);
    return ev;
  }

  double value(const Vec& y) const override {
    require_dim(y);
    Eigen::LLT<Mat> llt(lambda(y));
    if (llt.info() != Eigen::Success) throw Error(Errc::NotInterior, name() + ": Λ(y) not positive definite");
    return -2.0 * llt.matrixLLT().diagonal().array().log().sum();
  }

  Vec reference_point() const override { return reference_; }
  bool hyperbolic() const override { return true; }
  bool has_exact() const override { return true; }

  ExactEval exact_eval(const exact::RationalVector& y) const override {
    exact::RationalMatrix s = lambda(y);
    if (exact::psd_check(s) != exact::PsdClass::PositiveDefinite)
      throw Error(Errc::NotInterior, name() + ": Λ(y) not positive definite");
    exact::RationalMatrix t = exact::solve(s, exact::RationalMatrix::identity(m_));
    ExactEval ev{exact::RationalVector(dim()), exact::RationalMatrix(dim(), dim())};
    kernels::logdet_gradient(basis_, t, ev.g);
    kernels::logdet_hessian_serial(basis_, t, ev.H);
    return ev;
  }

  std::optional<bool> exact_member(const exact::RationalVector& y) const override {
    return exact::psd_check(lambda(y)) != exact::PsdClass::NotPSD;
  }

  double primal_margin(const Vec& x) const override {
    if (!packed_) return BarrierOracle::primal_margin(x);
    return min_eigenvalue(unpack_symmetric(x, m_));
  }

  std::optional<bool> exact_primal_member(const exact::RationalVector& x) const override {
    if (!packed_) return std::nullopt;
    return exact::psd_check(unpack_symmetric(x, m_)) != exact::PsdClass::NotPSD;
  }

  nlohmann::json to_json() const override {
    nlohmann::json j = {{"kind", "PsdLogDet"}, {"M", m_}};
    if (!packed_) {
      nlohmann::json basis = nlohmann::json::array();
      for (const auto& part : basis_) {
        nlohmann::json entries = nlohmann::json::array();
        for (const auto& e : part) entries.push_back({e.i, e.j, exact::to_string(e.v)});
        basis.push_back(entries);
      }
      j["basis"] = basis;
    }
    return j;
  }

  std::string name() const override { return "PsdLogDet(" + std::to_string(m_) + ")"; }

 private:
  Mat lambda(const Vec& y) const {
    Mat s = Mat::Zero(m_, m_);
    kernels::assemble(basis_d_, y, s);
    return s;
  }

  exact::RationalMatrix lambda(const exact::RationalVector& y) const {
    if (y.size() != dim()) throw Error(Errc::DimensionMismatch, name());
    exact::RationalMatrix s(m_, m_);
    kernels::assemble(basis_, y, s);
    return s;
  }

  Vec packed_identity() const {
    Vec y = Vec::Zero(dim());
    for (std::size_t i = 0; i < m_; ++i) y(packed_index(i, i, m_)) = 1.0;
    return y;
  }

  // argmin ‖Λ(y) − I‖_F
  Vec least_squares_identity() const {
    const std::size_t n = dim();
    std::vector<Mat> mats(n, Mat::Zero(m_, m_));
    for (std::size_t p = 0; p < n; ++p)
      for (const auto& e : basis_d_[p]) mats[p](e.i, e.j) += e.v;
    Mat gram(n, n);
    Vec rhs(n);
    for (std::size_t p = 0; p < n; ++p) {
      rhs(p) = mats[p].trace();
      for (std::size_t q = 0; q < n; ++q) gram(p, q) = mats[p].cwiseProduct(mats[q]).sum();
    }
    Vec y = gram.completeOrthogonalDecomposition().solve(rhs);
    if (!(margin(y) > 0.0)) throw Error(Errc::EmptyInterior, name() + ": no interior point near Λ(y) = I");
    return y;
  }

  std::size_t m_;
  kernels::SymBasis<exact::Rational> basis_;
  kernels::SymBasis<double> basis_d_;
  bool packed_;
  Vec reference_;
};

}  // namespace

OraclePtr logdet_oracle(std::size_t m, kernels::SymBasis<exact::Rational> basis) {
  return std::make_shared<LogDetOracle>(m, std::move(basis), false);
}

OraclePtr psd_packed_oracle(std::size_t m) {
  kernels::SymBasis<exact::Rational> basis(packed_dim(m));
  const exact::Rational half(1, 2);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i; j < m; ++j) {
      auto& b = basis[packed_index(i, j, m)];
      if (i == j) {
        b.push_back({i, i, exact::Rational(1)});
      } else {
        b.push_back({i, j, half});
        b.push_back({j, i, half});
      }
    }
  return std::make_shared<LogDetOracle>(m, std::move(basis), true);
}

}  // namespace conecert
