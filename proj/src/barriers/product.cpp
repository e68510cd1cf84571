#include <limits>

#include "conecert/barriers.hpp"
#include "conecert/error.hpp"

namespace conecert {

ProductOracle::ProductOracle(std::vector<OraclePtr> parts) : parts_(std::move(parts)) {
  if (parts_.empty()) throw Error(Errc::DimensionMismatch, "product of zero cones");
  for (const auto& p : parts_) {
    if (!p) throw Error(Errc::ConfigError, "null product part");
    offsets_.push_back(dim_);
    dim_ += p->dim();
    nu_ += p->nu();
  }
}

namespace {

template <class V>
V segment(const V& v, std::size_t off, std::size_t len) {
  return V(v.begin() + off, v.begin() + off + len);
}

}  // namespace

double ProductOracle::margin(const Vec& y) const {
  require_dim(y);
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < parts_.size(); ++k)
    m = std::min(m, parts_[k]->margin(y.segment(offsets_[k], parts_[k]->dim())));
  return m;
}

BarrierEval ProductOracle::eval(const Vec& y) const {
  require_dim(y);
  BarrierEval ev;
  ev.g = Vec::Zero(dim_);
  ev.H = Mat::Zero(dim_, dim_);
  for (std::size_t k = 0; k < parts_.size(); ++k) {
    const auto n = parts_[k]->dim();
    BarrierEval pk;
    try {
      pk = parts_[k]->eval(y.segment(offsets_[k], n));
    } catch (const Error& e) {
      if (e.code() == Errc::NotInterior)
        throw Error(Errc::NotInterior, "product block " + std::to_string(k) + ": " + e.what());
      throw;
    }
    ev.f += pk.f;
    ev.g.segment(offsets_[k], n) = pk.g;
    ev.H.block(offsets_[k], offsets_[k], n, n) = pk.H;
  }
  return ev;
}

double ProductOracle::value(const Vec& y) const {
  require_dim(y);
  double f = 0.0;
  for (std::size_t k = 0; k < parts_.size(); ++k) f += parts_[k]->value(y.segment(offsets_[k], parts_[k]->dim()));
  return f;
}

Vec ProductOracle::reference_point() const {
  Vec y(dim_);
  for (std::size_t k = 0; k < parts_.size(); ++k) y.segment(offsets_[k], parts_[k]->dim()) = parts_[k]->reference_point();
  return y;
}

bool ProductOracle::hyperbolic() const {
  for (const auto& p : parts_)
    if (!p->hyperbolic()) return false;
  return true;
}

bool ProductOracle::has_exact() const {
  for (const auto& p : parts_)
    if (!p->has_exact()) return false;
  return true;
}

ExactEval ProductOracle::exact_eval(const exact::RationalVector& y) const {
  if (y.size() != dim_) throw Error(Errc::DimensionMismatch, name());
  ExactEval ev{exact::RationalVector(dim_), exact::RationalMatrix(dim_, dim_)};
  for (std::size_t k = 0; k < parts_.size(); ++k) {
    const auto n = parts_[k]->dim();
    const auto off = offsets_[k];
    ExactEval pk = parts_[k]->exact_eval(segment(y, off, n));
    for (std::size_t i = 0; i < n; ++i) {
      ev.g[off + i] = pk.g[i];
      for (std::size_t j = 0; j < n; ++j) ev.H(off + i, off + j) = pk.H(i, j);
    }
  }
  return ev;
}

std::optional<bool> ProductOracle::exact_member(const exact::RationalVector& y) const {
  if (y.size() != dim_) throw Error(Errc::DimensionMismatch, name());
  bool unknown = false;
  for (std::size_t k = 0; k < parts_.size(); ++k) {
    auto r = parts_[k]->exact_member(segment(y, offsets_[k], parts_[k]->dim()));
    if (!r) unknown = true;
    else if (!*r) return false;
  }
  if (unknown) return std::nullopt;
  return true;
}

double ProductOracle::primal_margin(const Vec& x) const {
  require_dim(x);
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < parts_.size(); ++k)
    m = std::min(m, parts_[k]->primal_margin(x.segment(offsets_[k], parts_[k]->dim())));
  return m;
}

std::optional<bool> ProductOracle::exact_primal_member(const exact::RationalVector& x) const {
  if (x.size() != dim_) throw Error(Errc::DimensionMismatch, name());
  bool unknown = false;
  for (std::size_t k = 0; k < parts_.size(); ++k) {
    auto r = parts_[k]->exact_primal_member(segment(x, offsets_[k], parts_[k]->dim()));
    if (!r) unknown = true;
    else if (!*r) return false;
  }
  if (unknown) return std::nullopt;
  return true;
}

nlohmann::json ProductOracle::to_json() const {
  nlohmann::json parts = nlohmann::json::array();
  for (const auto& p : parts_) parts.push_back(p->to_json());
  return {{"kind", "Product"}, {"parts", parts}};
}

std::string ProductOracle::name() const {
  std::string s = "Product(";
  for (std::size_t k = 0; k < parts_.size(); ++k) s += (k ? "," : "") + parts_[k]->name();
  return s + ")";
}

OraclePtr product_oracle(std::vector<OraclePtr> parts) { return std::make_shared<ProductOracle>(std::move(parts)); }

}  // namespace conecert
