#include "conecert/barriers.hpp"
#include "conecert/error.hpp"

namespace conecert {

exact::Rational rational_from_json(const nlohmann::json& j) {
  if (j.is_string()) return exact::parse_rational(j.get<std::string>());
  if (j.is_number_integer()) return exact::Rational(j.get<long>());
  if (j.is_number()) return exact::from_double(j.get<double>());
  throw Error(Errc::ParseError, "expected a rational, got " + j.dump());
}

nlohmann::json rational_vector_to_json(const exact::RationalVector& v) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& x : v) out.push_back(exact::to_string(x));
  return out;
}

exact::RationalVector rational_vector_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw Error(Errc::ParseError, "expected an array of rationals");
  exact::RationalVector v;
  for (const auto& x : j) v.push_back(rational_from_json(x));
  return v;
}

nlohmann::json rational_matrix_to_json(const exact::RationalMatrix& m) {
  nlohmann::json out = nlohmann::json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t k = 0; k < m.cols(); ++k) row.push_back(exact::to_string(m(i, k)));
    out.push_back(row);
  }
  return out;
}

exact::RationalMatrix rational_matrix_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) throw Error(Errc::ParseError, "expected a nonempty matrix");
  exact::RationalMatrix m(j.size(), j[0].size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_array() || j[i].size() != m.cols()) throw Error(Errc::ParseError, "ragged matrix");
    for (std::size_t k = 0; k < m.cols(); ++k) m(i, k) = rational_from_json(j[i][k]);
  }
  return m;
}

OraclePtr oracle_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind")) throw Error(Errc::ParseError, "cone spec needs a \"kind\"");
  const std::string kind = j.at("kind").get<std::string>();
  try {
    if (kind == "Orthant") return orthant_oracle(j.at("n").get<std::size_t>());
    if (kind == "ExpCone") return expcone_oracle();
    if (kind == "PowerCone") return powercone_oracle(rational_vector_from_json(j.at("lambda")));
    if (kind == "RelEntropyDual") return relentropy_dual_oracle(j.at("N").get<std::size_t>());
    if (kind == "PsdLogDet") {
      const auto m = j.at("M").get<std::size_t>();
      if (!j.contains("basis")) return psd_packed_oracle(m);
      kernels::SymBasis<exact::Rational> basis;
      for (const auto& part : j.at("basis")) {
        basis.emplace_back();
        for (const auto& e : part)
          basis.back().push_back({e.at(0).get<std::size_t>(), e.at(1).get<std::size_t>(), rational_from_json(e.at(2))});
      }
      return logdet_oracle(m, std::move(basis));
    }
    if (kind == "Product") {
      std::vector<OraclePtr> parts;
      for (const auto& p : j.at("parts")) parts.push_back(oracle_from_json(p));
      return product_oracle(std::move(parts));
    }
    if (kind == "Scaled") {
      const auto s = j.at("scale").get<std::vector<double>>();
      return scaled_oracle(oracle_from_json(j.at("base")), Eigen::Map<const Vec>(s.data(), static_cast<Eigen::Index>(s.size())));
    }
    if (kind == "Pullback") return pullback_oracle(oracle_from_json(j.at("base")), rational_matrix_from_json(j.at("A")));
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::ParseError, "cone spec " + kind + ": " + e.what());
  }
  throw Error(Errc::ParseError, "unknown cone kind \"" + kind + "\"");
}

}  // namespace conecert
