#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <set>

#include "conecert/error.hpp"
#include "conecert/polyfront.hpp"

namespace conecert {

unsigned degree(const Exponent& e) { return std::accumulate(e.begin(), e.end(), 0u); }

bool is_even(const Exponent& e) {
  return std::all_of(e.begin(), e.end(), [](unsigned a) { return a % 2 == 0; });
}

bool GradedLess::operator()(const Exponent& a, const Exponent& b) const {
  const unsigned da = degree(a), db = degree(b);
  if (da != db) return da < db;
  return a < b;
}

void PolySpec::add(const Exponent& e, const exact::Rational& c) {
  if (e.size() != nvars_) throw Error(Errc::DimensionMismatch, "exponent length differs from nvars");
  if (sgn(c) == 0) return;
  auto [it, inserted] = terms_.emplace(e, c);
  if (!inserted) {
    it->second += c;
    if (sgn(it->second) == 0) terms_.erase(it);
  }
}

exact::Rational PolySpec::coeff(const Exponent& e) const {
  auto it = terms_.find(e);
  return it == terms_.end() ? exact::Rational(0) : it->second;
}

unsigned PolySpec::degree() const { return terms_.empty() ? 0 : conecert::degree(terms_.rbegin()->first); }

std::vector<Exponent> PolySpec::support() const {
  std::vector<Exponent> s;
  for (const auto& [e, c] : terms_) s.push_back(e);
  return s;
}

double PolySpec::evaluate(const std::vector<double>& x) const {
  if (x.size() != nvars_) throw Error(Errc::DimensionMismatch, "evaluation point length differs from nvars");
  double s = 0.0;
  for (const auto& [e, c] : terms_) {
    double t = exact::to_double(c);
    for (std::size_t i = 0; i < nvars_; ++i) t *= std::pow(x[i], static_cast<double>(e[i]));
    s += t;
  }
  return s;
}

namespace {

struct RawTerm {
  exact::Rational coeff{1};
  std::vector<std::pair<std::string, unsigned>> powers;
};

class PolyParser {
 public:
  explicit PolyParser(std::string_view s) : s_(s) {}

  std::vector<RawTerm> parse() {
    std::vector<RawTerm> out;
    skip();
    if (at_end()) throw err("empty polynomial");
    bool first = true;
    while (!at_end()) {
      int sign = 1;
      if (peek() == '+' || peek() == '-') {
        sign = peek() == '-' ? -1 : 1;
        ++pos_;
        skip();
      } else if (!first) {
        throw err("expected '+' or '-'");
      }
      RawTerm t = term();
      if (sign < 0) t.coeff = -t.coeff;
      out.push_back(std::move(t));
      first = false;
      skip();
    }
    return out;
  }

 private:
  RawTerm term() {
    RawTerm t;
    bool any = false;
    for (;;) {
      skip();
      if (at_end()) break;
      const char c = peek();
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
        t.coeff *= number();
      } else if (std::isalpha(static_cast<unsigned char>(c))) {
        std::string name = identifier();
        unsigned power = 1;
        skip();
        if (!at_end() && peek() == '^') {
          ++pos_;
          skip();
          power = integer();
        }
        t.powers.emplace_back(std::move(name), power);
      } else {
        break;
      }
      any = true;
      skip();
      if (!at_end() && peek() == '*') {
        ++pos_;
        skip();
        if (at_end()) throw err("dangling '*'");
      }
    }
    if (!any) throw err("expected a term");
    return t;
  }

  exact::Rational number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
    };
    digits();
    if (!at_end() && peek() == '.') {
      ++pos_;
      digits();
    }
    if (!at_end() && (peek() == 'e' || peek() == 'E') && pos_ + 1 < s_.size() &&
        (std::isdigit(static_cast<unsigned char>(s_[pos_ + 1])) || s_[pos_ + 1] == '-' || s_[pos_ + 1] == '+')) {
      ++pos_;
      if (peek() == '-' || peek() == '+') ++pos_;
      digits();
    }
    if (!at_end() && peek() == '/' && pos_ + 1 < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_ + 1]))) {
      ++pos_;
      digits();
    }
    try {
      return exact::parse_rational(s_.substr(start, pos_ - start));
    } catch (const Error&) {
      throw err("bad number");
    }
  }

  unsigned integer() {
    const std::size_t start = pos_;
    while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
    if (start == pos_) throw err("expected an exponent");
    return static_cast<unsigned>(std::stoul(std::string(s_.substr(start, pos_ - start))));
  }

  std::string identifier() {
    const std::size_t start = pos_;
    while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_')) ++pos_;
    return std::string(s_.substr(start, pos_ - start));
  }

  void skip() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(peek()))) ++pos_;
  }
  bool at_end() const { return pos_ >= s_.size(); }
  char peek() const { return s_[pos_]; }
  Error err(const std::string& what) const {
    return Error(Errc::ParseError, what + " at position " + std::to_string(pos_) + " in \"" + std::string(s_) + "\"");
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

// "x12" → 12, anything else → 0
unsigned indexed_name(const std::string& name) {
  if (name.size() < 2 || name[0] != 'x') return 0;
  for (std::size_t i = 1; i < name.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(name[i]))) return 0;
  return static_cast<unsigned>(std::stoul(name.substr(1)));
}

std::vector<std::string> variable_names(std::size_t n) {
  std::vector<std::string> v;
  if (n <= 3) {
    for (std::size_t i = 0; i < n; ++i) v.push_back(std::string(1, "xyz"[i]));
    return v;
  }
  for (std::size_t i = 1; i <= n; ++i) v.push_back("x" + std::to_string(i));
  return v;
}

}  // namespace

PolySpec parse_poly(std::string_view text) {
  std::vector<RawTerm> raw = PolyParser(text).parse();
  std::set<std::string> names;
  for (const auto& t : raw)
    for (const auto& [n, e] : t.powers) names.insert(n);

  const bool indexed = !names.empty() && std::all_of(names.begin(), names.end(), [](const std::string& n) {
    return indexed_name(n) > 0;
  });
  std::map<std::string, std::size_t> slot;
  std::size_t nvars = 0;
  if (indexed) {
    for (const auto& n : names) {
      slot[n] = indexed_name(n) - 1;
      nvars = std::max<std::size_t>(nvars, indexed_name(n));
    }
  } else {
    for (const auto& n : names) slot[n] = nvars++;
  }

  PolySpec p(nvars);
  for (const auto& t : raw) {
    Exponent e(nvars, 0);
    for (const auto& [n, pw] : t.powers) e[slot.at(n)] += pw;
    p.add(e, t.coeff);
  }
  return p;
}

std::string to_string(const PolySpec& p) {
  if (p.terms().empty()) return "0";
  const auto names = variable_names(p.nvars());
  std::string out;
  for (auto it = p.terms().rbegin(); it != p.terms().rend(); ++it) {
    const auto& [e, c] = *it;
    const bool neg = sgn(c) < 0;
    const exact::Rational mag = abs(c);
    if (out.empty())
      out += neg ? "-" : "";
    else
      out += neg ? " - " : " + ";
    std::string mono;
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (e[i] == 0) continue;
      if (!mono.empty()) mono += "*";
      mono += names[i];
      if (e[i] > 1) mono += "^" + std::to_string(e[i]);
    }
    if (mono.empty())
      out += exact::to_string(mag);
    else if (mag == 1)
      out += mono;
    else
      out += exact::to_string(mag) + "*" + mono;
  }
  return out;
}

nlohmann::json to_json(const PolySpec& p) {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& [e, c] : p.terms()) terms.push_back({{"exp", e}, {"coeff", exact::to_string(c)}});
  return {{"nvars", p.nvars()}, {"terms", terms}};
}

PolySpec poly_from_json(const nlohmann::json& j) {
  try {
    PolySpec p(j.at("nvars").get<std::size_t>());
    for (const auto& t : j.at("terms")) p.add(t.at("exp").get<Exponent>(), rational_from_json(t.at("coeff")));
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::ParseError, std::string("polynomial JSON: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == Errc::DimensionMismatch) throw Error(Errc::ParseError, e.what());
    throw;
  }
}

std::vector<Exponent> monomials_up_to(std::size_t nvars, unsigned d) {
  std::vector<Exponent> out;
  Exponent e(nvars, 0);
  // odometer over the box [0, d]ⁿ, keeping degree ≤ d
  for (;;) {
    if (degree(e) <= d) out.push_back(e);
    std::size_t i = 0;
    while (i < nvars) {
      if (++e[i] <= d) break;
      e[i] = 0;
      ++i;
    }
    if (i == nvars) break;
  }
  std::sort(out.begin(), out.end(), GradedLess{});
  return out;
}

const char* to_string(PolyMethod m) noexcept {
  switch (m) {
    case PolyMethod::SOS: return "sos";
    case PolyMethod::SONC: return "sonc";
    case PolyMethod::DSOS: return "dsos";
    case PolyMethod::SDSOS: return "sdsos";
    case PolyMethod::AG: return "ag";
  }
  return "?";
}

PolyMethod poly_method_from_string(const std::string& s) {
  for (PolyMethod m : {PolyMethod::SOS, PolyMethod::SONC, PolyMethod::DSOS, PolyMethod::SDSOS, PolyMethod::AG})
    if (s == to_string(m)) return m;
  throw Error(Errc::ConfigError, "unknown method \"" + s + "\" (sos, sonc, dsos, sdsos, ag)");
}

const char* to_string(DecompositionKind k) noexcept {
  switch (k) {
    case DecompositionKind::SosGram: return "SOS-Gram";
    case DecompositionKind::SoncParts: return "SONC-parts";
    case DecompositionKind::DsosCombination: return "DSOS-combination";
    case DecompositionKind::SdsosParts: return "SDSOS-parts";
    case DecompositionKind::AgParts: return "AG-parts";
  }
  return "?";
}

}  // namespace conecert
