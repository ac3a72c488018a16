#include "bohmdyn/catalog.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <set>

#include "bohmdyn/errors.hpp"

namespace bohmdyn {

namespace {

struct ParsedId {
  std::string name;
  std::optional<std::string> token;
  std::map<std::string, std::string> keys;
};

ParsedId split_id(const std::string& id) {
  ParsedId out;
  const auto colon = id.find(':');
  out.name = id.substr(0, colon);
  if (out.name.empty()) throw ConfigError("empty state id");
  if (colon == std::string::npos) return out;

  const std::string rest = id.substr(colon + 1);
  if (rest.empty()) throw ConfigError("state id '" + id + "' has an empty parameter list");
  std::size_t start = 0;
  bool first = true;
  while (start <= rest.size()) {
    const auto comma = rest.find(',', start);
    const std::string item = rest.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    if (item.empty()) throw ConfigError("state id '" + id + "' has an empty parameter");
    const auto eq = item.find('=');
    if (eq == std::string::npos) {
      if (!first) throw ConfigError("state id '" + id + "': bare token '" + item + "' must come first");
      out.token = item;
    } else {
      const std::string key = item.substr(0, eq);
      if (key.empty() || eq + 1 == item.size()) throw ConfigError("state id '" + id + "': malformed '" + item + "'");
      if (!out.keys.emplace(key, item.substr(eq + 1)).second) {
        throw ConfigError("state id '" + id + "': duplicate key '" + key + "'");
      }
    }
    first = false;
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

class Reader {
 public:
  Reader(const std::string& id, ParsedId parsed) : id_(id), parsed_(std::move(parsed)) {}

  double number(const std::string& key, double fallback) {
    used_.insert(key);
    const auto it = parsed_.keys.find(key);
    if (it == parsed_.keys.end()) return fallback;
    double x = 0.0;
    const auto& s = it->second;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(x)) {
      throw ConfigError("state id '" + id_ + "': " + key + "=" + s + " is not a finite number");
    }
    return x;
  }

  int integer(const std::string& key, int fallback) {
    const double x = number(key, fallback);
    if (x != std::floor(x)) throw ConfigError("state id '" + id_ + "': " + key + " must be an integer");
    return static_cast<int>(x);
  }

  const std::optional<std::string>& token() const { return parsed_.token; }

  void require_no_token() const {
    if (parsed_.token) throw ConfigError("state id '" + id_ + "': unexpected token '" + *parsed_.token + "'");
  }

  void finish() const {
    for (const auto& [key, value] : parsed_.keys) {
      if (!used_.count(key)) throw ConfigError("state id '" + id_ + "': unknown key '" + key + "'");
    }
  }

 private:
  std::string id_;
  ParsedId parsed_;
  std::set<std::string> used_;
};

std::string format_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

WavefunctionModel relabel(const WavefunctionModel& model, std::string label) {
  ModelTraits traits = model.traits();
  traits.label = std::move(label);
  return WavefunctionModel(std::move(traits), model.potential(), model.kernel());
}

std::vector<std::string> split_terms(const std::string& id, const std::optional<std::string>& token) {
  if (!token) throw ConfigError("state id '" + id + "' needs a term list such as ho0+ho1");
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto plus = token->find('+', start);
    out.push_back(token->substr(start, plus == std::string::npos ? std::string::npos : plus - start));
    if (out.back().empty()) throw ConfigError("state id '" + id + "' has an empty term");
    if (plus == std::string::npos) break;
    start = plus + 1;
  }
  return out;
}

std::optional<HydrogenOrbital> orbital_named(const std::string& s) {
  if (s == "1s") return HydrogenOrbital::s1;
  if (s == "2s") return HydrogenOrbital::s2;
  if (s == "2pz") return HydrogenOrbital::p2z;
  return std::nullopt;
}

/// One-particle basis named by a short term: hoN or 1s/2s/2pz.
WavefunctionModel basis_term(const std::string& id, const std::string& term, double omega, double Z) {
  if (term.size() > 2 && term.rfind("ho", 0) == 0) {
    int n = 0;
    const auto [ptr, ec] = std::from_chars(term.data() + 2, term.data() + term.size(), n);
    if (ec == std::errc() && ptr == term.data() + term.size() && n >= 0 && n <= 12) {
      return make_harmonic_oscillator_1d(n, omega);
    }
  }
  if (auto orbital = orbital_named(term)) return make_hydrogenlike(*orbital, Z);
  throw ConfigError("state id '" + id + "': unknown term '" + term + "' (expected ho0..ho12, 1s, 2s or 2pz)");
}

WavefunctionModel build(const std::string& id) {
  ParsedId parsed = split_id(id);
  const std::string name = parsed.name;
  Reader r(id, std::move(parsed));

  if (name == "ho1d") {
    r.require_no_token();
    const int n = r.integer("n", 0);
    const double omega = r.number("omega", 1.0);
    r.finish();
    if (n < 0 || n > 12) throw ConfigError("state id '" + id + "': n must be in 0..12");
    return make_harmonic_oscillator_1d(n, omega);
  }
  if (name == "hydrogen") {
    if (!r.token()) throw ConfigError("state id '" + id + "' needs an orbital: 1s, 2s or 2pz");
    const auto orbital = orbital_named(*r.token());
    if (!orbital) throw ConfigError("state id '" + id + "': unknown orbital '" + *r.token() + "'");
    const double Z = r.number("Z", 1.0);
    r.finish();
    return make_hydrogenlike(*orbital, Z);
  }
  if (name == "hooke") {
    r.require_no_token();
    r.finish();
    return make_hookes_atom();
  }
  if (name == "gauss") {
    r.require_no_token();
    const double sigma = r.number("sigma", 1.0);
    const double k = r.number("k", 0.0);
    r.finish();
    return make_free_gaussian_packet(sigma, k);
  }
  if (name == "plane") {
    r.require_no_token();
    const double k = r.number("k", 1.0);
    r.finish();
    return make_plane_wave(k);
  }
  if (name == "super" || name == "product") {
    const auto terms = split_terms(id, r.token());
    const double omega = r.number("omega", 1.0);
    const double Z = r.number("Z", 1.0);
    r.finish();
    std::string label = name + ":" + *r.token();
    if (omega != 1.0) label += ",omega=" + format_number(omega);
    if (Z != 1.0) label += ",Z=" + format_number(Z);
    if (name == "super") {
      std::vector<SuperpositionTerm> parts;
      for (const auto& t : terms) parts.push_back({Complex(1.0, 0.0), basis_term(id, t, omega, Z)});
      return relabel(make_superposition(parts), label);
    }
    std::vector<WavefunctionModel> factors;
    for (const auto& t : terms) factors.push_back(basis_term(id, t, omega, Z));
    return relabel(make_product_state(factors), label);
  }
  throw ConfigError("unknown state '" + name + "' in id '" + id + "'");
}

}  // namespace

WavefunctionModel parse_state_id(const std::string& id) {
  try {
    return build(id);
  } catch (const DomainError& e) {
    throw ConfigError("state id '" + id + "': " + e.what());
  }
}

std::vector<std::string> catalog_ids() {
  return {"ho1d:n=0,omega=1", "ho1d:n=1,omega=1", "ho1d:n=2,omega=1", "ho1d:n=3,omega=1",
          "hydrogen:1s,Z=1",  "hydrogen:2s,Z=1",  "hydrogen:2pz,Z=1", "hooke",
          "gauss:sigma=1,k=2", "super:ho0+ho1",   "product:ho0+ho0"};
}

const char* state_id_grammar() {
  return "State ids: name[:token][,key=value]*\n"
         "  ho1d:n=N,omega=W        1D oscillator eigenstate, N in 0..12 (defaults n=0, omega=1)\n"
         "  hydrogen:ORB,Z=Z        ORB in 1s, 2s, 2pz (default Z=1)\n"
         "  hooke                   Hooke's atom ground state, omega=1/2, E=2\n"
         "  gauss:sigma=S,k=K       free Gaussian packet (defaults sigma=1, k=0)\n"
         "  super:T+T[+T...]        equal-weight superposition of terms hoN or ORB (keys omega, Z)\n"
         "  product:T+T[+T...]      product of one-particle terms hoN or ORB (keys omega, Z)\n"
         "  plane:k=K               1D plane wave (not normalizable)\n"
         "Unknown names or keys are errors.";
}

}  // namespace bohmdyn
