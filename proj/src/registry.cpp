#include "udset/registry.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "udset/bessel.hpp"
#include "udset/errors.hpp"

namespace udset {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

constexpr double kEps = std::numeric_limits<double>::epsilon();

double parse_number(const json& v, const std::string& what) {
  double out = 0.0;
  if (v.is_number()) {
    out = v.get<double>();
  } else if (v.is_string()) {
    const auto& s = v.get_ref<const std::string&>();
    const char* b = s.data();
    const char* e = b + s.size();
    auto [ptr, ec] = std::from_chars(b, e, out);
    if (ec != std::errc() || ptr != e) throw FormatError(what + ": not a decimal number: '" + s + "'");
  } else {
    throw FormatError(what + ": expected a number or decimal string");
  }
  if (!std::isfinite(out)) throw FormatError(what + ": not finite");
  return out;
}

std::vector<Vec2> parse_points(const json& arr, const std::string& what) {
  if (!arr.is_array()) throw FormatError(what + ": expected an array of points");
  std::vector<Vec2> pts;
  pts.reserve(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const auto& p = arr[i];
    const std::string w = what + "[" + std::to_string(i) + "]";
    if (!p.is_array() || p.size() != 2) throw FormatError(w + ": expected [x, y]");
    pts.push_back({parse_number(p[0], w + ".x"), parse_number(p[1], w + ".y")});
  }
  return pts;
}

const json& require(const json& obj, const char* key, const std::string& what) {
  auto it = obj.find(key);
  if (it == obj.end()) throw FormatError(what + ": missing field '" + key + "'");
  return *it;
}

GraphKind parse_kind(const json& v, const std::string& what) {
  if (!v.is_string()) throw FormatError(what + ": kind must be a string");
  const auto& s = v.get_ref<const std::string&>();
  if (s == "vertex_sum" || s == "M") return GraphKind::VertexSum;
  if (s == "subgraph" || s == "T") return GraphKind::Subgraph;
  throw FormatError(what + ": unknown kind '" + s + "'");
}

ConstraintGraph parse_graph(const json& g, std::size_t index) {
  const std::string what = "graphs[" + std::to_string(index) + "]";
  if (!g.is_object()) throw FormatError(what + ": expected an object");
  ConstraintGraph out;
  out.name = g.value("name", what);
  out.kind = parse_kind(require(g, "kind", what), what);
  out.vertices = parse_points(require(g, "vertices", what), what + ".vertices");
  const auto& edges = require(g, "edges", what);
  if (!edges.is_array()) throw FormatError(what + ".edges: expected an array");
  const auto n = static_cast<long long>(out.vertices.size());
  for (const auto& e : edges) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer())
      throw FormatError(what + ".edges: expected [i, j] integer pairs");
    const long long i = e[0].get<long long>();
    const long long j = e[1].get<long long>();
    if (i < 0 || j < 0 || i >= n || j >= n || i == j)
      throw FormatError(what + ".edges: bad vertex index in [" + std::to_string(i) + ", " + std::to_string(j) + "]");
    out.edges.emplace_back(static_cast<int>(std::min(i, j)), static_cast<int>(std::max(i, j)));
  }
  auto sorted = out.edges;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw FormatError(what + ".edges: duplicate edge");
  const auto& a = require(g, "alpha", what);
  if (!a.is_number_integer() || a.get<long long>() < 0 || a.get<long long>() > n)
    throw FormatError(what + ": alpha must be an integer in [0, |V|]");
  out.alpha = static_cast<int>(a.get<long long>());

  for (const auto& [i, j] : out.edges) {
    const double d = distance(out.vertices[i], out.vertices[j]);
    if (std::abs(d - 1.0) > kUnitEdgeTolerance) {
      char buf[200];
      std::snprintf(buf, sizeof buf, "%s: edge [%d, %d] has length %.17g, not 1", what.c_str(), i, j, d);
      throw GeometryError(buf);
    }
  }
  if (out.vertices.size() <= kAlphaRecheckLimit) {
    const int alpha = independence_number(out.vertices.size(), out.edges);
    if (alpha != out.alpha)
      throw AlphaMismatchError(what + " ('" + out.name + "'): declared alpha " + std::to_string(out.alpha) +
                               " but the graph has independence number " + std::to_string(alpha));
  }
  return out;
}

CTPair parse_ct(const json& c, std::size_t index) {
  const std::string what = "ct_pairs[" + std::to_string(index) + "]";
  if (!c.is_object()) throw FormatError(what + ": expected an object");
  CTPair out;
  out.name = c.value("name", what);
  out.theta = parse_number(require(c, "theta", what), what + ".theta");
  if (out.theta < 0.0 || out.theta >= 2.0 * std::numbers::pi) throw FormatError(what + ".theta: must lie in [0, 2 pi)");
  const char* k1 = c.contains("g1") ? "g1" : "g1_vertices";
  const char* k2 = c.contains("g2") ? "g2" : "g2_vertices";
  out.g1 = parse_points(require(c, k1, what), what + ".g1");
  out.g2 = parse_points(require(c, k2, what), what + ".g2");
  out.c_ct = parse_number(require(c, "c_ct", what), what + ".c_ct");
  if (out.c_ct < 0.0) throw FormatError(what + ".c_ct: must be >= 0");
  return out;
}

ordered_json points_json(const std::vector<Vec2>& pts) {
  auto arr = ordered_json::array();
  for (const auto& p : pts) arr.push_back({p.x, p.y});
  return arr;
}

}  // namespace

int independence_number(std::size_t n, const std::vector<std::pair<int, int>>& edges) {
  if (n > 30) throw ResourceError("independence_number: at most 30 vertices");
  std::vector<std::uint32_t> adj(n, 0);
  for (const auto& [i, j] : edges) {
    adj[i] |= 1u << j;
    adj[j] |= 1u << i;
  }
  std::function<int(std::uint32_t)> best = [&](std::uint32_t s) -> int {
    if (s == 0) return 0;
    const int v = std::countr_zero(s);
    const std::uint32_t without = s & ~(1u << v);
    const int skip = best(without);
    const int take = 1 + best(without & ~adj[v]);
    return std::max(skip, take);
  };
  const std::uint32_t all = n == 32 ? ~0u : ((1u << n) - 1u);
  return best(all);
}

Registry parse_registry(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw FormatError(std::string("registry: invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw FormatError("registry: top level must be an object");
  const auto& ver = require(doc, "schema_version", "registry");
  if (!ver.is_number_integer() || ver.get<long long>() != kRegistrySchemaVersion)
    throw FormatError("registry: unsupported schema_version");
  Registry reg;
  try {
    if (auto it = doc.find("graphs"); it != doc.end()) {
      if (!it->is_array()) throw FormatError("registry: graphs must be an array");
      for (std::size_t i = 0; i < it->size(); ++i) reg.graphs.push_back(parse_graph((*it)[i], i));
    }
    if (auto it = doc.find("ct_pairs"); it != doc.end()) {
      if (!it->is_array()) throw FormatError("registry: ct_pairs must be an array");
      for (std::size_t i = 0; i < it->size(); ++i) reg.ct_pairs.push_back(parse_ct((*it)[i], i));
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("registry: ") + e.what());
  }
  return reg;
}

Registry load_registry(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("registry: cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_registry(ss.str());
}

std::string canonical_registry(const Registry& r) {
  ordered_json doc;
  doc["schema_version"] = kRegistrySchemaVersion;
  doc["graphs"] = ordered_json::array();
  for (const auto& g : r.graphs) {
    ordered_json e = ordered_json::array();
    for (const auto& [i, j] : g.edges) e.push_back({i, j});
    doc["graphs"].push_back({{"name", g.name},
                             {"kind", g.kind == GraphKind::VertexSum ? "vertex_sum" : "subgraph"},
                             {"vertices", points_json(g.vertices)},
                             {"edges", e},
                             {"alpha", g.alpha}});
  }
  doc["ct_pairs"] = ordered_json::array();
  for (const auto& c : r.ct_pairs)
    doc["ct_pairs"].push_back({{"name", c.name},
                               {"theta", c.theta},
                               {"g1", points_json(c.g1)},
                               {"g2", points_json(c.g2)},
                               {"c_ct", c.c_ct}});
  return doc.dump();
}

std::uint64_t registry_hash(const Registry& r) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : canonical_registry(r)) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hash_hex(std::uint64_t h) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::vector<RadialTerm> m_terms(const ConstraintGraph& g) {
  std::vector<RadialTerm> out;
  for (const auto& v : g.vertices) out.push_back({norm(v), 1.0});
  return out;
}

std::vector<RadialTerm> t_terms(const ConstraintGraph& g) {
  auto out = m_terms(g);
  // Edges are validated to unit length, so each contributes exactly -J0(t).
  for (std::size_t e = 0; e < g.edges.size(); ++e) out.push_back({1.0, -1.0});
  return out;
}

std::vector<RadialTerm> ct_terms(const CTPair& p) {
  std::vector<RadialTerm> out;
  for (std::size_t i = 0; i < p.g1.size(); ++i)
    for (std::size_t j = i + 1; j < p.g1.size(); ++j) out.push_back({distance(p.g1[i], p.g1[j]), 1.0});
  for (const auto& v : p.g2) out.push_back({norm(v), -1.0});
  return out;
}

std::vector<RadialTerm> profile_terms(const ConstraintGraph& g) {
  return g.kind == GraphKind::VertexSum ? m_terms(g) : t_terms(g);
}

ProfileEval eval_terms(const std::vector<RadialTerm>& terms, double t) {
  if (!std::isfinite(t) || t < 0.0) throw DomainError("profile: t must be finite and >= 0");
  ProfileEval out;
  double abs_sum = 0.0;
  double product_err = 0.0;
  for (const auto& term : terms) {
    const auto j = bessel::j0(term.radius * t);
    const double p = term.coef * j.value;
    out.value += p;
    out.abs_error_bound += std::abs(term.coef) * j.abs_error_bound;
    if (j.value != 1.0) product_err += std::abs(p);
    abs_sum += std::abs(p);
  }
  // Products by J0 = 1 are exact; a sum of n terms carries at most n - 1 roundings.
  const double adds = terms.empty() ? 0.0 : static_cast<double>(terms.size() - 1);
  out.abs_error_bound += kEps * product_err + adds * kEps * abs_sum * (1.0 + 1e-10);
  return out;
}

ProfileEval m_profile(const ConstraintGraph& g, double t) {
  if (g.kind != GraphKind::VertexSum) throw std::invalid_argument("m_profile: graph is not vertex_sum");
  return eval_terms(m_terms(g), t);
}

ProfileEval t_profile(const ConstraintGraph& g, double t) {
  if (g.kind != GraphKind::Subgraph) throw std::invalid_argument("t_profile: graph is not subgraph");
  return eval_terms(t_terms(g), t);
}

ProfileEval ct_profile(const CTPair& p, double t) { return eval_terms(ct_terms(p), t); }

ProfileEval spectral_pairing(const Spectrum& s, const std::vector<RadialTerm>& terms) {
  ProfileEval out;
  for (const auto& term : terms) {
    const auto e = pair_correlation(s, term.radius);
    out.value += term.coef * e.value;
    out.abs_error_bound += std::abs(term.coef) * e.rigor_bound;
  }
  return out;
}

ConstraintCheck constraint_rhs_check(const Spectrum& s, const ConstraintGraph& g, double f1_upper) {
  const auto e = spectral_pairing(s, profile_terms(g));
  ConstraintCheck out;
  out.lhs = e.value;
  out.rigor = e.abs_error_bound;
  out.rhs = g.alpha * s.density;
  if (g.kind == GraphKind::VertexSum) out.rhs += static_cast<double>(g.edges.size()) * std::max(0.0, f1_upper);
  out.ok = out.lhs <= out.rhs + out.rigor;
  return out;
}

ConstraintCheck ct_constraint_check(const Spectrum& s, const CTPair& p, double f1_upper) {
  const auto e = spectral_pairing(s, ct_terms(p));
  ConstraintCheck out;
  out.lhs = e.value;
  out.rigor = e.abs_error_bound;
  out.rhs = 5.0 * s.density - 1.0 - p.c_ct * std::max(0.0, f1_upper);
  out.ok = out.lhs + out.rigor >= out.rhs;
  return out;
}

}  // namespace udset
