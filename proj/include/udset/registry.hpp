#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "udset/geometry.hpp"
#include "udset/spectrum.hpp"

namespace udset {

enum class GraphKind { VertexSum, Subgraph };

// A finite planar graph generating a (G) constraint. VertexSum graphs enter
// the witness through sum_x J0(t|x|); Subgraph graphs additionally subtract
// sum over edges of J0(t|x - y|).
struct ConstraintGraph {
  std::string name;
  GraphKind kind = GraphKind::Subgraph;
  std::vector<Vec2> vertices;
  std::vector<std::pair<int, int>> edges;
  int alpha = 0;
};

struct CTPair {
  std::string name;
  double theta = 0.0;
  std::vector<Vec2> g1;
  std::vector<Vec2> g2;
  double c_ct = 0.0;
};

struct Registry {
  std::vector<ConstraintGraph> graphs;
  std::vector<CTPair> ct_pairs;
  bool empty() const { return graphs.empty() && ct_pairs.empty(); }
};

inline constexpr int kRegistrySchemaVersion = 1;
inline constexpr double kUnitEdgeTolerance = 1e-9;
inline constexpr std::size_t kAlphaRecheckLimit = 20;

// Parses and validates. Coordinates may be JSON numbers or decimal strings.
// Throws FormatError (schema), GeometryError (edge length != 1) or
// AlphaMismatchError (declared alpha differs from brute force, |V| <= 20).
Registry parse_registry(const std::string& text);
Registry load_registry(const std::filesystem::path& path);

// Deterministic JSON rendering (numbers as %.17g) and its FNV-1a 64-bit hash.
std::string canonical_registry(const Registry& r);
std::uint64_t registry_hash(const Registry& r);
std::string hash_hex(std::uint64_t h);

// Independence number by exhaustive search over subsets (|V| <= 30).
int independence_number(std::size_t n, const std::vector<std::pair<int, int>>& edges);

// A profile as a list of terms coef * J0(radius * t).
struct RadialTerm {
  double radius = 0.0;
  double coef = 0.0;
};

std::vector<RadialTerm> m_terms(const ConstraintGraph& g);
std::vector<RadialTerm> t_terms(const ConstraintGraph& g);
std::vector<RadialTerm> ct_terms(const CTPair& p);
// m_terms for VertexSum graphs, t_terms for Subgraph graphs.
std::vector<RadialTerm> profile_terms(const ConstraintGraph& g);

struct ProfileEval {
  double value = 0.0;
  double abs_error_bound = 0.0;
};
ProfileEval eval_terms(const std::vector<RadialTerm>& terms, double t);

// Throw std::invalid_argument on a kind mismatch.
ProfileEval m_profile(const ConstraintGraph& g, double t);
ProfileEval t_profile(const ConstraintGraph& g, double t);
ProfileEval ct_profile(const CTPair& p, double t);

// sum_m kappa(m) * sum_k coef_k J0(r_k t_m) with a bound covering the
// truncated tail and Bessel errors. Radius-0 terms use the exact total mass.
ProfileEval spectral_pairing(const Spectrum& s, const std::vector<RadialTerm>& terms);

struct ConstraintCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double rigor = 0.0;
  bool ok = false;
};

// (G): sum kappa * profile <= alpha * density, plus |E| * f°(1) for VertexSum
// graphs whose edges are not part of the profile. f1_upper is an upper bound
// on f°(1) (ignored for Subgraph graphs).
ConstraintCheck constraint_rhs_check(const Spectrum& s, const ConstraintGraph& g, double f1_upper = 0.0);

// (CT): sum kappa * ct_profile >= 5 density - 1 - c_ct * f°(1).
ConstraintCheck ct_constraint_check(const Spectrum& s, const CTPair& p, double f1_upper);

}  // namespace udset
