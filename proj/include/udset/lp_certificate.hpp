#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "udset/grid_set.hpp"
#include "udset/registry.hpp"
#include "udset/spectrum.hpp"

namespace udset {

// Nonnegative witness coefficients. w_m follows the vertex_sum graphs of the
// registry in file order, w_t the subgraph graphs, w_theta the CT pairs.
struct WitnessCoefficients {
  double v0 = 0.0;
  double v1 = 0.0;
  double v196 = 0.0;
  std::vector<double> w_m;
  std::vector<double> w_t;
  std::vector<double> w_theta;
};

inline constexpr double kDefaultBudget = 15.0;
inline constexpr double kDefaultRMax = 4.0;
inline constexpr double kA2Radius = 1.96;

// Zero coefficients shaped for the registry.
WitnessCoefficients zero_coefficients(const Registry& r);

// Throws std::invalid_argument for negative or non-finite entries or a
// shape mismatch with the registry.
void validate_coefficients(const Registry& r, const WitnessCoefficients& c);

// v0 + v1 + v196 + sum w_m + 2 sum w_t + 2 sum w_theta.
double coefficient_sum(const WitnessCoefficients& c);

// W as a list of coef * J0(radius t). Radii that agree to 1e-12 (relative)
// are merged onto their most frequent representative.
std::vector<RadialTerm> compile_witness(const Registry& r, const WitnessCoefficients& c);

ProfileEval witness_eval(const Registry& r, const WitnessCoefficients& c, double t);

// 0.6 * sum |coef_k| * radius_k over the compiled terms, a bound on |W'|.
// Throws DomainError if a radius exceeds r_max.
double witness_lipschitz(const Registry& r, const WitnessCoefficients& c, double r_max = kDefaultRMax);
// r_max * coefficient_sum * 0.6, the cruder bound quoted with the budget.
double budget_lipschitz(const WitnessCoefficients& c, double r_max = kDefaultRMax);

// q(delta) = a delta^2 + b delta + c with a = -(1 - v196),
// b = v0 + sum alpha_M w_M + sum alpha_T w_T - 5 sum w_theta, c = sum w_theta.
struct Quadratic {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double operator()(double d) const { return (a * d + b) * d + c; }
};

Quadratic lemma_quadratic(const Registry& r, const WitnessCoefficients& c);
// Same with explicit independence numbers, one per w_m and w_t entry.
Quadratic lemma_quadratic(const WitnessCoefficients& c, const std::vector<int>& alpha_m,
                          const std::vector<int>& alpha_t);

// Largest delta in [0, 1] with q(delta) >= 0. If q < 0 on all of [0, 1],
// returns 0 with found = false.
struct QuadraticRoot {
  double delta_star = 0.0;
  bool found = false;
  Quadratic q;
};
QuadraticRoot max_root_in_unit(const Quadratic& q);
QuadraticRoot quadratic_root(const Registry& r, const WitnessCoefficients& c);

// v1 + v196 + sum |E_M| w_M + sum |E_T| w_T + sum c_CT w_theta: the factor
// multiplying gamma in the perturbed quadratic.
double gamma_penalty(const Registry& r, const WitnessCoefficients& c);

// Largest gamma with q(delta) + gamma * penalty < 0 on [delta_star + epsilon, 1].
// Throws FeasibilityError if delta_star + epsilon >= target or no gamma > 0 exists.
double gamma_extract(const Registry& r, const WitnessCoefficients& c, double epsilon, double target);

enum class Verdict { Certified, Failed };

struct CertificateReport {
  double w_at_zero = 0.0;
  double min_grid_value = 0.0;
  double grid_step = 0.0;
  double margin = 0.0;
  double lipschitz_bound = 0.0;
  double tail_start = 0.0;
  double tail_floor = 0.0;
  // End of the grid extension used when the envelope bound fails at tail_start.
  double tail_extended_to = 0.0;
  // "envelope" (bound holds at tail_start) or "grid+envelope" (fine grid
  // extended until it does); empty when neither certifies.
  std::string tail_route;
  double max_eval_error = 0.0;
  Quadratic quadratic;
  double delta_star = 0.0;
  double gamma = 0.0;
  Verdict verdict = Verdict::Failed;
  std::string reason;
};

struct VerifyOptions {
  double grid_step = 1e-5;
  double margin = 0.003;
  double tail_start = 20.0;
  double r_max = kDefaultRMax;
  // The grid may be extended up to tail_start * this factor when the
  // envelope bound does not yet hold at tail_start.
  double max_tail_factor = 4.0;
};

// Mathematical failures give a Failed verdict; malformed coefficients throw.
CertificateReport verify_witness(const Registry& r, const WitnessCoefficients& c, const VerifyOptions& opts = {});

struct LPOptions {
  double grid_step = 0.05;
  double tail_start = 20.0;
  double slack = 0.005;
  double budget = kDefaultBudget;
  bool use_v1 = true;
  bool use_v196 = true;
  // Adds the envelope tail bound at tail_start as linear constraints.
  bool enforce_tail = true;
  int max_cut_rounds = 40;
  double cut_scan_step = 1e-3;
};

struct LPResult {
  bool feasible = false;
  WitnessCoefficients coefficients;
  double objective = 0.0;
  // Phase-one optimum when infeasible (how far the best point misses).
  double infeasibility = 0.0;
  int cut_rounds = 0;
  std::size_t constraints = 0;
  std::string message;
};

LPResult solve_feasibility(const Registry& r, double delta_plus, const LPOptions& opts = {});

struct CertifyOptions {
  double delta_lo = 0.0;
  double delta_hi = 0.5;
  double tolerance = 1e-4;
  double epsilon = 1e-3;
  double target = 0.22936;
  LPOptions lp;
  VerifyOptions verify;
};

struct Certificate {
  std::string registry_hash;
  double delta_plus = 0.0;
  double epsilon = 0.0;
  double target = 0.0;
  WitnessCoefficients coefficients;
  CertificateReport report;
};

struct CertifyAttempt {
  LPResult lp;
  // Present whenever the LP was feasible; report.verdict says whether it verified.
  std::optional<Certificate> certificate;
};

// One LP solve at delta_plus followed by verification and gamma extraction.
CertifyAttempt certify_at(const Registry& r, double delta_plus, const CertifyOptions& opts = {});

// Bisects delta_plus for the smallest value whose LP solution verifies.
// Returns nullopt if even delta_hi fails.
std::optional<Certificate> certify_bound(const Registry& r, const CertifyOptions& opts = {});

void write_certificate(std::ostream& out, const Certificate& c);
Certificate read_certificate(std::istream& in);
std::string coefficients_json(const WitnessCoefficients& c);
WitnessCoefficients parse_coefficients(const std::string& text);

struct AuditLine {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double rigor = 0.0;
  bool ok = false;
};

struct AuditReport {
  std::vector<AuditLine> lines;
  bool all_ok() const;
};

// Checks (D), (F1), (F2), f°(r) for each probe against the exact cell
// pipeline, (G) for every registry graph and (CT) for every pair.
AuditReport kappa_constraint_audit(const GridSet& a, const Spectrum& s, const Registry& r,
                                   const std::vector<double>& r_probes);

}  // namespace udset
