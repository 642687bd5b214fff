#include "udset/lp_certificate.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "simplex.hpp"
#include "udset/autocorrelation.hpp"
#include "udset/bessel.hpp"
#include "udset/errors.hpp"
#include "udset/parallel.hpp"

namespace udset {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kRadiusMergeTolerance = 1e-12;

// Columns of the witness: variable k contributes x_k * sum_rho P[k][rho] J0(radius[rho] t).
struct WitnessModel {
  std::size_t nm = 0, nt = 0, nc = 0;
  std::vector<double> radius;              // cluster representatives, increasing
  std::vector<std::vector<double>> P;      // variables x clusters
  std::vector<double> budget_weight;       // per variable
  std::vector<double> penalty;             // per variable, gamma factor
  std::vector<double> q_alpha;             // per variable, coefficient in b (alpha or -5)
  std::size_t vars() const { return P.size(); }
};

std::vector<std::vector<RadialTerm>> column_terms(const Registry& r, std::size_t& nm, std::size_t& nt) {
  std::vector<std::vector<RadialTerm>> cols{{{0.0, 1.0}}, {{1.0, 1.0}}, {{kA2Radius, 1.0}}};
  nm = nt = 0;
  for (const auto& g : r.graphs)
    if (g.kind == GraphKind::VertexSum) {
      cols.push_back(m_terms(g));
      ++nm;
    }
  for (const auto& g : r.graphs)
    if (g.kind == GraphKind::Subgraph) {
      cols.push_back(t_terms(g));
      ++nt;
    }
  for (const auto& p : r.ct_pairs) {
    auto t = ct_terms(p);
    for (auto& term : t) term.coef = -term.coef;
    cols.push_back(std::move(t));
  }
  return cols;
}

WitnessModel build_model(const Registry& r) {
  WitnessModel m;
  auto cols = column_terms(r, m.nm, m.nt);
  m.nc = r.ct_pairs.size();

  std::vector<double> all;
  for (const auto& c : cols)
    for (const auto& t : c) all.push_back(t.radius);
  std::sort(all.begin(), all.end());
  std::vector<std::pair<double, double>> bounds;  // [lo, hi] of each cluster
  for (std::size_t i = 0; i < all.size();) {
    std::size_t j = i + 1;
    while (j < all.size() && all[j] - all[j - 1] <= kRadiusMergeTolerance * std::max(1.0, all[j])) ++j;
    std::map<double, int> freq;
    for (std::size_t k = i; k < j; ++k) ++freq[all[k]];
    double rep = all[i];
    int best = 0;
    for (const auto& [v, f] : freq)
      if (f > best) {
        best = f;
        rep = v;
      }
    m.radius.push_back(rep);
    bounds.emplace_back(all[i], all[j - 1]);
    i = j;
  }
  auto cluster_of = [&](double rad) {
    auto it = std::lower_bound(bounds.begin(), bounds.end(), rad,
                               [](const std::pair<double, double>& b, double v) { return b.second < v; });
    return static_cast<std::size_t>(it - bounds.begin());
  };
  m.P.assign(cols.size(), std::vector<double>(m.radius.size(), 0.0));
  for (std::size_t k = 0; k < cols.size(); ++k)
    for (const auto& t : cols[k]) m.P[k][cluster_of(t.radius)] += t.coef;

  m.budget_weight = {1.0, 1.0, 1.0};
  m.penalty = {0.0, 1.0, 1.0};
  m.q_alpha = {1.0, 0.0, 0.0};
  for (const auto& g : r.graphs)
    if (g.kind == GraphKind::VertexSum) {
      m.budget_weight.push_back(1.0);
      m.penalty.push_back(static_cast<double>(g.edges.size()));
      m.q_alpha.push_back(g.alpha);
    }
  for (const auto& g : r.graphs)
    if (g.kind == GraphKind::Subgraph) {
      m.budget_weight.push_back(2.0);
      m.penalty.push_back(static_cast<double>(g.edges.size()));
      m.q_alpha.push_back(g.alpha);
    }
  for (const auto& p : r.ct_pairs) {
    m.budget_weight.push_back(2.0);
    m.penalty.push_back(p.c_ct);
    m.q_alpha.push_back(-5.0);
  }
  return m;
}

std::vector<double> flatten(const WitnessCoefficients& c) {
  std::vector<double> x{c.v0, c.v1, c.v196};
  x.insert(x.end(), c.w_m.begin(), c.w_m.end());
  x.insert(x.end(), c.w_t.begin(), c.w_t.end());
  x.insert(x.end(), c.w_theta.begin(), c.w_theta.end());
  return x;
}

WitnessCoefficients unflatten(const WitnessModel& m, const std::vector<double>& x) {
  WitnessCoefficients c;
  c.v0 = x[0];
  c.v1 = x[1];
  c.v196 = x[2];
  auto it = x.begin() + 3;
  c.w_m.assign(it, it + m.nm);
  it += m.nm;
  c.w_t.assign(it, it + m.nt);
  it += m.nt;
  c.w_theta.assign(it, it + m.nc);
  return c;
}

std::vector<RadialTerm> compile(const WitnessModel& m, const std::vector<double>& x) {
  std::vector<RadialTerm> out;
  for (std::size_t rho = 0; rho < m.radius.size(); ++rho) {
    double coef = 0.0;
    for (std::size_t k = 0; k < m.vars(); ++k) coef += x[k] * m.P[k][rho];
    if (coef != 0.0) out.push_back({m.radius[rho], coef});
  }
  return out;
}

// Lower bound on W over t >= T from |J0(r t)| <= envelope(r T).
double envelope_floor(const std::vector<RadialTerm>& terms, double T) {
  double constant = 0.0, osc = 0.0, mass = 0.0;
  for (const auto& t : terms) {
    mass += std::abs(t.coef);
    if (t.radius == 0.0)
      constant += t.coef;
    else
      osc += std::abs(t.coef) * bessel::j0_envelope(t.radius * T);
  }
  return constant - osc - 4.0 * static_cast<double>(terms.size() + 1) * kEps * mass;
}

struct GridScan {
  double min_lower = std::numeric_limits<double>::infinity();
  double max_error = 0.0;
};

GridScan scan_grid(const std::vector<RadialTerm>& terms, double t0, double step, std::size_t count) {
  const std::size_t chunks = std::min<std::size_t>(std::max<std::size_t>(count / 4096, 1), 256);
  std::vector<GridScan> part(chunks);
  parallel_chunks(count, chunks, [&](std::size_t b, std::size_t e, std::size_t idx) {
    GridScan g;
    for (std::size_t j = b; j < e; ++j) {
      const auto w = eval_terms(terms, t0 + static_cast<double>(j) * step);
      g.min_lower = std::min(g.min_lower, w.value - w.abs_error_bound);
      g.max_error = std::max(g.max_error, w.abs_error_bound);
    }
    part[idx] = g;
  });
  GridScan out;
  for (const auto& g : part) {
    out.min_lower = std::min(out.min_lower, g.min_lower);
    out.max_error = std::max(out.max_error, g.max_error);
  }
  return out;
}

}  // namespace

WitnessCoefficients zero_coefficients(const Registry& r) {
  WitnessCoefficients c;
  for (const auto& g : r.graphs) (g.kind == GraphKind::VertexSum ? c.w_m : c.w_t).push_back(0.0);
  c.w_theta.assign(r.ct_pairs.size(), 0.0);
  return c;
}

void validate_coefficients(const Registry& r, const WitnessCoefficients& c) {
  const auto shape = zero_coefficients(r);
  if (c.w_m.size() != shape.w_m.size() || c.w_t.size() != shape.w_t.size() ||
      c.w_theta.size() != shape.w_theta.size())
    throw std::invalid_argument("witness coefficients do not match the registry shape");
  for (double x : flatten(c))
    if (!std::isfinite(x) || x < 0.0) throw std::invalid_argument("witness coefficients must be finite and >= 0");
}

double coefficient_sum(const WitnessCoefficients& c) {
  double s = c.v0 + c.v1 + c.v196;
  for (double w : c.w_m) s += w;
  for (double w : c.w_t) s += 2.0 * w;
  for (double w : c.w_theta) s += 2.0 * w;
  return s;
}

std::vector<RadialTerm> compile_witness(const Registry& r, const WitnessCoefficients& c) {
  validate_coefficients(r, c);
  return compile(build_model(r), flatten(c));
}

ProfileEval witness_eval(const Registry& r, const WitnessCoefficients& c, double t) {
  return eval_terms(compile_witness(r, c), t);
}

double witness_lipschitz(const Registry& r, const WitnessCoefficients& c, double r_max) {
  validate_coefficients(r, c);
  const auto m = build_model(r);
  for (double rad : m.radius)
    if (rad > r_max) throw DomainError("witness_lipschitz: registry radius exceeds r_max");
  double s = 0.0;
  for (const auto& t : compile(m, flatten(c))) s += std::abs(t.coef) * t.radius;
  return bessel::kJ1Sup * s * (1.0 + 8.0 * kEps);
}

double budget_lipschitz(const WitnessCoefficients& c, double r_max) {
  return r_max * coefficient_sum(c) * bessel::kJ1Sup;
}

Quadratic lemma_quadratic(const WitnessCoefficients& c, const std::vector<int>& alpha_m,
                          const std::vector<int>& alpha_t) {
  if (alpha_m.size() != c.w_m.size() || alpha_t.size() != c.w_t.size())
    throw std::invalid_argument("lemma_quadratic: alpha lists do not match coefficients");
  Quadratic q;
  q.a = -(1.0 - c.v196);
  q.b = c.v0;
  for (std::size_t i = 0; i < c.w_m.size(); ++i) q.b += alpha_m[i] * c.w_m[i];
  for (std::size_t i = 0; i < c.w_t.size(); ++i) q.b += alpha_t[i] * c.w_t[i];
  for (double w : c.w_theta) {
    q.b -= 5.0 * w;
    q.c += w;
  }
  return q;
}

Quadratic lemma_quadratic(const Registry& r, const WitnessCoefficients& c) {
  validate_coefficients(r, c);
  std::vector<int> am, at;
  for (const auto& g : r.graphs) (g.kind == GraphKind::VertexSum ? am : at).push_back(g.alpha);
  return lemma_quadratic(c, am, at);
}

QuadraticRoot max_root_in_unit(const Quadratic& q) {
  QuadraticRoot out;
  out.q = q;
  if (q(1.0) >= 0.0) {
    out.delta_star = 1.0;
    out.found = true;
    return out;
  }
  std::vector<double> roots;
  if (q.a == 0.0) {
    if (q.b != 0.0) roots.push_back(-q.c / q.b);
  } else {
    const double disc = q.b * q.b - 4.0 * q.a * q.c;
    if (disc >= 0.0) {
      const double sq = std::sqrt(disc);
      const double t = -0.5 * (q.b + std::copysign(sq, q.b));
      if (t != 0.0) roots.push_back(q.c / t);
      roots.push_back(t / q.a);
    }
  }
  double best = -1.0;
  for (double x : roots)
    if (x >= 0.0 && x <= 1.0) best = std::max(best, x);
  if (best < 0.0) return out;
  // Polish against rounding so that q < 0 just above the reported root.
  double lo = best, hi = best;
  while (hi < 1.0 && q(hi) >= 0.0) hi = std::min(1.0, hi + 1e-15 + 4 * kEps * hi);
  if (q(hi) < 0.0 && hi != best) {
    for (int i = 0; i < 200 && hi - lo > 0.0; ++i) {
      const double mid = 0.5 * (lo + hi);
      if (mid == lo || mid == hi) break;
      (q(mid) >= 0.0 ? lo : hi) = mid;
    }
    best = hi;
  }
  out.delta_star = best;
  out.found = true;
  return out;
}

QuadraticRoot quadratic_root(const Registry& r, const WitnessCoefficients& c) {
  return max_root_in_unit(lemma_quadratic(r, c));
}

double gamma_penalty(const Registry& r, const WitnessCoefficients& c) {
  validate_coefficients(r, c);
  const auto m = build_model(r);
  const auto x = flatten(c);
  double p = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) p += m.penalty[k] * x[k];
  return p;
}

double gamma_extract(const Registry& r, const WitnessCoefficients& c, double epsilon, double target) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("gamma_extract: epsilon must be > 0");
  const auto root = quadratic_root(r, c);
  const double lo = root.delta_star + epsilon;
  if (!root.found || lo >= target || lo > 1.0)
    throw FeasibilityError("gamma_extract: delta_star + epsilon is not below the target density");
  const auto& q = root.q;
  double worst = std::min(-q(lo), -q(1.0));
  if (q.a != 0.0) {
    const double v = -q.b / (2.0 * q.a);
    if (v > lo && v < 1.0) worst = std::min(worst, -q(v));
  }
  if (!(worst > 0.0)) throw FeasibilityError("gamma_extract: no positive gamma at this epsilon");
  const double pen = gamma_penalty(r, c);
  if (pen == 0.0) return std::numeric_limits<double>::infinity();
  return worst / pen * (1.0 - 1e-12);
}

CertificateReport verify_witness(const Registry& r, const WitnessCoefficients& c, const VerifyOptions& opts) {
  validate_coefficients(r, c);
  if (!(opts.grid_step > 0.0) || !(opts.tail_start > 0.0) || !std::isfinite(opts.margin))
    throw std::invalid_argument("verify_witness: bad grid options");
  CertificateReport rep;
  rep.grid_step = opts.grid_step;
  rep.margin = opts.margin;
  rep.tail_start = opts.tail_start;
  rep.tail_extended_to = opts.tail_start;
  const auto root = quadratic_root(r, c);
  rep.quadratic = root.q;
  rep.delta_star = root.delta_star;

  const auto model = build_model(r);
  const auto terms = compile(model, flatten(c));
  try {
    rep.lipschitz_bound = witness_lipschitz(r, c, opts.r_max);
  } catch (const DomainError&) {
    rep.reason = "a registry radius exceeds r_max, so the Lipschitz bound does not apply";
    return rep;
  }
  const auto w0 = eval_terms(terms, 0.0);
  rep.w_at_zero = w0.value;

  const auto count = static_cast<std::size_t>(std::ceil(opts.tail_start / opts.grid_step)) + 1;
  const auto scan = scan_grid(terms, 0.0, opts.grid_step, count);
  rep.min_grid_value = scan.min_lower;
  rep.max_eval_error = scan.max_error;

  const double half_gap = rep.lipschitz_bound * opts.grid_step / 2.0;
  double floor = envelope_floor(terms, opts.tail_start);
  if (floor > 0.0) rep.tail_route = "envelope";
  if (!(floor > 0.0)) {
    double T = opts.tail_start;
    const double limit = opts.tail_start * opts.max_tail_factor;
    while (T < limit && !(envelope_floor(terms, T) > 0.0)) T = std::min(limit, T * 1.25);
    const double env = envelope_floor(terms, T);
    if (env > 0.0) {
      const auto n_ext = static_cast<std::size_t>(std::ceil((T - opts.tail_start) / opts.grid_step)) + 1;
      const auto ext = scan_grid(terms, opts.tail_start, opts.grid_step, n_ext);
      rep.max_eval_error = std::max(rep.max_eval_error, ext.max_error);
      floor = std::min(env, ext.min_lower - half_gap);
      rep.tail_extended_to = T;
      if (floor > 0.0) rep.tail_route = "grid+envelope";
    } else {
      floor = env;
      rep.tail_extended_to = T;
    }
  }
  rep.tail_floor = floor;

  if (w0.value - w0.abs_error_bound < 1.0) {
    rep.reason = "W(0) < 1";
  } else if (rep.min_grid_value < opts.margin) {
    rep.reason = "grid minimum below the margin";
  } else if (!(opts.margin > half_gap)) {
    rep.reason = "margin does not exceed lipschitz * grid_step / 2";
  } else if (!(rep.tail_floor > 0.0)) {
    rep.reason = "tail bound is not positive";
  } else {
    rep.verdict = Verdict::Certified;
  }
  return rep;
}

LPResult solve_feasibility(const Registry& r, double delta_plus, const LPOptions& opts) {
  if (!(delta_plus > 0.0 && delta_plus < 1.0)) throw std::invalid_argument("solve_feasibility: delta_plus outside (0, 1)");
  if (!(opts.grid_step > 0.0 && opts.grid_step <= 0.05)) throw std::invalid_argument("solve_feasibility: grid_step must be in (0, 0.05]");
  const auto m = build_model(r);
  const std::size_t nv = m.vars();
  std::vector<std::size_t> osc;  // clusters with positive radius
  for (std::size_t rho = 0; rho < m.radius.size(); ++rho)
    if (m.radius[rho] > 0.0) osc.push_back(rho);
  const std::size_t nu = opts.enforce_tail ? osc.size() : 0;
  const std::size_t ncols = nv + nu;

  using Row = detail::Simplex::Row;
  std::vector<Row> A;
  Row b;
  auto add = [&](Row row, long double rhs) {
    row.resize(ncols, 0);
    A.push_back(std::move(row));
    b.push_back(rhs);
  };
  auto phi_row = [&](double t) {
    std::vector<double> j(m.radius.size());
    for (std::size_t rho = 0; rho < m.radius.size(); ++rho) j[rho] = bessel::j0(m.radius[rho] * t).value;
    Row row(ncols, 0);
    for (std::size_t k = 0; k < nv; ++k) {
      long double s = 0;
      for (std::size_t rho = 0; rho < j.size(); ++rho) s += static_cast<long double>(m.P[k][rho]) * j[rho];
      row[k] = -s;
    }
    return row;
  };

  add(phi_row(0.0), -(1.0L + 1e-9L));
  const auto steps = static_cast<std::size_t>(std::ceil(opts.tail_start / opts.grid_step));
  for (std::size_t i = 1; i <= steps; ++i) add(phi_row(std::min(opts.tail_start, i * opts.grid_step)), -opts.slack);
  {
    Row row(ncols, 0);
    for (std::size_t k = 0; k < nv; ++k) row[k] = m.budget_weight[k];
    add(row, opts.budget * (1.0L - 1e-9L));
  }
  // q(delta) <= 0 at delta_plus and at 1.
  for (double d : {delta_plus, 1.0}) {
    Row row(ncols, 0);
    row[2] = static_cast<long double>(d) * d;
    for (std::size_t k = 0; k < nv; ++k) {
      if (k == 1 || k == 2) continue;
      row[k] = m.q_alpha[k] * static_cast<long double>(d);
    }
    for (std::size_t k = 3 + m.nm + m.nt; k < nv; ++k) row[k] += 1;
    add(row, static_cast<long double>(d) * d);
  }
  const Row q_row = A[A.size() - 2];
  for (auto [use, k] : {std::pair{opts.use_v1, 1}, std::pair{opts.use_v196, 2}})
    if (!use) {
      Row row(ncols, 0);
      row[k] = 1;
      add(row, 0);
    }
  if (opts.enforce_tail) {
    Row floor_row(ncols, 0);
    for (std::size_t k = 0; k < nv; ++k) floor_row[k] = -m.P[k][0] * (m.radius[0] == 0.0 ? 1.0 : 0.0);
    for (std::size_t u = 0; u < nu; ++u) floor_row[nv + u] = bessel::j0_envelope(m.radius[osc[u]] * opts.tail_start);
    add(floor_row, -opts.slack);
    for (std::size_t u = 0; u < nu; ++u) {
      Row pos(ncols, 0), neg(ncols, 0);
      for (std::size_t k = 0; k < nv; ++k) {
        pos[k] = m.P[k][osc[u]];
        neg[k] = -m.P[k][osc[u]];
      }
      pos[nv + u] = -1;
      neg[nv + u] = -1;
      add(pos, 0);
      add(neg, 0);
    }
  }
  Row objective(ncols, 0);
  for (std::size_t k = 0; k < nv; ++k) objective[k] = -q_row[k];

  LPResult res;
  for (int round = 0;; ++round) {
    detail::Simplex lp(A, b, objective);
    Row x;
    const auto status = lp.solve(x);
    res.constraints = A.size();
    res.cut_rounds = round;
    if (status == detail::Simplex::Status::Infeasible) {
      res.feasible = false;
      res.infeasibility = static_cast<double>(lp.infeasibility());
      res.message = "infeasible";
      return res;
    }
    if (status == detail::Simplex::Status::Unbounded) {
      res.message = "unbounded objective";
      return res;
    }
    std::vector<double> xd(nv);
    for (std::size_t k = 0; k < nv; ++k) xd[k] = std::max(0.0, static_cast<double>(x[k]));
    res.feasible = true;
    res.coefficients = unflatten(m, xd);
    res.objective = static_cast<double>(lp.objective());
    if (round >= opts.max_cut_rounds) {
      res.message = "cut round limit reached";
      return res;
    }
    // Add local minima of W below the slack as new grid rows.
    const auto terms = compile(m, xd);
    const auto n = static_cast<std::size_t>(std::ceil(opts.tail_start / opts.cut_scan_step)) + 1;
    std::vector<double> w(n);
    parallel_chunks(n, std::min<std::size_t>(n, 64), [&](std::size_t lo, std::size_t hi, std::size_t) {
      for (std::size_t i = lo; i < hi; ++i)
        w[i] = eval_terms(terms, std::min(opts.tail_start, i * opts.cut_scan_step)).value;
    });
    std::size_t added = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const bool left = i == 0 || w[i] <= w[i - 1];
      const bool right = i + 1 == n || w[i] <= w[i + 1];
      if (left && right && w[i] < opts.slack * (1.0 - 1e-6)) {
        add(phi_row(std::min(opts.tail_start, i * opts.cut_scan_step)), -opts.slack);
        ++added;
      }
    }
    if (added == 0) {
      res.message = "optimal";
      return res;
    }
  }
}

CertifyAttempt certify_at(const Registry& r, double delta_plus, const CertifyOptions& opts) {
  CertifyAttempt out;
  out.lp = solve_feasibility(r, delta_plus, opts.lp);
  if (!out.lp.feasible) return out;
  auto rep = verify_witness(r, out.lp.coefficients, opts.verify);
  Certificate cert;
  cert.registry_hash = hash_hex(registry_hash(r));
  cert.delta_plus = delta_plus;
  cert.epsilon = opts.epsilon;
  cert.target = opts.target;
  cert.coefficients = out.lp.coefficients;
  if (rep.verdict == Verdict::Certified) {
    try {
      rep.gamma = gamma_extract(r, cert.coefficients, opts.epsilon, opts.target);
    } catch (const FeasibilityError&) {
      rep.gamma = 0.0;
    }
  }
  cert.report = rep;
  out.certificate = std::move(cert);
  return out;
}

std::optional<Certificate> certify_bound(const Registry& r, const CertifyOptions& opts) {
  auto attempt = [&](double d) -> std::optional<Certificate> {
    auto a = certify_at(r, d, opts);
    if (!a.certificate || a.certificate->report.verdict != Verdict::Certified) return std::nullopt;
    return a.certificate;
  };
  auto best = attempt(opts.delta_hi);
  if (!best) return std::nullopt;
  double lo = opts.delta_lo, hi = opts.delta_hi;
  while (hi - lo > opts.tolerance) {
    const double mid = 0.5 * (lo + hi);
    if (auto c = attempt(mid)) {
      best = std::move(c);
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return best;
}

namespace {

ordered_json coefficients_to_json(const WitnessCoefficients& c) {
  return ordered_json{{"v0", c.v0}, {"v1", c.v1}, {"v196", c.v196},
                      {"w_m", c.w_m}, {"w_t", c.w_t}, {"w_theta", c.w_theta}};
}

WitnessCoefficients coefficients_from_json(const json& j) {
  WitnessCoefficients c;
  c.v0 = j.at("v0").get<double>();
  c.v1 = j.at("v1").get<double>();
  c.v196 = j.at("v196").get<double>();
  c.w_m = j.value("w_m", std::vector<double>{});
  c.w_t = j.value("w_t", std::vector<double>{});
  c.w_theta = j.value("w_theta", std::vector<double>{});
  return c;
}

}  // namespace

std::string coefficients_json(const WitnessCoefficients& c) { return coefficients_to_json(c).dump(2); }

WitnessCoefficients parse_coefficients(const std::string& text) {
  try {
    return coefficients_from_json(json::parse(text));
  } catch (const json::exception& e) {
    throw FormatError(std::string("coefficients: ") + e.what());
  }
}

void write_certificate(std::ostream& out, const Certificate& c) {
  const auto& r = c.report;
  ordered_json doc;
  doc["format"] = "udset-certificate";
  doc["schema_version"] = 1;
  doc["registry_hash"] = c.registry_hash;
  doc["delta_plus"] = c.delta_plus;
  doc["epsilon"] = c.epsilon;
  doc["target"] = c.target;
  doc["coefficients"] = coefficients_to_json(c.coefficients);
  doc["report"] = ordered_json{{"verdict", r.verdict == Verdict::Certified ? "certified" : "failed"},
                               {"reason", r.reason},
                               {"w_at_zero", r.w_at_zero},
                               {"min_grid_value", r.min_grid_value},
                               {"grid_step", r.grid_step},
                               {"margin", r.margin},
                               {"lipschitz_bound", r.lipschitz_bound},
                               {"tail_start", r.tail_start},
                               {"tail_floor", r.tail_floor},
                               {"tail_extended_to", r.tail_extended_to},
                               {"tail_route", r.tail_route},
                               {"max_eval_error", r.max_eval_error},
                               {"quadratic", {r.quadratic.a, r.quadratic.b, r.quadratic.c}},
                               {"delta_star", r.delta_star},
                               {"gamma", r.gamma}};
  out << doc.dump(2) << "\n";
}

Certificate read_certificate(std::istream& in) {
  try {
    const json doc = json::parse(in);
    if (doc.at("format") != "udset-certificate" || doc.at("schema_version") != 1)
      throw FormatError("certificate: unknown format or version");
    Certificate c;
    c.registry_hash = doc.at("registry_hash").get<std::string>();
    c.delta_plus = doc.at("delta_plus").get<double>();
    c.epsilon = doc.at("epsilon").get<double>();
    c.target = doc.at("target").get<double>();
    c.coefficients = coefficients_from_json(doc.at("coefficients"));
    const auto& r = doc.at("report");
    auto& o = c.report;
    o.verdict = r.at("verdict") == "certified" ? Verdict::Certified : Verdict::Failed;
    o.reason = r.at("reason").get<std::string>();
    o.w_at_zero = r.at("w_at_zero").get<double>();
    o.min_grid_value = r.at("min_grid_value").get<double>();
    o.grid_step = r.at("grid_step").get<double>();
    o.margin = r.at("margin").get<double>();
    o.lipschitz_bound = r.at("lipschitz_bound").get<double>();
    o.tail_start = r.at("tail_start").get<double>();
    o.tail_floor = r.at("tail_floor").get<double>();
    o.tail_extended_to = r.at("tail_extended_to").get<double>();
    o.tail_route = r.at("tail_route").get<std::string>();
    o.max_eval_error = r.at("max_eval_error").get<double>();
    const auto q = r.at("quadratic");
    o.quadratic = {q.at(0).get<double>(), q.at(1).get<double>(), q.at(2).get<double>()};
    o.delta_star = r.at("delta_star").get<double>();
    o.gamma = r.at("gamma").get<double>();
    return c;
  } catch (const json::exception& e) {
    throw FormatError(std::string("certificate: ") + e.what());
  }
}

bool AuditReport::all_ok() const {
  return std::all_of(lines.begin(), lines.end(), [](const AuditLine& l) { return l.ok; });
}

AuditReport kappa_constraint_audit(const GridSet& a, const Spectrum& s, const Registry& r,
                                   const std::vector<double>& r_probes) {
  AuditReport rep;
  const double d = s.density;
  rep.lines.push_back({"D", s.kappa_at(0), d * d, 0.0, s.kappa_at(0) == d * d});
  const double kmin = s.kappa.empty() ? 0.0 : *std::min_element(s.kappa.begin(), s.kappa.end());
  rep.lines.push_back({"F1", kmin, 0.0, 0.0, kmin >= 0.0});
  const double total = s.kappa_sum() + s.tail_mass;
  const double f2_rigor = s.kappa_error + 8 * kEps * d;
  rep.lines.push_back({"F2", total, d, f2_rigor, std::abs(total - d) <= f2_rigor});
  const CellAutocorrelation ac(a);
  for (double rp : r_probes) {
    const auto spec = pair_correlation(s, rp);
    const double exact = pair_correlation_exact(ac, rp);
    const double rig = spec.rigor_bound + 1e-10;
    char name[48];
    std::snprintf(name, sizeof name, "A(%g)", rp);
    rep.lines.push_back({name, spec.value, exact, rig, std::abs(spec.value - exact) <= rig});
  }
  const auto f1 = pair_correlation(s, 1.0);
  const double f1_upper = std::max(0.0, f1.value + f1.rigor_bound);
  for (const auto& g : r.graphs) {
    const auto c = constraint_rhs_check(s, g, f1_upper);
    rep.lines.push_back({"G:" + g.name, c.lhs, c.rhs, c.rigor, c.ok});
  }
  for (const auto& p : r.ct_pairs) {
    const auto c = ct_constraint_check(s, p, f1_upper);
    rep.lines.push_back({"CT:" + p.name, c.lhs, c.rhs, c.rigor, c.ok});
  }
  return rep;
}

}  // namespace udset
