// udtool: command-line front end for the udset library.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "udset/autocorrelation.hpp"
#include "udset/constructions.hpp"
#include "udset/errors.hpp"
#include "udset/grid_set.hpp"
#include "udset/lp_certificate.hpp"
#include "udset/registry.hpp"
#include "udset/rng.hpp"
#include "udset/spectrum.hpp"
#include "udset/ud_graph.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;
using namespace udset;

namespace {

constexpr const char* kToolVersion = "udtool 1.0.0";

enum Exit : int { kOk = 0, kFailed = 2, kInfeasible = 3, kInputError = 4, kTimeout = 5 };

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Output directory plus the manifest describing how it was produced.
class Run {
 public:
  Run(std::string command, const CLI::App& sub, const std::string& dir) : command_(std::move(command)), dir_(dir) {
    fs::create_directories(dir_);
    for (const auto* opt : sub.get_options()) {
      const std::string name = opt->get_single_name();
      if (name == "help" || name.empty()) continue;
      if (opt->get_expected_max() == 0) {
        config_[name] = opt->count() > 0;
        continue;
      }
      if (opt->count() > 0) {
        const auto& res = opt->results();
        config_[name] = res.size() == 1 ? ordered_json(res[0]) : ordered_json(res);
      } else {
        config_[name] = opt->get_default_str();
      }
    }
  }

  fs::path path(const std::string& name) {
    outputs_.push_back(name);
    return dir_ / name;
  }

  void write(const std::string& name, const std::string& content) {
    std::ofstream out(path(name), std::ios::binary);
    out << content;
    if (!out) throw FormatError("cannot write " + (dir_ / name).string());
  }

  void add_seed(std::uint64_t s) { seeds_.push_back(s); }

  void finish() {
    ordered_json m;
    m["tool_version"] = kToolVersion;
    m["command"] = command_;
    m["config"] = config_;
    m["rng"] = std::string(Rng::kName);
    m["seeds"] = seeds_;
    m["outputs"] = outputs_;
    std::ofstream out(dir_ / "manifest.json", std::ios::binary);
    out << m.dump(2) << "\n";
  }

 private:
  std::string command_;
  fs::path dir_;
  ordered_json config_ = ordered_json::object();
  std::vector<std::uint64_t> seeds_;
  std::vector<std::string> outputs_;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Appends "--key value" tokens for every entry of the JSON config so that
// they override earlier flags (options keep their last value).
std::vector<std::string> config_tokens(const std::string& path) {
  json cfg;
  try {
    cfg = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw FormatError("config: " + std::string(e.what()));
  }
  if (!cfg.is_object()) throw FormatError("config: top level must be an object");
  std::vector<std::string> out;
  auto scalar = [](const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_float()) return fmt17(v.get<double>());
    return v.dump();
  };
  for (const auto& [key, v] : cfg.items()) {
    const std::string flag = key.size() == 1 ? "-" + key : "--" + key;
    if (v.is_boolean()) {
      if (v.get<bool>()) out.push_back(flag);
    } else if (v.is_array()) {
      out.push_back(flag);
      for (const auto& x : v) out.push_back(scalar(x));
    } else {
      out.push_back(flag);
      out.push_back(scalar(v));
    }
  }
  return out;
}

ordered_json report_json(const CertificateReport& r) {
  return ordered_json{{"verdict", r.verdict == Verdict::Certified ? "certified" : "failed"},
                      {"reason", r.reason},
                      {"w_at_zero", r.w_at_zero},
                      {"min_grid_value", r.min_grid_value},
                      {"lipschitz_bound", r.lipschitz_bound},
                      {"tail_floor", r.tail_floor},
                      {"tail_route", r.tail_route},
                      {"delta_star", r.delta_star},
                      {"gamma", r.gamma}};
}

// --- construct -------------------------------------------------------------

struct ConstructArgs {
  std::string pattern;
  double x = 0.96553;
  bool optimize = false;
  int N = 128;
  int K = 8;
  double beta = kDefaultBeta;
  std::string out = "run";
};

int cmd_construct(const ConstructArgs& a, const CLI::App& sub) {
  Run run("construct", sub, a.out);
  double x = a.x;
  std::optional<CroftOptimum> opt;
  if (a.pattern == "croft" && a.optimize) {
    opt = optimize_croft();
    x = opt->x;
  }
  const auto pattern = a.pattern == "hexdisk" ? hex_disk_packing() : croft_tortoise(x);
  const auto rr = rasterize_detailed(pattern, a.N, a.K, a.beta);
  save_gridset(run.path("set.udset"), rr.set);
  auto stats = ordered_json::parse(raster_sidecar_json(pattern, rr));
  if (opt) stats["optimum"] = {{"x", opt->x}, {"density", opt->density}};
  run.write("stats.json", stats.dump(2) + "\n");
  run.finish();
  std::cout << stats.dump() << "\n";
  return kOk;
}

// --- paircorr --------------------------------------------------------------

struct PaircorrArgs {
  std::string set;
  double r_min = 0.0;
  double r_max = 4.0;
  double r_step = 0.01;
  long long cutoff = 0;
  std::string out = "run";
};

int cmd_paircorr(const PaircorrArgs& a, const CLI::App& sub) {
  if (!(a.r_step > 0.0) || a.r_min < 0.0 || a.r_max < a.r_min) throw std::invalid_argument("bad radius range");
  Run run("paircorr", sub, a.out);
  const auto set = load_gridset(a.set);
  const auto s = a.cutoff > 0 ? spectrum(set, a.cutoff) : spectrum_auto(set);
  std::vector<double> radii;
  const auto n = static_cast<long long>(std::floor((a.r_max - a.r_min) / a.r_step + 1e-9));
  for (long long i = 0; i <= n; ++i) radii.push_back(a.r_min + static_cast<double>(i) * a.r_step);
  std::ostringstream csv;
  write_pair_correlation_csv(csv, s, radii);
  run.write("paircorr.csv", csv.str());
  const auto f1 = pair_correlation(s, 1.0);
  const auto f2 = pair_correlation(s, 2.0);
  ordered_json stats{{"density", s.density},
                     {"baseline_delta_squared", s.density * s.density},
                     {"cutoff_m", s.cutoff_m},
                     {"tail_mass", s.tail_mass},
                     {"f1", f1.value},
                     {"f1_rigor", f1.rigor_bound},
                     {"f2", f2.value},
                     {"f2_rigor", f2.rigor_bound}};
  run.write("stats.json", stats.dump(2) + "\n");
  run.finish();
  std::cout << stats.dump() << "\n";
  return kOk;
}

// --- graph -----------------------------------------------------------------

struct GraphArgs {
  int N = 8;
  int K = 4;
  std::string out = "run";
};

int cmd_graph(const GraphArgs& a, const CLI::App& sub) {
  Run run("graph", sub, a.out);
  const UDGraph g(a.N, a.K);
  ordered_json stats{{"N", a.N},
                     {"K", a.K},
                     {"vertices", g.vertex_count()},
                     {"degree", g.degree()},
                     {"edges", g.edge_count()},
                     {"degree_bound_20N", 20 * a.N}};
  run.write("graph.json", stats.dump(2) + "\n");
  run.finish();
  std::cout << stats.dump() << "\n";
  return kOk;
}

// --- sample ----------------------------------------------------------------

struct SampleArgs {
  std::string mode = "greedy";
  int N = 8;
  int K = 4;
  std::uint64_t seed = 1;
  int count = 1;
  std::uint64_t steps = 0;
  std::string out = "run";
};

int cmd_sample(const SampleArgs& a, const CLI::App& sub) {
  if (a.count < 1) throw std::invalid_argument("count must be >= 1");
  Run run("sample", sub, a.out);
  const UDGraph g(a.N, a.K);
  const std::uint64_t steps = a.steps > 0 ? a.steps : default_glauber_steps(g);
  ordered_json samples = ordered_json::array();
  std::ostringstream csv;
  csv << "seed,density,internal_edges,s196\n";
  std::vector<double> dens, s196;
  std::map<std::size_t, int> sizes;
  for (int i = 0; i < a.count; ++i) {
    const std::uint64_t seed = a.seed + static_cast<std::uint64_t>(i);
    run.add_seed(seed);
    const auto members = a.mode == "greedy" ? greedy_mis(g, seed) : glauber_sample(g, steps, seed);
    const auto set = to_gridset(g, members);
    save_gridset(run.path("sample_" + std::to_string(seed) + ".udset"), set);
    const double d = density(set);
    const double s = d > 0.0 ? s_value(set, 1.96) : std::nan("");
    const auto ie = internal_edges(g, members);
    ++sizes[set.popcount()];
    dens.push_back(d);
    if (d > 0.0) s196.push_back(s);
    samples.push_back({{"seed", seed}, {"density", d}, {"internal_edges", ie}, {"s196", d > 0.0 ? json(s) : json()}});
    csv << seed << "," << fmt17(d) << "," << ie << "," << fmt17(s) << "\n";
  }
  auto moments = [](const std::vector<double>& v) {
    if (v.empty()) return ordered_json{{"mean", nullptr}, {"stddev", nullptr}};
    double m = 0.0, q = 0.0;
    for (double x : v) m += x;
    m /= static_cast<double>(v.size());
    for (double x : v) q += (x - m) * (x - m);
    const double sd = v.size() > 1 ? std::sqrt(q / static_cast<double>(v.size() - 1)) : 0.0;
    return ordered_json{{"mean", m}, {"stddev", sd}};
  };
  ordered_json hist = ordered_json::array();
  for (const auto& [size, c] : sizes) hist.push_back({size, c});
  ordered_json agg{{"mode", a.mode},
                   {"N", a.N},
                   {"K", a.K},
                   {"steps", a.mode == "glauber" ? json(steps) : json()},
                   {"density", moments(dens)},
                   {"s196", moments(s196)},
                   {"size_histogram", hist},
                   {"samples", samples}};
  run.write("samples.csv", csv.str());
  run.write("aggregate.json", agg.dump(2) + "\n");
  run.finish();
  std::cout << ordered_json{{"density", agg["density"]}, {"s196", agg["s196"]}}.dump() << "\n";
  return kOk;
}

// --- search ----------------------------------------------------------------

struct SearchArgs {
  int N = 5;
  int K = 10;
  double time_limit = 60.0;
  std::uint64_t seed = 1;
  std::string out = "run";
};

int cmd_search(const SearchArgs& a, const CLI::App& sub) {
  Run run("search", sub, a.out);
  run.add_seed(a.seed);
  const UDGraph g(a.N, a.K);
  MaxIsOptions opts;
  opts.time_limit_seconds = a.time_limit;
  opts.seed = a.seed;
  const auto res = max_is_exact(g, opts);
  const auto set = to_gridset(g, res.members);
  save_gridset(run.path("best.udset"), set);
  const auto blocks = block_decomposition(set);
  double max_diam = 0.0;
  for (double d : blocks.diameters) max_diam = std::max(max_diam, d);
  ordered_json rep{{"N", a.N},
                   {"K", a.K},
                   {"size", res.size},
                   {"upper_bound", res.upper_bound},
                   {"gap", res.upper_bound - res.size},
                   {"optimal", res.optimal},
                   {"timed_out", res.timed_out},
                   {"nodes", res.nodes},
                   {"density", density(set)},
                   {"internal_edges", internal_edges(g, res.members)},
                   {"blocks",
                    {{"has_block_structure", blocks.has_block_structure},
                     {"count", blocks.blocks.size()},
                     {"wraps", blocks.wraps},
                     {"max_diameter", max_diam}}}};
  run.write("search.json", rep.dump(2) + "\n");
  run.finish();
  std::cout << rep.dump() << "\n";
  return res.timed_out ? kTimeout : kOk;
}

// --- certify / verify / gamma ----------------------------------------------

struct CertifyArgs {
  std::string registry;
  std::optional<double> delta_plus;
  double delta_lo = 0.0;
  double delta_hi = 0.5;
  double tolerance = 1e-4;
  double epsilon = 1e-3;
  double target = 0.22936;
  double grid_step = 1e-5;
  double margin = 0.003;
  double tail_start = 20.0;
  double lp_step = 0.05;
  double slack = 0.005;
  double budget = kDefaultBudget;
  std::string out = "run";
};

int cmd_certify(const CertifyArgs& a, const CLI::App& sub) {
  const auto reg = load_registry(a.registry);
  Run run("certify", sub, a.out);
  CertifyOptions o;
  o.delta_lo = a.delta_lo;
  o.delta_hi = a.delta_hi;
  o.tolerance = a.tolerance;
  o.epsilon = a.epsilon;
  o.target = a.target;
  o.verify.grid_step = a.grid_step;
  o.verify.margin = a.margin;
  o.verify.tail_start = a.tail_start;
  o.lp.grid_step = a.lp_step;
  o.lp.slack = a.slack;
  o.lp.budget = a.budget;
  o.lp.tail_start = a.tail_start;

  std::optional<Certificate> cert;
  int code = kOk;
  if (a.delta_plus) {
    auto att = certify_at(reg, *a.delta_plus, o);
    if (!att.lp.feasible) {
      ordered_json rep{{"verdict", "infeasible"}, {"delta_plus", *a.delta_plus}, {"infeasibility", att.lp.infeasibility}};
      run.write("infeasible.json", rep.dump(2) + "\n");
      run.finish();
      std::cout << rep.dump() << "\n";
      return kInfeasible;
    }
    cert = att.certificate;
    if (cert->report.verdict != Verdict::Certified) code = kFailed;
  } else {
    cert = certify_bound(reg, o);
    if (!cert) {
      ordered_json rep{{"verdict", "infeasible"}, {"delta_hi", a.delta_hi}};
      run.write("infeasible.json", rep.dump(2) + "\n");
      run.finish();
      std::cout << rep.dump() << "\n";
      return kInfeasible;
    }
  }
  std::ostringstream doc;
  write_certificate(doc, *cert);
  run.write("certificate.json", doc.str());
  run.finish();
  auto line = report_json(cert->report);
  line["delta_plus"] = cert->delta_plus;
  std::cout << line.dump() << "\n";
  return code;
}

struct VerifyArgs {
  std::string certificate;
  std::string registry;
  std::string out = "run";
};

int cmd_verify(const VerifyArgs& a, const CLI::App& sub) {
  const auto reg = load_registry(a.registry);
  std::ifstream in(a.certificate);
  if (!in) throw FormatError("cannot open " + a.certificate);
  const auto cert = read_certificate(in);
  Run run("verify", sub, a.out);
  CertificateReport rep;
  std::string problem;
  if (cert.registry_hash != hash_hex(registry_hash(reg))) {
    problem = "registry hash does not match the certificate";
  } else {
    try {
      VerifyOptions v;
      v.grid_step = cert.report.grid_step;
      v.margin = cert.report.margin;
      v.tail_start = cert.report.tail_start;
      rep = verify_witness(reg, cert.coefficients, v);
      if (rep.verdict == Verdict::Certified) {
        try {
          rep.gamma = gamma_extract(reg, cert.coefficients, cert.epsilon, cert.target);
        } catch (const FeasibilityError&) {
          rep.gamma = 0.0;
        }
      }
      if (rep.verdict != cert.report.verdict || rep.delta_star != cert.report.delta_star ||
          rep.min_grid_value != cert.report.min_grid_value)
        problem = "recomputed report differs from the certificate";
    } catch (const std::invalid_argument& e) {
      problem = std::string("invalid coefficients: ") + e.what();
    }
  }
  if (!problem.empty()) {
    rep.verdict = Verdict::Failed;
    rep.reason = rep.reason.empty() ? problem : rep.reason + "; " + problem;
  }
  const auto out = report_json(rep);
  run.write("verify.json", out.dump(2) + "\n");
  run.finish();
  std::cout << out.dump() << "\n";
  return rep.verdict == Verdict::Certified ? kOk : kFailed;
}

struct GammaArgs {
  std::string certificate;
  std::string registry;
  double epsilon = 1e-3;
  double target = 0.22936;
  std::string out = "run";
};

int cmd_gamma(const GammaArgs& a, const CLI::App& sub) {
  const auto reg = load_registry(a.registry);
  std::ifstream in(a.certificate);
  if (!in) throw FormatError("cannot open " + a.certificate);
  const auto cert = read_certificate(in);
  Run run("gamma", sub, a.out);
  ordered_json rep{{"epsilon", a.epsilon}, {"target", a.target}, {"delta_star", quadratic_root(reg, cert.coefficients).delta_star}};
  int code = kOk;
  try {
    rep["gamma"] = gamma_extract(reg, cert.coefficients, a.epsilon, a.target);
  } catch (const FeasibilityError& e) {
    rep["gamma"] = nullptr;
    rep["reason"] = e.what();
    code = kInfeasible;
  }
  run.write("gamma.json", rep.dump(2) + "\n");
  run.finish();
  std::cout << rep.dump() << "\n";
  return code;
}

// --- audit -----------------------------------------------------------------

struct AuditArgs {
  std::string set;
  std::string registry;
  std::vector<double> probes{1.0, 1.96};
  std::string out = "run";
};

int cmd_audit(const AuditArgs& a, const CLI::App& sub) {
  const auto reg = load_registry(a.registry);
  const auto set = load_gridset(a.set);
  Run run("audit", sub, a.out);
  const auto s = spectrum_auto(set);
  const auto rep = kappa_constraint_audit(set, s, reg, a.probes);
  ordered_json lines = ordered_json::array();
  for (const auto& l : rep.lines)
    lines.push_back({{"name", l.name}, {"lhs", l.lhs}, {"rhs", l.rhs}, {"rigor", l.rigor}, {"ok", l.ok}});
  ordered_json out{{"all_ok", rep.all_ok()}, {"lines", lines}};
  run.write("audit.json", out.dump(2) + "\n");
  run.finish();
  std::cout << out.dump() << "\n";
  return rep.all_ok() ? kOk : kFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Unit-distance-avoiding sets: constructions, pair correlations, graphs and LP certificates"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast)->always_capture_default();
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", kToolVersion);
  std::string config_path;
  app.add_option("--config", config_path, "JSON file whose keys override flags");

  ConstructArgs ca;
  auto* construct = app.add_subcommand("construct", "Rasterize a planar construction onto the torus grid");
  construct->add_option("pattern", ca.pattern)->required()->check(CLI::IsMember({"hexdisk", "croft"}));
  construct->add_option("--x", ca.x, "Croft hexagon height");
  construct->add_flag("--optimize", ca.optimize, "Use the density-maximizing Croft parameter");
  construct->add_option("-N", ca.N)->check(CLI::PositiveNumber);
  construct->add_option("-K", ca.K)->check(CLI::PositiveNumber);
  construct->add_option("--beta", ca.beta);
  construct->add_option("--out", ca.out);

  PaircorrArgs pa;
  auto* paircorr = app.add_subcommand("paircorr", "Pair correlation curve of a grid set");
  paircorr->add_option("--set", pa.set)->required();
  paircorr->add_option("--r-min", pa.r_min);
  paircorr->add_option("--r-max", pa.r_max);
  paircorr->add_option("--r-step", pa.r_step);
  paircorr->add_option("--cutoff", pa.cutoff, "Spectral cutoff m (0 picks one automatically)");
  paircorr->add_option("--out", pa.out);

  GraphArgs ga;
  auto* graph = app.add_subcommand("graph", "Size and degree of the unit-distance grid graph");
  graph->add_option("-N", ga.N)->check(CLI::PositiveNumber);
  graph->add_option("-K", ga.K)->check(CLI::PositiveNumber);
  graph->add_option("--out", ga.out);

  SampleArgs sa;
  auto* sample = app.add_subcommand("sample", "Greedy or Glauber independent sets of the grid graph");
  sample->add_option("--mode", sa.mode)->check(CLI::IsMember({"greedy", "glauber"}));
  sample->add_option("-N", sa.N)->check(CLI::PositiveNumber);
  sample->add_option("-K", sa.K)->check(CLI::PositiveNumber);
  sample->add_option("--seed", sa.seed);
  sample->add_option("--count", sa.count);
  sample->add_option("--steps", sa.steps, "Glauber steps (0 means 100 per vertex)");
  sample->add_option("--out", sa.out);

  SearchArgs se;
  auto* search = app.add_subcommand("search", "Maximum independent set of the grid graph");
  search->add_option("-N", se.N)->check(CLI::PositiveNumber);
  search->add_option("-K", se.K)->check(CLI::PositiveNumber);
  search->add_option("--time-limit", se.time_limit);
  search->add_option("--seed", se.seed);
  search->add_option("--out", se.out);

  CertifyArgs ce;
  auto* certify = app.add_subcommand("certify", "Solve the witness LP and verify the result");
  certify->add_option("--registry", ce.registry)->required();
  certify->add_option("--delta-plus", ce.delta_plus, "Single attempt at this value instead of bisection");
  certify->add_option("--delta-lo", ce.delta_lo);
  certify->add_option("--delta-hi", ce.delta_hi);
  certify->add_option("--tolerance", ce.tolerance);
  certify->add_option("--epsilon", ce.epsilon);
  certify->add_option("--target", ce.target);
  certify->add_option("--grid-step", ce.grid_step);
  certify->add_option("--margin", ce.margin);
  certify->add_option("--tail-start", ce.tail_start);
  certify->add_option("--lp-step", ce.lp_step);
  certify->add_option("--slack", ce.slack);
  certify->add_option("--budget", ce.budget);
  certify->add_option("--out", ce.out);

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "Re-verify a certificate file against a registry");
  verify->add_option("--certificate", va.certificate)->required();
  verify->add_option("--registry", va.registry)->required();
  verify->add_option("--out", va.out);

  GammaArgs gm;
  auto* gamma = app.add_subcommand("gamma", "Clumpiness constant for a certificate");
  gamma->add_option("--certificate", gm.certificate)->required();
  gamma->add_option("--registry", gm.registry)->required();
  gamma->add_option("--epsilon", gm.epsilon);
  gamma->add_option("--target", gm.target);
  gamma->add_option("--out", gm.out);

  AuditArgs au;
  auto* audit = app.add_subcommand("audit", "Check the LP constraints on the spectrum of a grid set");
  audit->add_option("--set", au.set)->required();
  audit->add_option("--registry", au.registry)->required();
  audit->add_option("--probes", au.probes);
  audit->add_option("--out", au.out);

  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    for (std::size_t i = 0; i + 1 < args.size(); ++i)
      if (args[i] == "--config") {
        const auto extra = config_tokens(args[i + 1]);
        args.insert(args.end(), extra.begin(), extra.end());
        break;
      }
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }

  try {
    if (*construct) return cmd_construct(ca, *construct);
    if (*paircorr) return cmd_paircorr(pa, *paircorr);
    if (*graph) return cmd_graph(ga, *graph);
    if (*sample) return cmd_sample(sa, *sample);
    if (*search) return cmd_search(se, *search);
    if (*certify) return cmd_certify(ce, *certify);
    if (*verify) return cmd_verify(va, *verify);
    if (*gamma) return cmd_gamma(gm, *gamma);
    if (*audit) return cmd_audit(au, *audit);
  } catch (const FeasibilityError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kInfeasible;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}
