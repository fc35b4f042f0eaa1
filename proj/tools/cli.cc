#include "cli.h"

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "csviu/control.h"
#include "csviu/errors.h"
#include "csviu/model.h"
#include "csviu/region.h"
#include "csviu/riccati.h"
#include "csviu/simulator.h"
#include "csviu/stability.h"

namespace csviu::cli {
namespace {

using nlohmann::ordered_json;
namespace fs = std::filesystem;

constexpr const char* kSchema = "csviu/1";
constexpr const char* kVersion = "0.1.0";

ordered_json to_json(const Matrix& M) {
  ordered_json rows = ordered_json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    ordered_json row = ordered_json::array();
    for (Eigen::Index j = 0; j < M.cols(); ++j) row.push_back(M(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

ordered_json to_json(const Vector& v) {
  ordered_json a = ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

std::string fmt17(double v) {
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

std::vector<double> parse_list(const std::string& text, const char* what) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw ValidationError(std::string("cannot parse ") + what + " entry '" +
                            item + "'");
    }
    if (item.find_first_not_of(" \t", used) != std::string::npos) {
      throw ValidationError(std::string("cannot parse ") + what + " entry '" +
                            item + "'");
    }
    values.push_back(v);
  }
  if (values.empty()) {
    throw ValidationError(std::string(what) + " is empty");
  }
  return values;
}

Vector parse_vector(const std::string& text, int size, const char* what) {
  const std::vector<double> v = parse_list(text, what);
  if (static_cast<int>(v.size()) != size) {
    throw ValidationError(std::string(what) + " must have " +
                          std::to_string(size) + " entries, got " +
                          std::to_string(v.size()));
  }
  return Eigen::Map<const Vector>(v.data(), size);
}

std::string read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open model file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream s;
  s << std::hex << std::setw(16) << std::setfill('0') << h;
  return s.str();
}

struct Globals {
  std::string model_path;
  double alpha = 0.9;
  std::uint64_t seed = 0;
  std::string out_dir;
  std::string mu = "asymptotic";
  double omega = 1.0;
  std::string sor_memory = "state";
  int paths = 1000;
  int kappa = 100;
  std::string noise = "gaussian";

  CLI::Option* alpha_opt = nullptr;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* omega_opt = nullptr;
  CLI::Option* paths_opt = nullptr;
  CLI::Option* kappa_opt = nullptr;
  CLI::Option* noise_opt = nullptr;
};

// Everything a run depends on, after merging file defaults and flags.
struct Resolved {
  SystemModel model;
  std::string model_hash;
  CriterionConfig criterion;
  MuKind mu = MuKind::asymptotic;
  SorMemory sor_memory = SorMemory::state;
  int kappa = 100;
  bool kappa_given = false;

  ordered_json to_json() const {
    ordered_json j;
    j["alpha"] = criterion.alpha;
    j["seed"] = criterion.seed;
    j["paths"] = criterion.paths;
    j["kappa"] = kappa;
    j["omega"] = criterion.sor_omega;
    j["sor_memory"] = csviu::to_string(sor_memory);
    j["mu"] = csviu::to_string(mu);
    j["noise"] = csviu::to_string(criterion.noise);
    j["tol_fixed_point"] = criterion.tol_fixed_point;
    j["tol_sor"] = criterion.tol_sor;
    j["max_iters"] = criterion.max_iters;
    return j;
  }
};

Resolved resolve(const Globals& g) {
  if (g.model_path.empty()) throw ValidationError("--model is required");
  Resolved r;
  const std::string bytes = read_bytes(g.model_path);
  r.model = parse_model(bytes);
  r.model_hash = fnv1a64(bytes);
  r.criterion = parse_criterion(bytes);
  if (r.criterion.horizon_kappa) r.kappa = *r.criterion.horizon_kappa;
  if (g.alpha_opt->count()) r.criterion.alpha = g.alpha;
  if (g.seed_opt->count()) r.criterion.seed = g.seed;
  if (g.omega_opt->count()) r.criterion.sor_omega = g.omega;
  if (g.paths_opt->count()) r.criterion.paths = g.paths;
  if (g.noise_opt->count()) r.criterion.noise = noise_kind_from_string(g.noise);
  if (g.kappa_opt->count()) {
    r.kappa = g.kappa;
    r.kappa_given = true;
  } else {
    r.kappa_given = r.criterion.horizon_kappa.has_value();
  }
  if (r.kappa < 0) throw ValidationError("--kappa must be nonnegative");
  r.mu = mu_kind_from_string(g.mu);
  r.sor_memory = g.sor_memory == "multiplier" ? SorMemory::multiplier : SorMemory::state;
  validate(r.criterion);
  return r;
}

RiccatiSolution riccati_for(const Resolved& r) {
  RiccatiOptions opts;
  opts.tol = r.criterion.tol_fixed_point;
  opts.max_iters = r.criterion.max_iters;
  return solve_riccati(r.model, r.criterion.alpha, opts);
}

ControlOptions control_options(const Resolved& r) {
  ControlOptions c;
  c.mu_kind = r.mu;
  c.omega = r.criterion.sor_omega;
  c.sor_memory = r.sor_memory;
  c.tol = r.criterion.tol_sor;
  c.max_iters = r.criterion.max_iters;
  c.rollout.paths = r.criterion.paths;
  c.rollout.seed = r.criterion.seed;
  c.rollout.noise = r.criterion.noise;
  return c;
}

Policy make_policy(const std::string& name, const Resolved& r,
                   const std::optional<RiccatiSolution>& sol,
                   double perturbation) {
  const int m = r.model.m();
  if (name == "zero") return Policy::zero(m);
  if (!sol) throw ValidationError("policy '" + name + "' needs a Riccati solution");
  if (name == "optimal") {
    return Policy::optimal(
        std::make_shared<const ControlLaw>(*sol, control_options(r)));
  }
  if (name == "lqr" || name == "linear") return Policy::linear(sol->G);
  if (name == "perturbed") {
    return Policy::linear((1.0 + perturbation) * sol->G);
  }
  throw ValidationError("unknown policy '" + name +
                        "' (expected zero, optimal, lqr, perturbed)");
}

ordered_json riccati_json(const RiccatiSolution& sol) {
  ordered_json j;
  j["alpha"] = sol.alpha;
  j["L"] = to_json(sol.L);
  j["G"] = to_json(sol.G);
  j["Acl"] = to_json(sol.Acl);
  j["Sigma"] = to_json(sol.Sigma);
  j["Lambda"] = to_json(sol.Lambda);
  j["W_xd"] = to_json(Vector(sol.forms.Wx_d()));
  j["W_ud"] = to_json(Vector(sol.forms.Wu_d()));
  j["varpi1"] = sol.forms.varpi1;
  j["iterations"] = sol.iterations;
  j["residual"] = sol.residual;
  j["acl_radius"] = sol.acl_radius;
  j["alpha_condition_ok"] = sol.alpha_condition_ok;
  return j;
}

const char* verdict(Verdict v) { return csviu::to_string(v); }

struct Output {
  ordered_json summary;
  // name -> CSV contents
  std::vector<std::pair<std::string, std::string>> tables;
  // When set, stdout receives this CSV instead of the JSON summary.
  std::optional<std::string> stdout_csv;
};

Output cmd_riccati(const Resolved& r) {
  Output o;
  o.summary = riccati_json(riccati_for(r));
  return o;
}

Output cmd_stability(const Resolved& r) {
  const StabilityReport s = check_alpha_stability(r.model, r.criterion.alpha,
                                                  r.criterion.seed + 1);
  Output o;
  auto& j = o.summary;
  j["alpha"] = s.alpha;
  j["inverse_positive"] = {{"verdict", verdict(s.inverse_positive)},
                           {"min_eigenvalue", s.inverse_min_eigenvalue}};
  j["d_stable"] = {{"verdict", verdict(s.d_stable)},
                   {"radius", s.l_alpha_radius}};
  j["lyapunov"] = {{"verdict", verdict(s.lyapunov)},
                   {"witness_min_eigenvalue", s.witness_min_eigenvalue},
                   {"residual_min_eigenvalue", s.residual_min_eigenvalue}};
  if (s.lyapunov_witness) j["lyapunov"]["witness"] = to_json(*s.lyapunov_witness);
  j["relative_d_stable"] = {{"verdict", verdict(s.relative_d_stable)},
                            {"radius", s.relative_radius}};
  j["eig_condition"] = {{"verdict", verdict(s.eig_condition)},
                        {"sqrt_alpha_a_radius", s.sqrt_alpha_a_radius},
                        {"resolvent_radius", s.resolvent_radius}};
  if (s.alpha_a_in_disk) {
    j["alpha_a_in_disk"] = {{"verdict", verdict(*s.alpha_a_in_disk)},
                            {"radius", s.alpha_a_radius}};
  }
  j["overall"] = verdict(s.overall);
  j["conditions_agree"] = s.conditions_agree();
  return o;
}

Output cmd_detect(const Resolved& r, int attempts) {
  Output o;
  auto& j = o.summary;
  j["alpha"] = r.criterion.alpha;
  const auto H = detectability_search(r.model, r.criterion.alpha, attempts,
                                      r.criterion.seed + 7);
  if (H) {
    const DetectabilityResult d = check_detectability(r.model, r.criterion.alpha, *H);
    j["detectable"] = verdict(d.detectable);
    j["radius"] = d.radius;
    j["H"] = to_json(*H);
  } else {
    j["detectable"] = "unknown";
    j["radius"] = nullptr;
    j["H"] = nullptr;
  }
  j["attempts"] = attempts;
  return o;
}

Output cmd_control(const Resolved& r, const std::string& x_text) {
  const RiccatiSolution sol = riccati_for(r);
  const Vector x = parse_vector(x_text, r.model.n(), "--x");
  const ControlLaw law(sol, control_options(r));
  const OptimalControl oc = law.solve(x);
  Output o;
  auto& j = o.summary;
  j["alpha"] = sol.alpha;
  j["x"] = to_json(x);
  j["mu_kind"] = csviu::to_string(r.mu);
  j["mu"] = to_json(oc.mu);
  j["u_star"] = to_json(oc.u_star);
  j["gamma_star"] = to_json(oc.gamma_star);
  ordered_json channels = ordered_json::array();
  for (int i = 0; i < sol.model.m(); ++i) {
    const InactionResult t = inaction_test(sol, x, oc.mu, i);
    channels.push_back(
        {{"channel", i},
         {"inactive", t.inactive},
         {"margin", t.margin},
         {"coupled_margin",
          coupled_inaction_margin(oc.sub, oc.u_star, i, sol.alpha)}});
  }
  j["inaction"] = channels;
  j["sor"] = {{"omega", r.criterion.sor_omega},
              {"memory", csviu::to_string(r.sor_memory)},
              {"iterations", oc.sor.iterations},
              {"residual", oc.sor.residual}};
  return o;
}

SimulationConfig sim_config(const Resolved& r) {
  SimulationConfig c;
  c.kappa = r.kappa;
  c.paths = r.criterion.paths;
  c.seed = r.criterion.seed;
  c.noise = r.criterion.noise;
  return c;
}

Output cmd_simulate(const Resolved& r, const std::string& policy_name,
                    const std::string& x0_text, bool power) {
  std::optional<RiccatiSolution> sol;
  if (policy_name != "zero") sol = riccati_for(r);
  const Policy policy = make_policy(policy_name, r, sol, 0.0);
  const Vector x0 = x0_text.empty() ? Vector(Vector::Zero(r.model.n()))
                                    : parse_vector(x0_text, r.model.n(), "--x0");
  const SimulationConfig cfg = sim_config(r);
  Output o;
  auto& j = o.summary;
  j["alpha"] = r.criterion.alpha;
  j["policy"] = policy.label();
  j["x0"] = to_json(x0);
  j["kappa"] = cfg.kappa;
  j["paths"] = cfg.paths;
  const auto rows = energy_table(r.model, policy, r.criterion.alpha, x0, cfg);
  std::ostringstream csv;
  csv << "kappa,mean,stderr\n";
  for (const EnergyRow& row : rows) {
    csv << row.kappa << ',' << fmt17(row.mean) << ',' << fmt17(row.std_error)
        << '\n';
  }
  o.tables.emplace_back("energy.csv", csv.str());
  j["energy"] = {{"mean", rows.back().mean}, {"stderr", rows.back().std_error}};
  if (power) {
    if (cfg.kappa < 4) throw ValidationError("--power needs --kappa >= 4");
    const PowerEstimate p = estimate_power(r.model, policy, x0, cfg);
    j["power"] = {{"mean", p.mean},
                  {"stderr", p.std_error},
                  {"growth", p.growth},
                  {"cesaro_drift", p.cesaro_drift},
                  {"state_mean", p.state_mean},
                  {"state_cesaro_drift", p.state_cesaro_drift}};
  }
  return o;
}

Output cmd_norms(const Resolved& r) {
  const RiccatiSolution sol = riccati_for(r);
  NormsConfig cfg;
  cfg.paths = r.criterion.paths;
  cfg.seed = r.criterion.seed;
  cfg.noise = r.criterion.noise;
  if (r.kappa_given) cfg.kappa = r.kappa;
  cfg.control = control_options(r);
  const NormsResult n = optimal_norms(sol, cfg);
  Output o;
  auto& j = o.summary;
  j["alpha"] = sol.alpha;
  j["varpi1"] = n.varpi1;
  j["kappa"] = n.kappa;
  j["paths"] = n.paths;
  auto opt = [](const std::optional<double>& v) -> ordered_json {
    return v ? ordered_json(*v) : ordered_json(nullptr);
  };
  j["energy_alpha"] = {{"mean", opt(n.energy_alpha)},
                       {"stderr", opt(n.energy_std_error)}};
  j["power"] = {{"mean", opt(n.power)}, {"stderr", opt(n.power_std_error)}};
  j["energy_exact"] = {{"mean", opt(n.energy_exact)},
                       {"stderr", opt(n.energy_exact_std_error)}};
  j["power_exact"] = {{"mean", opt(n.power_exact)},
                      {"stderr", opt(n.power_exact_std_error)}};
  j["tail_bound"] = n.tail_bound;
  j["max_abs_rho"] = n.max_abs_rho;
  std::ostringstream csv;
  csv << "k,mean_rho\n";
  for (std::size_t k = 0; k < n.mean_rho.size(); ++k) {
    csv << k << ',' << fmt17(n.mean_rho[k]) << '\n';
  }
  o.tables.emplace_back("rho.csv", csv.str());
  return o;
}

Output cmd_overtake(const Resolved& r, const std::string& a,
                    const std::string& b, const std::string& grid_text,
                    const std::string& x0_text, double perturbation) {
  std::optional<RiccatiSolution> sol;
  if (a != "zero" || b != "zero") sol = riccati_for(r);
  const Policy pa = make_policy(a, r, sol, perturbation);
  const Policy pb = make_policy(b, r, sol, perturbation);
  std::vector<int> grid;
  for (double v : parse_list(grid_text, "--kappa-grid")) {
    if (v < 0 || v != std::floor(v)) {
      throw ValidationError("--kappa-grid entries must be nonnegative integers");
    }
    grid.push_back(static_cast<int>(v));
  }
  const Vector x0 = x0_text.empty() ? Vector(Vector::Zero(r.model.n()))
                                    : parse_vector(x0_text, r.model.n(), "--x0");
  const auto rows =
      overtaking_compare(r.model, r.criterion.alpha, pa, pb, x0, grid,
                         r.criterion.paths, r.criterion.seed, r.criterion.noise);
  Output o;
  auto& j = o.summary;
  j["alpha"] = r.criterion.alpha;
  j["policy_a"] = pa.label();
  j["policy_b"] = pb.label();
  ordered_json table = ordered_json::array();
  std::ostringstream csv;
  csv << "kappa,mean,stderr,scaled_mean,scaled_stderr\n";
  for (const OvertakingRow& row : rows) {
    table.push_back({{"kappa", row.kappa},
                     {"mean", row.difference},
                     {"stderr", row.std_error},
                     {"scaled_mean", row.scaled_difference},
                     {"scaled_stderr", row.scaled_std_error}});
    csv << row.kappa << ',' << fmt17(row.difference) << ','
        << fmt17(row.std_error) << ',' << fmt17(row.scaled_difference) << ','
        << fmt17(row.scaled_std_error) << '\n';
  }
  j["differences"] = table;
  o.tables.emplace_back("overtaking.csv", csv.str());
  return o;
}

Output cmd_region(const Resolved& r, const std::string& axes_text,
                  const std::string& range_text, const std::string& range1_text,
                  int res, const std::string& base_text) {
  const RiccatiSolution sol = riccati_for(r);
  GridSpec grid;
  const std::vector<double> axes = parse_list(axes_text, "--axes");
  if (axes.size() > 2) throw ValidationError("--axes takes one or two indices");
  for (double a : axes) {
    if (a != std::floor(a)) throw ValidationError("--axes entries must be integers");
  }
  grid.axis0 = static_cast<int>(axes[0]);
  grid.axis1 = axes.size() == 2 ? static_cast<int>(axes[1]) : -1;
  const std::vector<double> range = parse_list(range_text, "--range");
  if (range.size() != 2 || !(range[0] < range[1])) {
    throw ValidationError("--range must be 'lo,hi' with lo < hi");
  }
  grid.lo0 = grid.lo1 = range[0];
  grid.hi0 = grid.hi1 = range[1];
  if (!range1_text.empty()) {
    const std::vector<double> r1 = parse_list(range1_text, "--range1");
    if (r1.size() != 2 || !(r1[0] < r1[1])) {
      throw ValidationError("--range1 must be 'lo,hi' with lo < hi");
    }
    grid.lo1 = r1[0];
    grid.hi1 = r1[1];
  }
  grid.resolution = res;
  if (!base_text.empty()) grid.base = parse_vector(base_text, r.model.n(), "--x");
  const RegionMap map = scan_region(sol, grid, control_options(r));

  const int m = r.model.m();
  std::ostringstream csv;
  csv << "x1,x2";
  for (int i = 1; i <= m; ++i) csv << ",u" << i;
  for (int i = 1; i <= m; ++i) csv << ",label" << i;
  for (int i = 1; i <= m; ++i) csv << ",margin" << i;
  for (int i = 1; i <= m; ++i) csv << ",coupled_margin" << i;
  for (int i = 1; i <= m; ++i) csv << ",boundary" << i;
  csv << ",valid\n";
  for (const RegionCell& c : map.cells) {
    csv << fmt17(c.coord0) << ',' << fmt17(c.coord1);
    if (c.valid) {
      for (int i = 0; i < m; ++i) csv << ',' << fmt17(c.u_star[i]);
      for (int i = 0; i < m; ++i) csv << ',' << c.labels[i];
      for (int i = 0; i < m; ++i) csv << ',' << fmt17(c.margin[i]);
      for (int i = 0; i < m; ++i) csv << ',' << fmt17(c.coupled_margin[i]);
      for (int i = 0; i < m; ++i) csv << ',' << (c.boundary[i] ? 1 : 0);
      csv << ",1\n";
    } else {
      for (int i = 0; i < 5 * m; ++i) csv << ",nan";
      csv << ",0\n";
    }
  }
  Output o;
  auto& j = o.summary;
  j["alpha"] = sol.alpha;
  j["mu_kind"] = csviu::to_string(map.mu_kind);
  j["grid"] = {{"axes", {grid.axis0, grid.axis1}},
               {"range0", {grid.lo0, grid.hi0}},
               {"range1", {grid.lo1, grid.hi1}},
               {"resolution", grid.resolution},
               {"base", to_json(grid.base.size() ? grid.base
                                                 : Vector(Vector::Zero(r.model.n())))}};
  j["cells"] = map.cells.size();
  j["invalid_cells"] = map.invalid_cells;
  j["coupled_disagreements"] = map.coupled_disagreements;
  j["single_channel_disagreements"] = map.single_channel_disagreements;
  o.tables.emplace_back("region.csv", csv.str());
  o.stdout_csv = csv.str();
  return o;
}

void write_file(const fs::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << contents;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Optimal control of CSVIU discrete-time stochastic systems", "csviu"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--model", g.model_path, "Model JSON file");
  g.alpha_opt = app.add_option("--alpha", g.alpha, "Discount factor");
  g.seed_opt = app.add_option("--seed", g.seed, "Random seed");
  app.add_option("--out", g.out_dir, "Output directory");
  app.add_option("--mu", g.mu, "mu estimator: zero, asymptotic, rollout")
      ->check(CLI::IsMember({"zero", "asymptotic", "rollout"}));
  g.omega_opt = app.add_option("--omega", g.omega, "SOR relaxation in (0, 2)");
  app.add_option("--sor-memory", g.sor_memory,
                 "SOR iterate: state (relax z) or multiplier (relax clipped gamma)")
      ->check(CLI::IsMember({"state", "multiplier"}));
  g.paths_opt = app.add_option("--paths", g.paths, "Monte Carlo paths");
  g.kappa_opt = app.add_option("--kappa", g.kappa, "Horizon");
  g.noise_opt = app.add_option("--noise", g.noise,
                               "Noise law: gaussian, rademacher, uniform");

  auto* riccati = app.add_subcommand("riccati", "Solve the perturbed Riccati equation");
  auto* stability = app.add_subcommand("stability", "Alpha-stability of the uncontrolled system");
  auto* detect = app.add_subcommand("detect", "Search for a detectability witness");
  int attempts = 200;
  detect->add_option("--attempts", attempts, "Random perturbations to try");
  auto* control = app.add_subcommand("control", "Optimal control at one state");
  std::string x_text, x0_text, policy = "optimal", policy_a = "optimal",
                               policy_b = "lqr", grid_text = "0,10,50,100";
  control->add_option("--x", x_text, "State, comma separated")->required();
  auto* simulate = app.add_subcommand("simulate", "Simulate a policy");
  bool power = false;
  simulate->add_option("--policy", policy, "zero, optimal, lqr");
  simulate->add_option("--x0", x0_text, "Initial state");
  simulate->add_flag("--power", power, "Also estimate the Cesaro power");
  auto* norms = app.add_subcommand("norms", "Optimal energy or power norm");
  auto* overtake = app.add_subcommand("overtake", "Finite-horizon cost differences");
  double perturbation = 0.1;
  overtake->add_option("--policy-a", policy_a, "zero, optimal, lqr, perturbed");
  overtake->add_option("--policy-b", policy_b, "zero, optimal, lqr, perturbed");
  overtake->add_option("--kappa-grid", grid_text, "Comma separated horizons");
  overtake->add_option("--x0", x0_text, "Initial state");
  overtake->add_option("--perturbation", perturbation,
                       "Relative gain error of the 'perturbed' policy");
  auto* region = app.add_subcommand("region", "Classify controls over a state slice");
  std::string axes_text = "0,1", range_text = "-2,2", range1_text, base_text;
  int res = 101;
  region->add_option("--axes", axes_text, "One or two state indices");
  region->add_option("--range", range_text, "lo,hi for both axes");
  region->add_option("--range1", range1_text, "lo,hi for the second axis");
  region->add_option("--res", res, "Points per axis");
  region->add_option("--x", base_text, "Values of the coordinates off the axes");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();  // program name
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 1;
  }

  const auto start = std::chrono::steady_clock::now();
  try {
    const Resolved r = resolve(g);
    Output result;
    std::string command;
    if (*riccati) {
      command = "riccati";
      result = cmd_riccati(r);
    } else if (*stability) {
      command = "stability";
      result = cmd_stability(r);
    } else if (*detect) {
      command = "detect";
      result = cmd_detect(r, attempts);
    } else if (*control) {
      command = "control";
      result = cmd_control(r, x_text);
    } else if (*simulate) {
      command = "simulate";
      result = cmd_simulate(r, policy, x0_text, power);
    } else if (*norms) {
      command = "norms";
      result = cmd_norms(r);
    } else if (*overtake) {
      command = "overtake";
      result = cmd_overtake(r, policy_a, policy_b, grid_text, x0_text,
                            perturbation);
    } else {
      command = "region";
      result = cmd_region(r, axes_text, range_text, range1_text, res, base_text);
    }
    const double seconds = std::chrono::duration<double>(
                               std::chrono::steady_clock::now() - start)
                               .count();

    ordered_json summary;
    summary["schema"] = kSchema;
    summary["command"] = command;
    for (auto& [key, value] : result.summary.items()) summary[key] = value;

    if (!g.out_dir.empty()) {
      const fs::path dir(g.out_dir);
      std::error_code ec;
      fs::create_directories(dir, ec);
      if (ec) throw ValidationError("cannot create " + dir.string());
      write_file(dir / (command + ".json"), summary.dump(2) + "\n");
      ordered_json files = ordered_json::array({command + ".json"});
      for (const auto& [name, contents] : result.tables) {
        write_file(dir / name, contents);
        files.push_back(name);
      }
      ordered_json manifest;
      manifest["schema"] = kSchema;
      manifest["tool"] = "csviu";
      manifest["version"] = kVersion;
      manifest["argv"] = args;
      manifest["command"] = command;
      manifest["model"] = {{"path", g.model_path}, {"fnv1a64", r.model_hash}};
      manifest["config"] = r.to_json();
      manifest["seed"] = r.criterion.seed;
      manifest["timing"] = {{command, seconds}};
      manifest["files"] = files;
      write_file(dir / "manifest.json", manifest.dump(2) + "\n");
    }
    if (result.stdout_csv) {
      out << "# " << summary.dump() << '\n' << *result.stdout_csv;
    } else {
      out << summary.dump(2) << '\n';
    }
    return 0;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const SolverError& e) {
    err << "solver error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace csviu::cli
