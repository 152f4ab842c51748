// Command-line front end: simulation, predictions, normalisation,
// eigenphase scans and probability snapshots with machine-readable output.
//
// Exit codes: 0 success, 2 invalid configuration, 3 quality-gate failure
// (e.g. --require-peak with no peak in the trajectory).

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "qwsearch/qwsearch.hpp"

namespace {

constexpr const char* kFormatVersion = "1";

// All floating-point output goes through one fixed format: 17 significant
// digits, '.' decimal separator, so identical runs are byte-identical.
std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class JsonObject {
 public:
  JsonObject& field(const std::string& k, double v) { return raw(k, fmt17(v)); }
  JsonObject& field(const std::string& k, long long v) { return raw(k, std::to_string(v)); }
  JsonObject& field(const std::string& k, int v) { return raw(k, std::to_string(v)); }
  JsonObject& field(const std::string& k, const std::string& v) { return raw(k, "\"" + v + "\""); }
  JsonObject& null_field(const std::string& k) { return raw(k, "null"); }
  JsonObject& raw(const std::string& k, const std::string& json) {
    if (!first_) body_ += ",";
    first_ = false;
    body_ += "\"" + k + "\":" + json;
    return *this;
  }
  std::string str() const { return "{" + body_ + "}"; }

 private:
  std::string body_;
  bool first_ = true;
};

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot open output file: " + path);
  return out;
}

qwsearch::LatticeConfig make_config(int d, int n, const std::vector<int>& v) {
  qwsearch::LatticeConfig cfg;
  cfg.dim = d;
  cfg.side = n;
  cfg.marked = v.empty() ? std::vector<int>(static_cast<std::size_t>(d > 0 ? d : 0), n / 2) : v;
  cfg.validate();
  return cfg;
}

std::string norm_breakdown_json(const qwsearch::NormResult& norm) {
  std::string arr = "[";
  for (std::size_t j = 0; j < norm.breakdown.size(); ++j) {
    const qwsearch::NormTerm& t = norm.breakdown[j];
    if (j) arr += ",";
    JsonObject obj;
    obj.field("i", t.i).field("binomial", t.binomial).field("I_value", t.I_value).field("term", t.term);
    arr += obj.str();
  }
  return arr + "]";
}

struct CommonArgs {
  int d = 2;
  int n = 0;
  std::vector<int> v;
};

void add_lattice_options(CLI::App* cmd, CommonArgs& args, bool n_required = true) {
  cmd->add_option("--d", args.d, "lattice dimension")->required();
  auto* n_opt = cmd->add_option("--n", args.n, "side length");
  if (n_required) n_opt->required();
  cmd->add_option("--v", args.v, "marked vertex coordinates (default: centre)")->delimiter(',');
}

// ---------------------------------------------------------------- simulate

int cmd_simulate(const CommonArgs& args, int steps, double lambda, const std::string& out_path,
                 bool require_peak) {
  using namespace qwsearch;
  const LatticeConfig cfg = make_config(args.d, args.n, args.v);
  if (steps < 0) throw std::invalid_argument("--steps must be >= 0");

  const Trajectory traj = evolve(cfg, make_phi0(cfg), StepOperator::u_lambda(lambda), steps);

  std::ofstream out = open_output(out_path);
  out << "t,p_target,p_sv\n";
  for (const TrajectoryPoint& pt : traj)
    out << pt.step << "," << fmt17(pt.p_target) << "," << fmt17(pt.p_sv) << "\n";
  out.close();

  JsonObject summary;
  summary.field("format_version", std::string(kFormatVersion));
  bool peaked = false;
  try {
    const Peak peak = find_peak(traj);
    summary.field("t_peak", static_cast<long long>(peak.step)).field("p_peak", peak.p_target);
    peaked = true;
  } catch (const NoPeakFound&) {
    summary.null_field("t_peak").null_field("p_peak");
  }
  summary.field("T_pred_exact", search_time(cfg.dim, cfg.side, NormMethod::exact_sum));
  if (cfg.dim >= 2)
    summary.field("T_pred_asymptotic", search_time(cfg.dim, cfg.side, NormMethod::asymptotic));
  else
    summary.null_field("T_pred_asymptotic");
  std::cout << summary.str() << "\n";

  if (require_peak && !peaked) {
    std::cerr << "no peak found within " << steps << " steps\n";
    return 3;
  }
  return 0;
}

// ----------------------------------------------------------------- predict

int cmd_predict(const CommonArgs& args, const std::string& method) {
  using namespace qwsearch;
  if (args.d < 2) throw std::invalid_argument("predict requires d >= 2");
  if (method != "exact-sum" && method != "asymptotic")
    throw std::invalid_argument("--method must be exact-sum or asymptotic");
  const LatticeConfig cfg = make_config(args.d, args.n, args.v);

  const NormResult exact = inv_b2_exact(cfg.dim, cfg.side);
  const NormResult asym = inv_b2_asymptotic(cfg.dim, cfg.side);
  const long long N = cfg.vertex_count();
  const EffectiveModel exact_model = build_model(b_from(exact), N);
  const EffectiveModel asym_model = build_model(b_from(asym), N);

  std::string asym_provenance = "closed-form";
  if (cfg.dim == 3) asym_provenance = "quadrature-I3";
  if (cfg.dim >= 4) asym_provenance = "quadrature-Id-plus-lower-terms";

  JsonObject summary;
  summary.field("format_version", std::string(kFormatVersion))
      .field("method", method)
      .field("b2_exact", 1.0 / exact.inv_b2)
      .field("b2_asymptotic", 1.0 / asym.inv_b2)
      .field("T_exact", exact_model.t_steps)
      .field("T_asymptotic", asym_model.t_steps)
      .field("delta_exact", exact_model.delta)
      .field("provenance_exact", std::string("exact-sum"))
      .field("provenance_asymptotic", asym_provenance);
  std::cout << summary.str() << "\n";
  return 0;
}

// -------------------------------------------------------------------- scan

int cmd_scan(const CommonArgs& args, double lambda_min, double lambda_max, int points, std::size_t max_dim,
             bool serial, const std::string& out_path) {
  using namespace qwsearch;
  const LatticeConfig cfg = make_config(args.d, args.n, args.v);
  ScanOptions opt;
  opt.lambda_min = lambda_min;
  opt.lambda_max = lambda_max;
  opt.points = points;
  opt.max_dim = max_dim;
  opt.parallel = !serial;
  const ScanResult result = scan(cfg, opt);

  // branch identities carried across lambda, so each branch plots as a curve
  const std::vector<std::vector<double>> branches = qwsearch::track_branches(result);
  std::ofstream out = open_output(out_path);
  out << "lambda,branch_index,eigenphase\n";
  for (std::size_t j = 0; j < result.lambdas.size(); ++j) {
    for (std::size_t branch = 0; branch < branches[j].size(); ++branch)
      out << fmt17(result.lambdas[j]) << "," << branch << "," << fmt17(branches[j][branch]) << "\n";
  }
  out.close();

  const NormResult exact = inv_b2_exact(cfg.dim, cfg.side);
  const double gap_model = 4.0 * b_from(exact) / std::sqrt(static_cast<double>(cfg.vertex_count()));

  JsonObject summary;
  summary.field("format_version", std::string(kFormatVersion))
      .field("gap_numeric", result.gap_at_crossing)
      .field("gap_model", gap_model)
      .field("subspace_overlap", result.subspace_overlap);
  std::cout << summary.str() << "\n";
  return 0;
}

// ---------------------------------------------------------------- snapshot

int cmd_snapshot(const CommonArgs& args, std::vector<int> times, double lambda, const std::string& out_dir) {
  using namespace qwsearch;
  const LatticeConfig cfg = make_config(args.d, args.n, args.v);
  if (times.empty()) throw std::invalid_argument("--times must list at least one step");
  for (int t : times)
    if (t < 0) throw std::invalid_argument("snapshot times must be >= 0");
  std::filesystem::create_directories(out_dir);

  int max_time = 0;
  for (int t : times) max_time = std::max(max_time, t);
  std::vector<bool> wanted(static_cast<std::size_t>(max_time) + 1, false);
  for (int t : times) wanted[static_cast<std::size_t>(t)] = true;

  std::vector<std::string> files;
  StateVector psi = make_phi0(cfg);
  auto dump = [&](int t) {
    const std::vector<double> grid = snapshot(cfg, psi);
    const std::string path = out_dir + "/snapshot_t" + std::to_string(t) + ".csv";
    std::ofstream out = open_output(path);
    for (int i = 1; i <= cfg.dim; ++i) out << "x" << i << ",";
    out << "probability\n";
    for (long long x = 0; x < cfg.vertex_count(); ++x) {
      const std::vector<int> coords = coordinates(cfg, x);
      for (int c : coords) out << c << ",";
      out << fmt17(grid[static_cast<std::size_t>(x)]) << "\n";
    }
    files.push_back(path);
  };
  if (wanted[0]) dump(0);
  for (int t = 1; t <= max_time; ++t) {
    psi = apply_u_lambda(cfg, psi, lambda);
    if (wanted[static_cast<std::size_t>(t)]) dump(t);
  }

  std::string files_json = "[";
  for (std::size_t j = 0; j < files.size(); ++j) {
    if (j) files_json += ",";
    files_json += "\"" + files[j] + "\"";
  }
  files_json += "]";

  JsonObject summary;
  summary.field("format_version", std::string(kFormatVersion)).raw("files", files_json);
  std::cout << summary.str() << "\n";
  return 0;
}

// -------------------------------------------------------------------- norm

int cmd_norm(const CommonArgs& args, const std::string& method_name) {
  using namespace qwsearch;
  NormMethod method;
  if (method_name == "exact-sum") {
    method = NormMethod::exact_sum;
  } else if (method_name == "asymptotic") {
    method = NormMethod::asymptotic;
  } else if (method_name == "quadrature") {
    method = NormMethod::quadrature;
  } else {
    throw std::invalid_argument("--method must be exact-sum, asymptotic or quadrature");
  }

  const bool has_n = args.n > 0;
  if (method == NormMethod::exact_sum && !has_n) throw std::invalid_argument("exact-sum requires --n");
  if (!has_n && args.d < 3)
    throw std::invalid_argument("the n -> infinity limit exists only for d >= 3; pass --n");
  if (!has_n && method == NormMethod::asymptotic && args.d != 3)
    throw std::invalid_argument("the asymptotic form needs --n except for d = 3");

  NormResult norm;
  switch (method) {
    case NormMethod::exact_sum: norm = inv_b2_exact(args.d, args.n); break;
    case NormMethod::asymptotic:
      // the d = 3 form is n-independent, so any valid side length will do
      norm = inv_b2_asymptotic(args.d, has_n ? args.n : 3);
      break;
    case NormMethod::quadrature: norm = inv_b2_quadrature(args.d, has_n ? args.n : 0); break;
  }

  JsonObject summary;
  summary.field("format_version", std::string(kFormatVersion))
      .field("method", std::string(to_string(norm.method)))
      .field("d", args.d);
  if (has_n)
    summary.field("n", args.n);
  else
    summary.null_field("n");
  summary.field("inv_b2", norm.inv_b2).field("b2", 1.0 / norm.inv_b2).raw("breakdown", norm_breakdown_json(norm));
  if (norm.method != NormMethod::exact_sum) summary.field("quadrature_error", norm.quadrature_error);

  // Companion value for the gap report: the method not asked for.
  if (method == NormMethod::exact_sum && args.d >= 2) {
    const NormResult other = inv_b2_asymptotic(args.d, args.n);
    summary.field("inv_b2_asymptotic_reference", other.inv_b2)
        .field("gap_vs_asymptotic", std::abs(other.inv_b2 - norm.inv_b2));
  } else if (method != NormMethod::exact_sum && has_n) {
    const NormResult other = inv_b2_exact(args.d, args.n);
    summary.field("inv_b2_exact_reference", other.inv_b2)
        .field("gap_vs_exact", std::abs(other.inv_b2 - norm.inv_b2));
  }
  std::cout << summary.str() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum-walk search on d-dimensional periodic lattices"};
  app.require_subcommand(1);
  long long seed = 0;
  app.add_option("--seed", seed, "reserved; all computations are deterministic");

  CommonArgs sim_args;
  int sim_steps = 0;
  double sim_lambda = 1.0;
  std::string sim_out = "trajectory.csv";
  bool sim_require_peak = false;
  CLI::App* sim = app.add_subcommand("simulate", "run the search walk and record the target probability");
  add_lattice_options(sim, sim_args);
  sim->add_option("--steps", sim_steps, "number of walk steps")->required();
  sim->add_option("--lambda", sim_lambda, "interpolation parameter (1 = search walk)");
  sim->add_option("--out", sim_out, "trajectory CSV path");
  sim->add_flag("--require-peak", sim_require_peak, "exit with code 3 if no peak is found");

  CommonArgs pred_args;
  std::string pred_method = "exact-sum";
  CLI::App* pred = app.add_subcommand("predict", "search time, gap and localisation strength");
  add_lattice_options(pred, pred_args);
  pred->add_option("--method", pred_method, "primary method: exact-sum | asymptotic");

  CommonArgs scan_args;
  double scan_min = 0.8, scan_max = 1.2;
  int scan_points = 81;
  std::size_t scan_cap = 1500;
  bool scan_serial = false;
  std::string scan_out = "scan.csv";
  CLI::App* scan_cmd = app.add_subcommand("scan", "eigenphases of the interpolated walk over a lambda grid");
  add_lattice_options(scan_cmd, scan_args);
  scan_cmd->add_option("--lambda-min", scan_min, "window start");
  scan_cmd->add_option("--lambda-max", scan_max, "window end");
  scan_cmd->add_option("--points", scan_points, "grid points");
  scan_cmd->add_option("--max-dim", scan_cap, "dense-solve dimension cap");
  scan_cmd->add_flag("--serial", scan_serial, "disable per-lambda parallelism");
  scan_cmd->add_option("--out", scan_out, "eigenphase CSV path");

  CommonArgs snap_args;
  std::vector<int> snap_times;
  double snap_lambda = 1.0;
  std::string snap_dir = ".";
  CLI::App* snap = app.add_subcommand("snapshot", "per-vertex probability grids at chosen times");
  add_lattice_options(snap, snap_args);
  snap->add_option("--times", snap_times, "comma-separated step numbers")->required()->delimiter(',');
  snap->add_option("--lambda", snap_lambda, "interpolation parameter (1 = search walk)");
  snap->add_option("--out-dir", snap_dir, "output directory");

  CommonArgs norm_args;
  std::string norm_method = "exact-sum";
  CLI::App* norm = app.add_subcommand("norm", "normalisation constant 1/b^2 by the chosen method");
  add_lattice_options(norm, norm_args, /*n_required=*/false);
  norm->add_option("--method", norm_method, "exact-sum | asymptotic | quadrature");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 2;
  }

  try {
    if (sim->parsed()) return cmd_simulate(sim_args, sim_steps, sim_lambda, sim_out, sim_require_peak);
    if (pred->parsed()) return cmd_predict(pred_args, pred_method);
    if (scan_cmd->parsed())
      return cmd_scan(scan_args, scan_min, scan_max, scan_points, scan_cap, scan_serial, scan_out);
    if (snap->parsed()) return cmd_snapshot(snap_args, snap_times, snap_lambda, snap_dir);
    if (norm->parsed()) return cmd_norm(norm_args, norm_method);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::length_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
