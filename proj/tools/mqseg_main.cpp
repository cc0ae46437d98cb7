// mqseg: command-line front end.
//
// Subcommands: fit (one quantile segmentation), msb (three-quantile boxplot),
// simulate (threshold calibration), bench (Monte-Carlo batch), eval (compare
// two step functions).  Exit codes: 0 ok, 1 internal error, 2 usage or input
// error.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mqseg/msb.hpp"
#include "mqseg/multiscale.hpp"
#include "mqseg/segmentation.hpp"
#include "mqseg/simlab.hpp"
#include "mqseg/threshold.hpp"

using nlohmann::json;

namespace {

constexpr int kFormatVersion = 1;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string default_table_path() {
  if (const char* env = std::getenv("MQSEG_THRESHOLD_PATH")) return env;
  return "mqseg-thresholds.txt";
}

// One value per line; an optional non-numeric first line is treated as a
// header.
std::vector<double> read_column(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open input file: " + path);
  std::vector<double> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    char* end = nullptr;
    double v = std::strtod(line.c_str(), &end);
    while (end && *end == ' ') ++end;
    if (end == line.c_str() || (end && *end != '\0')) {
      if (lineno == 1) continue;  // header
      throw UsageError(path + ": line " + std::to_string(lineno) +
                       " is not a number: '" + line + "'");
    }
    out.push_back(v);
  }
  if (out.empty()) throw UsageError(path + ": no data");
  return out;
}

json num_or_null(double v) {
  if (std::isinf(v)) return nullptr;
  return v;
}

const char* status_name(mqseg::FitStatus s) {
  switch (s) {
    case mqseg::FitStatus::ok: return "ok";
    case mqseg::FitStatus::degenerate_threshold: return "degenerate_threshold";
    case mqseg::FitStatus::infeasible: return "infeasible";
  }
  return "?";
}

json fit_to_json(const mqseg::SegmentationResult& r) {
  json out;
  out["status"] = status_name(r.status);
  out["s_hat"] = r.s_hat;
  out["beta"] = r.beta;
  out["q"] = r.q_used;
  out["cost_rule"] = r.cost_rule == mqseg::CostRule::koenker ? "koenker" : "runs";
  out["cost"] = r.cost;
  json segs = json::array();
  for (int s = 1; s <= r.fit.segments(); ++s) {
    segs.push_back({{"start", r.fit.segment_begin(s)},
                    {"end", r.fit.segment_end(s)},
                    {"value", r.fit.value(s)}});
  }
  out["segments"] = segs;
  json cps = json::array();
  for (const auto& ci : r.cp_intervals) {
    cps.push_back({{"index", ci.index},
                   {"ci_left", ci.left},
                   {"ci_right", ci.right},
                   {"tau", ci.tau},
                   {"tau_left", ci.tau_left},
                   {"tau_right", ci.tau_right}});
  }
  out["changepoints"] = cps;
  json band = json::array();
  for (const auto& b : r.band)
    band.push_back({{"lower", num_or_null(b.lower)},
                    {"upper", num_or_null(b.upper)}});
  out["band"] = band;
  return out;
}

void write_text(const std::string& out_path, const std::string& text) {
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw UsageError("cannot write output file: " + out_path);
  out << text;
}

std::string csv_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fit_to_csv(const mqseg::SegmentationResult& r) {
  std::ostringstream out;
  out << "index,fit,band_lower,band_upper\n";
  const int n = r.fit.n();
  for (int i = 1; i <= n; ++i) {
    out << i << ',' << csv_double(r.fit.at(i));
    if (!r.band.empty()) {
      out << ',' << csv_double(r.band[static_cast<size_t>(i) - 1].lower) << ','
          << csv_double(r.band[static_cast<size_t>(i) - 1].upper);
    } else {
      out << ",,";
    }
    out << '\n';
  }
  return out.str();
}

// Collapse a per-index value column into a step function.
mqseg::StepFunction column_to_step(const std::vector<double>& vals) {
  std::vector<int> bps{1};
  std::vector<double> sv{vals[0]};
  for (size_t i = 1; i < vals.size(); ++i) {
    if (vals[i] != vals[i - 1]) {
      bps.push_back(static_cast<int>(i) + 1);
      sv.push_back(vals[i]);
    }
  }
  bps.push_back(static_cast<int>(vals.size()) + 1);
  return mqseg::StepFunction(bps, sv);
}

struct CommonFitOpts {
  std::string input, out, format = "json", table_path, cost = "koenker",
              runs_mean = "classical";
  double beta = 0.5;
  double alpha = -1.0;
  double q = std::numeric_limits<double>::quiet_NaN();
  int reps = 5000;
  std::uint64_t seed = 1;
  int nthreads = 0;
};

mqseg::CostRule parse_cost(const std::string& s) {
  if (s == "koenker") return mqseg::CostRule::koenker;
  if (s == "runs") return mqseg::CostRule::runs;
  throw UsageError("unknown cost rule: " + s);
}

mqseg::RunsMean parse_runs_mean(const std::string& s) {
  if (s == "classical") return mqseg::RunsMean::classical;
  if (s == "shifted") return mqseg::RunsMean::shifted;
  throw UsageError("unknown runs-mean convention: " + s);
}

double resolve_q(const CommonFitOpts& o, int n, double beta) {
  const bool have_alpha = o.alpha > 0.0;
  const bool have_q = !std::isnan(o.q);
  if (have_alpha == have_q)
    throw UsageError("supply exactly one of --alpha or --q");
  if (have_q) return o.q;
  if (!(o.alpha > 0.0 && o.alpha < 1.0))
    throw UsageError("--alpha must lie in (0,1)");
  std::string path = o.table_path.empty() ? default_table_path() : o.table_path;
  mqseg::ThresholdTable table = mqseg::ThresholdTable::load(path);
  mqseg::ThresholdKey key{n, beta, o.alpha, o.reps, o.seed};
  return mqseg::threshold_for(table, key, path, o.nthreads);
}

int cmd_fit(const CommonFitOpts& o) {
  mqseg::Series z(read_column(o.input));
  mqseg::SegmentationConfig sc;
  sc.beta = o.beta;
  sc.q = resolve_q(o, z.size(), o.beta);
  sc.cost = parse_cost(o.cost);
  sc.runs_mean = parse_runs_mean(o.runs_mean);
  mqseg::SegmentationResult r = mqseg::fit(z, sc);

  if (o.format == "csv") {
    write_text(o.out, fit_to_csv(r));
  } else if (o.format == "json") {
    json out = fit_to_json(r);
    out["format_version"] = kFormatVersion;
    out["command"] = "fit";
    out["n"] = z.size();
    out["alpha"] = o.alpha > 0.0 ? json(o.alpha) : json(nullptr);
    write_text(o.out, out.dump(2) + "\n");
  } else {
    throw UsageError("unknown format: " + o.format);
  }
  return 0;
}

int cmd_msb(const CommonFitOpts& o, double alpha) {
  mqseg::Series z(read_column(o.input));
  if (!(alpha > 0.0 && alpha < 1.0))
    throw UsageError("--alpha must lie in (0,1)");
  mqseg::MsbConfig mc;
  mc.alpha = alpha;
  mc.reps = o.reps;
  mc.seed = o.seed;
  mc.nthreads = o.nthreads;
  mc.table_path = o.table_path.empty() ? default_table_path() : o.table_path;
  mc.cost = parse_cost(o.cost);
  mc.runs_mean = parse_runs_mean(o.runs_mean);
  mqseg::ThresholdTable table = mqseg::ThresholdTable::load(mc.table_path);
  mqseg::MsbResult r = mqseg::msb_fit(z, table, mc);

  json out;
  out["format_version"] = kFormatVersion;
  out["command"] = "msb";
  out["n"] = z.size();
  out["alpha_each"] = r.alpha_each;
  out["alpha_simultaneous"] = r.alpha_simultaneous;
  json fits = json::array();
  for (int k = 0; k < 3; ++k) {
    json f = fit_to_json(r.fits[static_cast<size_t>(k)]);
    f["reverted"] = r.reverted[static_cast<size_t>(k)];
    fits.push_back(f);
  }
  out["fits"] = fits;
  json merges = json::array();
  for (const auto& m : r.merges) {
    json betas = json::array();
    for (int qi : m.quantiles) betas.push_back(mc.betas[static_cast<size_t>(qi)]);
    merges.push_back({{"betas", betas},
                      {"original_indices", m.original_indices},
                      {"merged_index", m.merged_index}});
  }
  out["merges"] = merges;
  write_text(o.out, out.dump(2) + "\n");
  return 0;
}

int cmd_simulate(int n, double beta, int reps, std::uint64_t seed,
                 const std::vector<double>& alphas, const std::string& table,
                 const std::string& out_path, int nthreads) {
  if (n < 1 || reps < 1) throw UsageError("--n and --reps must be >= 1");
  if (alphas.empty()) throw UsageError("supply at least one --alpha");
  std::string path = table.empty() ? default_table_path() : table;
  mqseg::ThresholdTable tab = mqseg::ThresholdTable::load(path);
  // One simulation serves every alpha.
  std::vector<double> samples = mqseg::simulate_mn(n, beta, reps, seed, nthreads);
  std::ostringstream out;
  out << "alpha,q\n";
  for (double a : alphas) {
    if (!(a > 0.0 && a < 1.0)) throw UsageError("--alpha must lie in (0,1)");
    double q = mqseg::mn_quantile(samples, a);
    tab.insert({n, beta, a, reps, seed}, q);
    out << csv_double(a) << ',' << csv_double(q) << '\n';
  }
  tab.save(path);
  write_text(out_path, out.str());
  return 0;
}

int cmd_bench(const std::string& scenario_name, int n_constant,
              const std::string& noise, double sigma2, double cauchy_scale,
              double ar1_theta, bool use_ar1, const CommonFitOpts& o,
              int batch_reps, std::uint64_t batch_seed) {
  mqseg::ScenarioSpec spec;
  if (scenario_name == "bump500") {
    spec.signal = mqseg::bump500();
  } else if (scenario_name == "bump700") {
    spec.signal = mqseg::bump700();
  } else if (scenario_name == "constant") {
    spec.signal = mqseg::StepFunction::constant(n_constant, 0.0);
  } else {
    throw UsageError("unknown scenario '" + scenario_name +
                     "' (valid: bump500, bump700, constant)");
  }
  if (noise == "normal") {
    spec.noise = mqseg::NoiseSpec::normal(sigma2);
  } else if (noise == "t3") {
    spec.noise = mqseg::NoiseSpec::student_t3_scaled(sigma2);
  } else if (noise == "cauchy") {
    spec.noise = mqseg::NoiseSpec::cauchy_scaled(cauchy_scale);
  } else if (noise == "chi3") {
    spec.noise = mqseg::NoiseSpec::chi3_centered(sigma2);
  } else {
    throw UsageError("unknown noise '" + noise +
                     "' (valid: normal, t3, cauchy, chi3)");
  }
  if (use_ar1) spec.ar1 = mqseg::Ar1Spec{ar1_theta};

  mqseg::MethodConfig method;
  method.beta = o.beta;
  const bool have_q = !std::isnan(o.q);
  if (have_q) {
    method.q = o.q;
  } else {
    method.alpha = o.alpha > 0.0 ? o.alpha : 0.1;
  }
  method.alpha = o.alpha > 0.0 ? o.alpha : method.alpha;
  method.cost = parse_cost(o.cost);
  method.runs_mean = parse_runs_mean(o.runs_mean);
  method.threshold_reps = o.reps;
  method.threshold_seed = o.seed;
  method.table_path = o.table_path.empty() ? default_table_path() : o.table_path;
  method.nthreads = o.nthreads;

  mqseg::BatchSummary sum =
      mqseg::run_batch(spec, method, batch_reps, batch_seed, o.nthreads);
  std::ostringstream out;
  out << mqseg::BatchSummary::csv_header() << '\n'
      << sum.csv_row(scenario_name, method) << '\n';
  write_text(o.out, out.str());
  return 0;
}

int cmd_eval(const std::string& est_path, const std::string& truth_path,
             const std::string& out_path) {
  std::vector<double> est = read_column(est_path);
  std::vector<double> truth = read_column(truth_path);
  if (est.size() != truth.size())
    throw UsageError("est and truth have different lengths");
  mqseg::StepFunction fe = column_to_step(est);
  mqseg::StepFunction ft = column_to_step(truth);
  std::ostringstream out;
  out << "miae,v_measure\n"
      << csv_double(mqseg::miae(fe, ft)) << ','
      << csv_double(mqseg::v_measure(fe, ft)) << '\n';
  write_text(out_path, out.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multiscale quantile segmentation"};
  app.require_subcommand(1);

  CommonFitOpts fo;
  auto* fit_cmd = app.add_subcommand("fit", "segment one quantile of a series");
  fit_cmd->add_option("--input", fo.input, "input CSV, one value per line")
      ->required();
  fit_cmd->add_option("--beta", fo.beta, "quantile level in (0,1)");
  fit_cmd->add_option("--alpha", fo.alpha, "confidence level for calibrated q");
  fit_cmd->add_option("--q", fo.q, "explicit threshold (bypasses calibration)");
  fit_cmd->add_option("--cost", fo.cost, "koenker|runs");
  fit_cmd->add_option("--runs-mean", fo.runs_mean, "classical|shifted");
  fit_cmd->add_option("--table", fo.table_path, "threshold table file");
  fit_cmd->add_option("--reps", fo.reps, "threshold simulation replicates");
  fit_cmd->add_option("--seed", fo.seed, "threshold simulation seed");
  fit_cmd->add_option("--threads", fo.nthreads, "worker threads (0 = auto)");
  fit_cmd->add_option("--out", fo.out, "output path (default stdout)");
  fit_cmd->add_option("--format", fo.format, "json|csv");

  CommonFitOpts mo;
  double msb_alpha = 0.1;
  auto* msb_cmd = app.add_subcommand("msb", "three-quantile segment boxplot");
  msb_cmd->add_option("--input", mo.input, "input CSV")->required();
  msb_cmd->add_option("--alpha", msb_alpha, "level per quantile");
  msb_cmd->add_option("--cost", mo.cost, "koenker|runs");
  msb_cmd->add_option("--runs-mean", mo.runs_mean, "classical|shifted");
  msb_cmd->add_option("--table", mo.table_path, "threshold table file");
  msb_cmd->add_option("--reps", mo.reps, "threshold simulation replicates");
  msb_cmd->add_option("--seed", mo.seed, "threshold simulation seed");
  msb_cmd->add_option("--threads", mo.nthreads, "worker threads (0 = auto)");
  msb_cmd->add_option("--out", mo.out, "output path (default stdout)");

  int sim_n = 0;
  double sim_beta = 0.5;
  int sim_reps = 5000;
  std::uint64_t sim_seed = 1;
  std::vector<double> sim_alphas;
  std::string sim_table, sim_out;
  int sim_threads = 0;
  auto* sim_cmd = app.add_subcommand("simulate", "calibrate thresholds");
  sim_cmd->add_option("--n", sim_n, "series length")->required();
  sim_cmd->add_option("--beta", sim_beta, "quantile level");
  sim_cmd->add_option("--reps", sim_reps, "Monte-Carlo replicates");
  sim_cmd->add_option("--seed", sim_seed, "master seed");
  sim_cmd->add_option("--alpha", sim_alphas, "levels (repeatable)")
      ->required();
  sim_cmd->add_option("--table", sim_table, "threshold table file");
  sim_cmd->add_option("--threads", sim_threads, "worker threads (0 = auto)");
  sim_cmd->add_option("--out", sim_out, "output path (default stdout)");

  CommonFitOpts bo;
  std::string bench_scenario, bench_noise = "normal";
  int bench_n = 500, bench_reps = 100;
  std::uint64_t bench_seed = 7;
  double bench_sigma2 = 0.04, bench_cauchy = 0.02, bench_theta = 0.0;
  bool bench_ar1 = false;
  auto* bench_cmd = app.add_subcommand("bench", "Monte-Carlo batch run");
  bench_cmd->add_option("--scenario", bench_scenario,
                        "bump500|bump700|constant")->required();
  bench_cmd->add_option("--n", bench_n, "length for constant scenario");
  bench_cmd->add_option("--noise", bench_noise, "normal|t3|cauchy|chi3");
  bench_cmd->add_option("--sigma2", bench_sigma2, "noise variance");
  bench_cmd->add_option("--cauchy-scale", bench_cauchy, "cauchy scale");
  bench_cmd->add_option("--ar1-theta", bench_theta, "AR(1) coefficient")
      ->each([&](const std::string&) { bench_ar1 = true; });
  bench_cmd->add_option("--beta", bo.beta, "quantile level");
  bench_cmd->add_option("--alpha", bo.alpha, "level for calibrated q");
  bench_cmd->add_option("--q", bo.q, "explicit threshold");
  bench_cmd->add_option("--cost", bo.cost, "koenker|runs");
  bench_cmd->add_option("--runs-mean", bo.runs_mean, "classical|shifted");
  bench_cmd->add_option("--table", bo.table_path, "threshold table file");
  bench_cmd->add_option("--threshold-reps", bo.reps, "calibration replicates");
  bench_cmd->add_option("--threshold-seed", bo.seed, "calibration seed");
  bench_cmd->add_option("--reps", bench_reps, "batch replicates");
  bench_cmd->add_option("--seed", bench_seed, "batch master seed");
  bench_cmd->add_option("--threads", bo.nthreads, "worker threads (0 = auto)");
  bench_cmd->add_option("--out", bo.out, "output path (default stdout)");

  std::string eval_est, eval_truth, eval_out;
  auto* eval_cmd = app.add_subcommand("eval", "compare two step functions");
  eval_cmd->add_option("--est", eval_est, "estimate CSV")->required();
  eval_cmd->add_option("--truth", eval_truth, "truth CSV")->required();
  eval_cmd->add_option("--out", eval_out, "output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand(fit_cmd)) return cmd_fit(fo);
    if (app.got_subcommand(msb_cmd)) return cmd_msb(mo, msb_alpha);
    if (app.got_subcommand(sim_cmd))
      return cmd_simulate(sim_n, sim_beta, sim_reps, sim_seed, sim_alphas,
                          sim_table, sim_out, sim_threads);
    if (app.got_subcommand(bench_cmd))
      return cmd_bench(bench_scenario, bench_n, bench_noise, bench_sigma2,
                       bench_cauchy, bench_theta, bench_ar1, bo, bench_reps,
                       bench_seed);
    if (app.got_subcommand(eval_cmd))
      return cmd_eval(eval_est, eval_truth, eval_out);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
