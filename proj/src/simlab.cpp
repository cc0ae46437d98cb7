#include "mqseg/simlab.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <thread>
#include <vector>

#include <boost/math/distributions/cauchy.hpp>
#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "mqseg/threshold.hpp"

namespace mqseg {

namespace {
// Median of chi^2_3, by high-accuracy numeric inversion of the cdf.
constexpr double kChi3Median = 2.3659738843753377;
}  // namespace

NoiseSpec NoiseSpec::normal(double sigma2) {
  if (!(sigma2 > 0.0)) throw std::domain_error("noise: sigma2 must be > 0");
  return {Family::normal, sigma2, 0.0};
}
NoiseSpec NoiseSpec::student_t3_scaled(double sigma2) {
  if (!(sigma2 > 0.0)) throw std::domain_error("noise: sigma2 must be > 0");
  return {Family::student_t3_scaled, sigma2, 0.0};
}
NoiseSpec NoiseSpec::cauchy_scaled(double c) {
  if (!(c > 0.0)) throw std::domain_error("noise: cauchy scale must be > 0");
  return {Family::cauchy_scaled, 1.0, c};
}
NoiseSpec NoiseSpec::chi3_centered(double sigma2) {
  if (!(sigma2 > 0.0)) throw std::domain_error("noise: sigma2 must be > 0");
  return {Family::chi3_centered, sigma2, 0.0};
}

double NoiseSpec::draw(RngStream& rng) const {
  const double sigma = std::sqrt(sigma2);
  switch (family) {
    case Family::normal:
      return sigma * rng.normal();
    case Family::student_t3_scaled:
      return sigma / std::sqrt(3.0) * rng.student_t3();
    case Family::cauchy_scaled:
      return cauchy_scale * rng.cauchy();
    case Family::chi3_centered:
      return (rng.chi2_3() - kChi3Median) * sigma / std::sqrt(6.0);
  }
  return 0.0;
}

double NoiseSpec::quantile(double beta) const {
  const double sigma = std::sqrt(sigma2);
  switch (family) {
    case Family::normal:
      return sigma * boost::math::quantile(boost::math::normal(), beta);
    case Family::student_t3_scaled:
      return sigma / std::sqrt(3.0) *
             boost::math::quantile(boost::math::students_t(3.0), beta);
    case Family::cauchy_scaled:
      return boost::math::quantile(boost::math::cauchy(0.0, cauchy_scale),
                                   beta);
    case Family::chi3_centered:
      return (boost::math::quantile(boost::math::chi_squared(3.0), beta) -
              kChi3Median) *
             sigma / std::sqrt(6.0);
  }
  return 0.0;
}

Series gen_additive(const ScenarioSpec& spec) {
  const int n = spec.signal.n();
  RngStream rng(spec.seed);
  std::vector<double> z(static_cast<size_t>(n));
  for (int i = 1; i <= n; ++i)
    z[static_cast<size_t>(i) - 1] = spec.signal.at(i) + spec.noise.draw(rng);
  return Series(std::move(z));
}

Series gen_ar1(const ScenarioSpec& spec) {
  if (!spec.ar1) throw std::domain_error("gen_ar1: scenario has no AR(1) spec");
  const double theta = spec.ar1->theta;
  if (!(std::fabs(theta) < 1.0))
    throw std::domain_error("gen_ar1: |theta| must be < 1");
  const int n = spec.signal.n();
  const double stab = std::sqrt(1.0 - theta * theta);
  RngStream rng(spec.seed);
  std::vector<double> z(static_cast<size_t>(n));
  double x = rng.normal() / stab;  // stationary start
  z[0] = spec.signal.at(1) + stab * x;
  for (int i = 2; i <= n; ++i) {
    x = theta * x + rng.normal();
    z[static_cast<size_t>(i) - 1] = spec.signal.at(i) + stab * x;
  }
  return Series(std::move(z));
}

Series generate(const ScenarioSpec& spec) {
  return spec.ar1 ? gen_ar1(spec) : gen_additive(spec);
}

StepFunction bump500() {
  return StepFunction({1, 126, 376, 501}, {0.0, 1.0, 0.0});
}

StepFunction bump700() {
  return StepFunction({1, 301, 401, 701}, {0.0, 1.0, 0.0});
}

double miae(const StepFunction& est, const StepFunction& truth) {
  const int n = truth.n();
  if (est.n() != n) throw std::invalid_argument("miae: length mismatch");
  double acc = 0.0;
  for (int i = 1; i <= n; ++i) acc += std::fabs(est.at(i) - truth.at(i));
  return acc / n;
}

double v_measure(const StepFunction& est, const StepFunction& truth) {
  const int n = truth.n();
  if (est.n() != n) throw std::invalid_argument("v_measure: length mismatch");
  const int nc = truth.segments(), nk = est.segments();
  std::vector<std::vector<int>> joint(static_cast<size_t>(nc),
                                      std::vector<int>(static_cast<size_t>(nk), 0));
  std::vector<int> csum(static_cast<size_t>(nc), 0), ksum(static_cast<size_t>(nk), 0);
  for (int i = 1; i <= n; ++i) {
    int c = truth.segment_of(i) - 1, k = est.segment_of(i) - 1;
    ++joint[static_cast<size_t>(c)][static_cast<size_t>(k)];
    ++csum[static_cast<size_t>(c)];
    ++ksum[static_cast<size_t>(k)];
  }
  auto ent = [n](const std::vector<int>& counts) {
    double h = 0.0;
    for (int m : counts)
      if (m > 0) h -= (static_cast<double>(m) / n) * std::log(static_cast<double>(m) / n);
    return h;
  };
  double hc = ent(csum), hk = ent(ksum);
  double hck = 0.0, hkc = 0.0;  // H(C|K), H(K|C)
  for (int c = 0; c < nc; ++c) {
    for (int k = 0; k < nk; ++k) {
      int m = joint[static_cast<size_t>(c)][static_cast<size_t>(k)];
      if (m == 0) continue;
      double pm = static_cast<double>(m) / n;
      hck -= pm * std::log(static_cast<double>(m) / ksum[static_cast<size_t>(k)]);
      hkc -= pm * std::log(static_cast<double>(m) / csum[static_cast<size_t>(c)]);
    }
  }
  double h = (hc == 0.0) ? 1.0 : 1.0 - hck / hc;
  double c = (hk == 0.0) ? 1.0 : 1.0 - hkc / hk;
  if (h + c == 0.0) return 0.0;
  return 2.0 * h * c / (h + c);
}

double BatchSummary::freq_at(int s) const {
  auto it = s_hat_freq.find(s);
  return it == s_hat_freq.end() ? 0.0
                                : static_cast<double>(it->second) / reps;
}

double BatchSummary::freq_gt(int s) const {
  int acc = 0;
  for (const auto& [k, m] : s_hat_freq)
    if (k > s) acc += m;
  return static_cast<double>(acc) / reps;
}

std::string BatchSummary::csv_header() {
  return "scenario,beta,alpha,q,cost,reps,s_true,freq_below_s,freq_s,"
         "freq_s_plus1,freq_s_plus2,freq_above,mean_miae,mean_v,ci_coverage,"
         "band_coverage";
}

std::string BatchSummary::csv_row(const std::string& scenario_name,
                                  const MethodConfig& method) const {
  double below = 0.0, above = 0.0;
  for (const auto& [k, m] : s_hat_freq) {
    if (k < s_true) below += static_cast<double>(m) / reps;
    if (k > s_true + 2) above += static_cast<double>(m) / reps;
  }
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "%s,%.17g,%.17g,%.17g,%s,%d,%d,%.17g,%.17g,%.17g,%.17g,%.17g,"
                "%.17g,%.17g,%.17g,%.17g",
                scenario_name.c_str(), method.beta, method.alpha, q_used,
                method.cost == CostRule::koenker ? "koenker" : "runs", reps,
                s_true, below, freq_at(s_true), freq_at(s_true + 1),
                freq_at(s_true + 2), above, mean_miae, mean_v, ci_coverage,
                band_coverage);
  return buf;
}

BatchSummary run_batch(const ScenarioSpec& scenario, const MethodConfig& method,
                       int reps, std::uint64_t seed, int nthreads) {
  if (reps < 1) throw std::domain_error("run_batch: reps must be >= 1");
  const int n = scenario.signal.n();

  double q;
  if (method.q) {
    q = *method.q;
  } else {
    ThresholdTable table;
    if (!method.table_path.empty()) table = ThresholdTable::load(method.table_path);
    ThresholdKey key{n, method.beta, method.alpha, method.threshold_reps,
                     method.threshold_seed};
    q = threshold_for(table, key, method.table_path, method.nthreads);
  }

  // True beta-quantile curve of the observations.
  const double shift =
      scenario.ar1 ? boost::math::quantile(boost::math::normal(), method.beta)
                   : scenario.noise.quantile(method.beta);
  std::vector<double> tvals;
  for (double v : scenario.signal.segment_values()) tvals.push_back(v + shift);
  const StepFunction truth(scenario.signal.breakpoints(), tvals);
  const std::vector<int> true_cps = scenario.signal.changepoint_indices();
  const int s_true = scenario.signal.segments();

  struct Rep {
    int s_hat = 0;
    double miae_v = 0.0, v_v = 0.0;
    bool cond = false, ci_ok = false, band_ok = false;
  };
  std::vector<Rep> rep(static_cast<size_t>(reps));

  auto one = [&](int r) {
    ScenarioSpec local = scenario;
    local.seed = substream_seed(seed, static_cast<std::uint64_t>(r));
    Series z = generate(local);
    SegmentationConfig sc;
    sc.beta = method.beta;
    sc.q = q;
    sc.cost = method.cost;
    sc.runs_mean = method.runs_mean;
    sc.with_bands = true;
    SegmentationResult res = fit(z, sc);
    Rep& out = rep[static_cast<size_t>(r)];
    out.s_hat = res.s_hat;
    out.miae_v = miae(res.fit, truth);
    out.v_v = v_measure(res.fit, truth);
    out.cond = (res.status == FitStatus::ok && res.s_hat == s_true);
    if (out.cond) {
      out.ci_ok = true;
      for (size_t k = 0; k < true_cps.size(); ++k) {
        const auto& ci = res.cp_intervals[k];
        if (true_cps[k] < ci.left || true_cps[k] > ci.right) out.ci_ok = false;
      }
      out.band_ok = true;
      for (int i = 1; i <= n; ++i) {
        const auto& b = res.band[static_cast<size_t>(i) - 1];
        const double v = truth.at(i);
        if (!(b.lower <= v && v < b.upper)) out.band_ok = false;
      }
    }
  };

  if (nthreads <= 0) nthreads = std::max(1u, std::thread::hardware_concurrency());
  nthreads = std::min(nthreads, reps);
  if (nthreads == 1) {
    for (int r = 0; r < reps; ++r) one(r);
  } else {
    std::atomic<int> next{0};
    auto worker = [&]() {
      for (;;) {
        int r = next.fetch_add(1);
        if (r >= reps) break;
        one(r);
      }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  BatchSummary sum;
  sum.reps = reps;
  sum.s_true = s_true;
  sum.q_used = q;
  int cond = 0, ci_ok = 0, band_ok = 0;
  for (int r = 0; r < reps; ++r) {
    const Rep& x = rep[static_cast<size_t>(r)];
    ++sum.s_hat_freq[x.s_hat];
    sum.mean_miae += x.miae_v;
    sum.mean_v += x.v_v;
    if (x.cond) {
      ++cond;
      if (x.ci_ok) ++ci_ok;
      if (x.band_ok) ++band_ok;
    }
  }
  sum.mean_miae /= reps;
  sum.mean_v /= reps;
  sum.conditioned = cond;
  sum.ci_coverage = cond > 0 ? static_cast<double>(ci_ok) / cond
                             : std::numeric_limits<double>::quiet_NaN();
  sum.band_coverage = cond > 0 ? static_cast<double>(band_ok) / cond
                               : std::numeric_limits<double>::quiet_NaN();
  return sum;
}

}  // namespace mqseg
