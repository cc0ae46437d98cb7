// Scenario generators and evaluation metrics for Monte-Carlo studies of the
// segmentation engine: step signals plus several noise families, MIAE and
// V-measure metrics, and a deterministic batch runner with CSV summaries.
#ifndef MQSEG_SIMLAB_HPP_
#define MQSEG_SIMLAB_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "mqseg/rng.hpp"
#include "mqseg/segmentation.hpp"

namespace mqseg {

// Noise families with the scaling conventions used throughout the test
// scenarios: sigma2 is the target variance (Cauchy has none and takes a raw
// scale instead); t3 is scaled by sigma/sqrt(3), the centered chi^2_3 by
// sigma/sqrt(6).
struct NoiseSpec {
  enum class Family { normal, student_t3_scaled, cauchy_scaled, chi3_centered };

  static NoiseSpec normal(double sigma2);
  static NoiseSpec student_t3_scaled(double sigma2);
  static NoiseSpec cauchy_scaled(double c);
  static NoiseSpec chi3_centered(double sigma2);

  double draw(RngStream& rng) const;
  // beta-quantile of the noise distribution (for building the true quantile
  // curve of an additive scenario).
  double quantile(double beta) const;

  Family family = Family::normal;
  double sigma2 = 1.0;
  double cauchy_scale = 0.0;
};

// Stationary AR(1) with standard normal innovations; the output is scaled by
// sqrt(1 - theta^2) so its marginal variance is 1.
struct Ar1Spec {
  double theta = 0.0;
};

struct ScenarioSpec {
  StepFunction signal;
  NoiseSpec noise;
  std::optional<Ar1Spec> ar1;  // when set, replaces `noise`
  std::uint64_t seed = 0;
};

Series gen_additive(const ScenarioSpec& spec);
Series gen_ar1(const ScenarioSpec& spec);
// Dispatches on spec.ar1.
Series generate(const ScenarioSpec& spec);

// The two canonical test signals: 0/1/0 bumps.
StepFunction bump500();  // n=500, breakpoints 126, 376
StepFunction bump700();  // n=700, breakpoints 301, 401

// Mean absolute deviation between two step functions over the design points.
double miae(const StepFunction& est, const StepFunction& truth);

// Entropy-based agreement of the two induced index partitions, in [0, 1].
// Natural log; degenerate entropies use the h=1/c=1 convention, and V=0 when
// h + c = 0.
double v_measure(const StepFunction& est, const StepFunction& truth);

struct MethodConfig {
  double beta = 0.5;
  double alpha = 0.1;
  std::optional<double> q;  // explicit threshold: skips calibration
  CostRule cost = CostRule::koenker;
  RunsMean runs_mean = RunsMean::classical;
  int threshold_reps = 5000;
  std::uint64_t threshold_seed = 1;
  std::string table_path;
  int nthreads = 0;
};

struct BatchSummary {
  int reps = 0;
  int s_true = 0;
  double q_used = 0.0;
  std::map<int, int> s_hat_freq;
  double mean_miae = 0.0;
  double mean_v = 0.0;
  int conditioned = 0;        // replicates with s_hat == s_true
  double ci_coverage = 0.0;   // of those: all true changepoints inside CIs
  double band_coverage = 0.0; // of those: truth inside the band everywhere

  double freq_at(int s) const;
  double freq_gt(int s) const;

  static std::string csv_header();
  std::string csv_row(const std::string& scenario_name,
                      const MethodConfig& method) const;
};

// Runs `reps` independent replicates (scenario seed = substream r of `seed`),
// fits each, and aggregates in replicate order.  Parallel execution changes
// nothing about the result.
BatchSummary run_batch(const ScenarioSpec& scenario, const MethodConfig& method,
                       int reps, std::uint64_t seed, int nthreads = 0);

}  // namespace mqseg

#endif  // MQSEG_SIMLAB_HPP_
