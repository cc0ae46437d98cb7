// Quantile segmentation under the multiscale acceptance region.
//
// fit() finds a piecewise-constant quantile function with the smallest number
// of segments whose sign vector passes every local penalized test at level q,
// then picks, among candidates with that segment count, the one optimizing a
// within-class cost (Koenker quantile loss by default, or a runs-based
// log density).  It also reports a confidence interval for each breakpoint
// and a pointwise confidence band, both derived from the same acceptance
// region.
//
// The search runs on interval systems of all lengths.  Per length we keep the
// admissible rank window [m_lo, m_hi] precomputed in a ScaleTable; a sliding
// double-heap per length tracks the two order statistics that bound the value
// box of the current interval, and running intersections of those boxes drive
// a pruned dynamic program over segment starts (the earliest feasible start
// f(j) is nondecreasing in j, so each candidate list is a contiguous range).
//
// brute_force_fit() is an independent oracle for small n: it enumerates all
// 2^(n-1) breakpoint configurations against a directly-computed intersection
// table.  Fit and oracle share the same segment value rule so their Koenker
// losses are comparable exactly.
#ifndef MQSEG_SEGMENTATION_HPP_
#define MQSEG_SEGMENTATION_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "mqseg/multiscale.hpp"
#include "mqseg/series.hpp"

namespace mqseg {

enum class CostRule { koenker, runs };

// Mean convention for the runs-count normal approximation:
//   classical: mu = 1 + 2*k*(n-k)/n   (Wald–Wolfowitz)
//   shifted:   mu = 2*k*(n-k)/n - 1   (an alternative seen in the literature)
enum class RunsMean { classical, shifted };

enum class FitStatus {
  ok,
  degenerate_threshold,  // q + penalty(n,n) <= 0: every sign vector rejected
  infeasible,            // even single-point intervals have empty value boxes
};

struct SegmentationConfig {
  double beta = 0.5;
  double q = 1.0;
  CostRule cost = CostRule::koenker;
  RunsMean runs_mean = RunsMean::classical;
  bool with_bands = true;
};

// Confidence interval for one breakpoint, in sample indices (1-based; the
// breakpoint is the first index of the right segment) and in design
// coordinates tau = (index - 1) / n.
struct ChangepointInterval {
  int index;
  int left;
  int right;
  double tau;
  double tau_left;
  double tau_right;
};

// Pointwise band [lower, upper); +-inf allowed on either side.
struct BandPoint {
  double lower;
  double upper;
};

struct SegmentationResult {
  FitStatus status = FitStatus::ok;
  // Number of segments of the fit.  0 only for status == infeasible, where no
  // piecewise-constant function passes; `fit` then falls back to the global
  // empirical quantile.
  int s_hat = 0;
  StepFunction fit = StepFunction::constant(1, 0.0);
  double cost = 0.0;
  std::vector<ChangepointInterval> cp_intervals;
  std::vector<BandPoint> band;  // size n when computed, else empty
  double q_used = 0.0;
  double beta = 0.5;
  CostRule cost_rule = CostRule::koenker;
};

SegmentationResult fit(const Series& z, const SegmentationConfig& cfg);

// Total check loss sum_i rho_beta(z_i - f(x_i)) with
// rho_beta(u) = u * (beta - 1{u < 0}).
double koenker_cost(const Series& z, const StepFunction& f, double beta);

// Meet of the value boxes of every subinterval of [first, last]: the
// half-open range a single segment spanning [first, last] may take.
std::pair<double, double> segment_value_range(const Series& z,
                                              const ScaleTable& tab,
                                              int first, int last);

// The shared segment value rule: empirical beta-quantile of z[first..last]
// clamped into [lo, hi).
double clamped_segment_value(const Series& z, int first, int last, double beta,
                             double lo, double hi);

// log of  C(n,k) beta^k (1-beta)^(n-k) * N(r; mu, sigma^2) density, the
// score used by the runs cost rule.  k = #ones, r = #runs of the sign
// vector.  Degenerate sigma^2 <= 0 (k or n-k < 2): all mass on r = 1.
double runs_log_density(int r, int k, int n, double beta,
                        RunsMean convention = RunsMean::classical);

// Exhaustive oracle (n <= 20).  Enumerates breakpoint sets; reports the
// minimal passing segment count (0 if none passes), every minimal passing
// breakpoint set, and the best Koenker cost over those sets under the shared
// value rule.
struct BruteForceResult {
  int s_hat = 0;
  std::vector<std::vector<int>> minimal_breakpoint_sets;
  double best_koenker = 0.0;
  std::vector<int> best_breakpoints;
};

BruteForceResult brute_force_fit(const Series& z, double beta, double q);

}  // namespace mqseg

#endif  // MQSEG_SEGMENTATION_HPP_
