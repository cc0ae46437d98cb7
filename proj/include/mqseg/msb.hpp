// Multiscale segment boxplot: simultaneous quantile fits with changepoint
// merging.
//
// Fits the 0.25/0.5/0.75 quantile curves (each at level alpha, so the triple
// holds simultaneously at level 1 - 3*alpha by Bonferroni) and merges
// changepoints whose confidence intervals overlap across quantiles into a
// common index, so the three curves jump at the same place when the data
// cannot tell their jump locations apart.
#ifndef MQSEG_MSB_HPP_
#define MQSEG_MSB_HPP_

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "mqseg/segmentation.hpp"
#include "mqseg/threshold.hpp"

namespace mqseg {

struct MsbConfig {
  double alpha = 0.1;  // per-quantile level
  std::array<double, 3> betas{0.25, 0.5, 0.75};
  // Threshold calibration parameters (used when a quantile's q must be
  // simulated rather than found in the table).
  int reps = 5000;
  std::uint64_t seed = 1;
  int nthreads = 0;
  std::string table_path;  // persist simulated thresholds when nonempty
  CostRule cost = CostRule::koenker;
  RunsMean runs_mean = RunsMean::classical;
};

struct MergeRecord {
  std::vector<int> quantiles;         // positions into betas, ascending
  std::vector<int> original_indices;  // fitted changepoints, same order
  int merged_index = 0;
};

struct MsbResult {
  std::array<SegmentationResult, 3> fits;  // post-merge
  std::vector<MergeRecord> merges;
  std::array<double, 3> thresholds{};
  double alpha_each = 0.0;
  double alpha_simultaneous = 0.0;  // 3 * alpha
  // True for a quantile whose merged configuration failed the acceptance
  // audit and was rolled back to its original fit.
  std::array<bool, 3> reverted{};
};

MsbResult msb_fit(const Series& z, ThresholdTable& thresholds,
                  const MsbConfig& cfg);

}  // namespace mqseg

#endif  // MQSEG_MSB_HPP_
