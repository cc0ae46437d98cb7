// Null calibration of the multiscale statistic.
//
// Under a constant beta-quantile the sign vector is iid Bernoulli(beta), so
// the distribution of the penalized scan maximum M_n depends on (n, beta)
// only.  We calibrate q by Monte Carlo: simulate M_n many times and take the
// empirical (1 - alpha)-quantile.  Simulated values are cached in a small
// text table so repeated runs do not pay the simulation cost again.
#ifndef MQSEG_THRESHOLD_HPP_
#define MQSEG_THRESHOLD_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace mqseg {

// One replicate: draw X ~ Bernoulli(beta)^n, return max over all intervals of
// sqrt(2 T) - penalty.  Exposed for tests (n small enough to enumerate).
double simulate_mn_once(int n, double beta, std::uint64_t master_seed,
                        std::uint64_t replicate_index);

// All replicates, in replicate order.  Deterministic in (master_seed, reps):
// each replicate uses its own substream, so the result does not depend on
// nthreads.  nthreads <= 0 means hardware_concurrency.
std::vector<double> simulate_mn(int n, double beta, int reps,
                                std::uint64_t master_seed, int nthreads = 0);

// Empirical upper quantile: smallest sample value with ecdf >= 1 - alpha,
// i.e. the ceil(reps * (1 - alpha))-th order statistic.
double mn_quantile(std::vector<double> samples, double alpha);

struct ThresholdKey {
  int n;
  double beta;
  double alpha;
  int reps;
  std::uint64_t seed;

  bool operator<(const ThresholdKey& o) const;
};

// Plain text cache, one "n,beta,alpha,reps,seed,q" line per entry.
class ThresholdTable {
 public:
  ThresholdTable() = default;

  // Missing file -> empty table.  Malformed content -> std::runtime_error.
  static ThresholdTable load(const std::string& path);
  // Whole-file replace via a temp file + rename.
  void save(const std::string& path) const;

  std::optional<double> lookup(const ThresholdKey& key) const;
  void insert(const ThresholdKey& key, double q);
  std::size_t size() const { return entries_.size(); }

 private:
  std::map<ThresholdKey, double> entries_;
};

// Cache lookup, simulating (and inserting + saving, when path is nonempty) on
// a miss.
double threshold_for(ThresholdTable& table, const ThresholdKey& key,
                     const std::string& path, int nthreads = 0);

}  // namespace mqseg

#endif  // MQSEG_THRESHOLD_HPP_
