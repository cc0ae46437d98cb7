// Hot inner loop of the Monte-Carlo null simulation: given the ones-count
// prefix sums of a 0/1 sequence, take the maximum of the penalized statistic
// over all O(n^2) intervals.
//
// The statistic for an interval depends only on (length, ones-count), so it
// is precomputed into a table once per (n, beta) and the scan reduces to
// integer window sums + table lookup + max. That makes the AVX2 variant
// (vectorized subtract/gather/max) bit-identical to the scalar reference:
// both read the same table entries and max over doubles is exact. The
// variant is chosen once at runtime from CPU capabilities; both variants are
// exposed for equivalence tests.
#ifndef MQSEG_KERNELS_HPP
#define MQSEG_KERNELS_HPP

#include <cstdint>
#include <vector>

namespace mqseg {

// tab(len, k) = sqrt(2 * len * h(k/len)) - penalty(len, n), rows len = 1..n,
// k = 0..len, stored flat.
class PenalizedLlrTable {
 public:
  PenalizedLlrTable(int n, double beta);

  int n() const { return n_; }
  double beta() const { return beta_; }
  const double* row(int len) const { return flat_.data() + offsets_[static_cast<size_t>(len) - 1]; }
  double at(int len, int k) const { return row(len)[k]; }

 private:
  int n_;
  double beta_;
  std::vector<double> flat_;
  std::vector<std::size_t> offsets_;
};

// prefix has n+1 entries, prefix[0] = 0, prefix[i] = #ones among the first i
// bits. Returns max over 1 <= i <= j <= n of tab(j-i+1, ones(i..j)).
double max_penalized_scan_scalar(const PenalizedLlrTable& tab, const std::int32_t* prefix);
#if defined(__x86_64__) || defined(__i386__)
double max_penalized_scan_avx2(const PenalizedLlrTable& tab, const std::int32_t* prefix);
#endif

// Runtime-dispatched entry point.
double max_penalized_scan(const PenalizedLlrTable& tab, const std::int32_t* prefix);

// Name of the variant max_penalized_scan currently dispatches to
// ("avx2" or "scalar").
const char* active_scan_kernel();

}  // namespace mqseg

#endif  // MQSEG_KERNELS_HPP
