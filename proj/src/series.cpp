#include "mqseg/series.hpp"

#include <algorithm>
#include <cmath>

namespace mqseg {

Series::Series(std::vector<double> values) : values_(std::move(values)) {
  for (size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i]))
      throw std::domain_error("series contains a non-finite value at position " +
                              std::to_string(i + 1));
  }
}

StepFunction::StepFunction(std::vector<int> breakpoints, std::vector<double> values)
    : breakpoints_(std::move(breakpoints)), values_(std::move(values)) {
  if (breakpoints_.size() < 2 || breakpoints_.size() != values_.size() + 1)
    throw std::invalid_argument("step function needs S+1 breakpoints for S segment values");
  if (breakpoints_.front() != 1)
    throw std::invalid_argument("first breakpoint must be 1");
  for (size_t s = 1; s < breakpoints_.size(); ++s) {
    if (breakpoints_[s] <= breakpoints_[s - 1])
      throw std::invalid_argument("breakpoints must be strictly increasing");
  }
}

StepFunction StepFunction::constant(int n, double value) {
  return StepFunction({1, n + 1}, {value});
}

StepFunction StepFunction::from_lengths(const std::vector<int>& lengths,
                                        const std::vector<double>& values) {
  std::vector<int> bp(1, 1);
  for (int len : lengths) bp.push_back(bp.back() + len);
  return StepFunction(std::move(bp), values);
}

int StepFunction::segment_of(int i) const {
  // First breakpoint strictly greater than i bounds the covering segment.
  auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), i);
  return static_cast<int>(it - breakpoints_.begin());
}

std::vector<int> StepFunction::changepoint_indices() const {
  return std::vector<int>(breakpoints_.begin() + 1, breakpoints_.end() - 1);
}

std::vector<double> StepFunction::changepoint_taus() const {
  std::vector<double> taus;
  const double nn = n();
  for (size_t s = 1; s + 1 < breakpoints_.size(); ++s)
    taus.push_back((breakpoints_[s] - 1) / nn);
  return taus;
}

bool StepFunction::is_strict_step() const {
  for (size_t s = 1; s < values_.size(); ++s)
    if (values_[s] == values_[s - 1]) return false;
  return true;
}

std::vector<double> StepFunction::expand() const {
  std::vector<double> out(static_cast<size_t>(n()));
  for (int s = 1; s <= segments(); ++s)
    for (int i = segment_begin(s); i <= segment_end(s); ++i)
      out[static_cast<size_t>(i) - 1] = value(s);
  return out;
}

BinarySeries transform(const Series& z, const StepFunction& f) {
  if (z.size() != f.n())
    throw std::invalid_argument("series and step function cover different index ranges");
  std::vector<std::uint8_t> bits(static_cast<size_t>(z.size()));
  for (int s = 1; s <= f.segments(); ++s) {
    const double v = f.value(s);
    for (int i = f.segment_begin(s); i <= f.segment_end(s); ++i)
      bits[static_cast<size_t>(i) - 1] = (v - z[i] >= 0.0) ? 1 : 0;
  }
  return BinarySeries(std::move(bits));
}

int runs_count(const BinarySeries& w) {
  if (w.size() == 0) return 0;
  int runs = 1;
  for (int i = 1; i < w.size(); ++i)
    if (w[i] != w[i + 1]) ++runs;
  return runs;
}

int ones_count(const BinarySeries& w) {
  int k = 0;
  for (int i = 1; i <= w.size(); ++i) k += w[i];
  return k;
}

double empirical_quantile(std::vector<double> values, double beta) {
  if (values.empty()) throw std::invalid_argument("quantile of an empty sample");
  const long r = ceil_guarded(static_cast<double>(values.size()) * beta);
  const long rank = std::clamp(r, 1L, static_cast<long>(values.size()));
  std::nth_element(values.begin(), values.begin() + (rank - 1), values.end());
  return values[static_cast<size_t>(rank) - 1];
}

namespace {
constexpr double kNearIntTol = 1e-9;
}

long ceil_guarded(double x) {
  const double r = std::nearbyint(x);
  if (std::fabs(x - r) <= kNearIntTol) return static_cast<long>(r);
  return static_cast<long>(std::ceil(x));
}

long floor_guarded(double x) {
  const double r = std::nearbyint(x);
  if (std::fabs(x - r) <= kNearIntTol) return static_cast<long>(r);
  return static_cast<long>(std::floor(x));
}

}  // namespace mqseg
