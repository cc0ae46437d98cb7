// Core data model: observation series on the regular design grid, quantile
// levels, step functions and the binary transform.
//
// Index conventions used throughout the library:
//   - observations are 1-based: z_1 .. z_n at design points x_i = (i-1)/n;
//   - a step function with S segments stores breakpoints
//       1 = b_0 < b_1 < ... < b_S = n+1
//     where segment s (1-based) covers indices [b_{s-1}, b_s);
//   - the time-domain changepoint of segment boundary b_s is tau_s = (b_s-1)/n,
//     always in [0, 1).
#ifndef MQSEG_SERIES_HPP
#define MQSEG_SERIES_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace mqseg {

// Quantile level, restricted to the open interval (0, 1).
class QuantileLevel {
 public:
  explicit QuantileLevel(double beta) : beta_(beta) {
    if (!(beta > 0.0 && beta < 1.0))
      throw std::domain_error("quantile level must lie strictly inside (0, 1), got " +
                              std::to_string(beta));
  }
  double value() const { return beta_; }
  operator double() const { return beta_; }

 private:
  double beta_;
};

// Finite observation series. Rejects NaN/inf on construction so downstream
// order-statistic code never has to reason about unordered values.
class Series {
 public:
  Series() = default;
  explicit Series(std::vector<double> values);

  int size() const { return static_cast<int>(values_.size()); }
  bool empty() const { return values_.empty(); }

  // 1-based access; unchecked in release builds.
  double operator[](int i) const { return values_[static_cast<size_t>(i) - 1]; }

  const std::vector<double>& values() const { return values_; }
  double design_point(int i) const {
    return static_cast<double>(i - 1) / static_cast<double>(size());
  }

 private:
  std::vector<double> values_;
};

// Right-continuous piecewise constant function on the index grid.
//
// Adjacent segment values are normally distinct; fitted results can in rare
// tied-data corners carry equal neighbours (the fit keeps its partition), so
// distinctness is not enforced here. Use is_strict_step() to check.
class StepFunction {
 public:
  StepFunction() = default;
  StepFunction(std::vector<int> breakpoints, std::vector<double> values);

  // Convenience: constant function on [1, n].
  static StepFunction constant(int n, double value);
  // Convenience: from segment lengths.
  static StepFunction from_lengths(const std::vector<int>& lengths,
                                   const std::vector<double>& values);

  int n() const { return breakpoints_.back() - 1; }
  int segments() const { return static_cast<int>(values_.size()); }

  // Value at 1-based index i.
  double at(int i) const { return values_[static_cast<size_t>(segment_of(i)) - 1]; }
  // 1-based segment number covering index i.
  int segment_of(int i) const;

  // Segment s covers [segment_begin(s), segment_end(s)] inclusive, 1-based.
  int segment_begin(int s) const { return breakpoints_[static_cast<size_t>(s) - 1]; }
  int segment_end(int s) const { return breakpoints_[static_cast<size_t>(s)] - 1; }
  double value(int s) const { return values_[static_cast<size_t>(s) - 1]; }

  // Interior breakpoints b_1..b_{S-1} (starts of segments 2..S).
  std::vector<int> changepoint_indices() const;
  // tau_s = (b_s - 1)/n for interior breakpoints; all in [0, 1).
  std::vector<double> changepoint_taus() const;

  bool is_strict_step() const;

  const std::vector<int>& breakpoints() const { return breakpoints_; }
  const std::vector<double>& segment_values() const { return values_; }

  // Per-index expansion, values_out[i-1] = at(i).
  std::vector<double> expand() const;

 private:
  std::vector<int> breakpoints_;  // size S+1, breakpoints_[0]=1, back()=n+1
  std::vector<double> values_;    // size S
};

// Result of the binary transform W_i = 1{z_i <= f(x_i)} (ties count as 1,
// matching "f - z >= 0").
class BinarySeries {
 public:
  BinarySeries() = default;
  explicit BinarySeries(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {}

  int size() const { return static_cast<int>(bits_.size()); }
  int operator[](int i) const { return bits_[static_cast<size_t>(i) - 1]; }
  const std::vector<std::uint8_t>& bits() const { return bits_; }

 private:
  std::vector<std::uint8_t> bits_;
};

BinarySeries transform(const Series& z, const StepFunction& f);

// Number of maximal constant runs: #{i : w_i != w_{i+1}} + 1. Zero-length
// input has zero runs.
int runs_count(const BinarySeries& w);
int ones_count(const BinarySeries& w);

// Empirical beta-quantile: smallest sample value v with #{z <= v}/len >= beta,
// i.e. the order statistic of rank ceil(len*beta).
double empirical_quantile(std::vector<double> values, double beta);

// ceil/floor with a small absolute guard so that products like len*beta that
// are integers mathematically but carry one-ulp noise land on the integer.
long ceil_guarded(double x);
long floor_guarded(double x);

}  // namespace mqseg

#endif  // MQSEG_SERIES_HPP
