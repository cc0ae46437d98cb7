// Finite-sample bound calculators: quantile jump function, signal
// characteristics (minimal segment length / minimal jump), and the
// over/under-estimation and location-rate probability bounds.  These are
// diagnostics; the fitting path never depends on them.
#ifndef MQSEG_THEORY_HPP_
#define MQSEG_THEORY_HPP_

#include <optional>
#include <vector>

#include "mqseg/series.hpp"

namespace mqseg {

// A cdf we can evaluate anywhere, plus its generalized inverse
// inf{theta : F(theta) >= beta}.  The empirical variant is the
// right-continuous step cdf of the samples.
class DistributionSpec {
 public:
  static DistributionSpec normal(double mu, double sigma);
  static DistributionSpec student_t(double nu, double scale);
  static DistributionSpec cauchy(double loc, double scale);
  // (chi2_nu - median(chi2_nu)) * scale
  static DistributionSpec chi_square_centered(double nu, double scale);
  static DistributionSpec empirical(std::vector<double> samples);

  double cdf(double x) const;
  double quantile(double beta) const;

 private:
  DistributionSpec() = default;
  enum class Family { normal, student_t, cauchy, chi_sq, empirical };
  Family family_ = Family::normal;
  double a_ = 0.0, b_ = 1.0;  // location/df and scale, per family
  double shift_ = 0.0;        // chi_sq: median subtracted before scaling
  std::vector<double> samples_;
};

// |F(theta_beta + delta) - beta|: how much probability mass a quantile shift
// of delta moves.
double quantile_jump(const DistributionSpec& f, double beta, double delta);

struct SignalCharacteristics {
  double min_segment_len = 1.0;          // in tau units, (0, 1]
  std::optional<double> min_jump;        // absent when there is no jump
  std::vector<double> jump_delta;        // value jump at each changepoint
  std::vector<double> jump_xi;           // per-jump minimal mass displacement
  std::vector<double> jump_pair_len;     // min adjacent segment length, tau units
};

SignalCharacteristics signal_characteristics(const StepFunction& f,
                                             const DistributionSpec& f_min,
                                             const DistributionSpec& f_max,
                                             double beta);

// P(too many segments) <= alpha^(floor(s/2) + 1) for an overshoot of s.
double over_bound(double alpha, int s);

// P(too few segments) bound; reported clamped to [0, 1] (a clamped value
// carries no information).
double under_bound(int n, int s_true, double lambda, double xi, double q);

// Per-jump detection probability lower bound, in [0, 1].
double gamma_ns(int n, double lambda_s, double xi_s, double q);

// Same shape as under_bound with the localization radius eps in place of the
// minimal segment length.
double location_rate_bound(int n, int s_true, double xi, double q, double eps);

}  // namespace mqseg

#endif  // MQSEG_THEORY_HPP_
