#include "mqseg/theory.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mqseg/multiscale.hpp"

#include <boost/math/distributions/cauchy.hpp>
#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

namespace mqseg {

DistributionSpec DistributionSpec::normal(double mu, double sigma) {
  if (!(sigma > 0.0)) throw std::domain_error("normal: sigma must be > 0");
  DistributionSpec d;
  d.family_ = Family::normal;
  d.a_ = mu;
  d.b_ = sigma;
  return d;
}

DistributionSpec DistributionSpec::student_t(double nu, double scale) {
  if (!(nu > 0.0) || !(scale > 0.0))
    throw std::domain_error("student_t: nu and scale must be > 0");
  DistributionSpec d;
  d.family_ = Family::student_t;
  d.a_ = nu;
  d.b_ = scale;
  return d;
}

DistributionSpec DistributionSpec::cauchy(double loc, double scale) {
  if (!(scale > 0.0)) throw std::domain_error("cauchy: scale must be > 0");
  DistributionSpec d;
  d.family_ = Family::cauchy;
  d.a_ = loc;
  d.b_ = scale;
  return d;
}

DistributionSpec DistributionSpec::chi_square_centered(double nu,
                                                       double scale) {
  if (!(nu > 0.0) || !(scale > 0.0))
    throw std::domain_error("chi_square_centered: nu and scale must be > 0");
  DistributionSpec d;
  d.family_ = Family::chi_sq;
  d.a_ = nu;
  d.b_ = scale;
  d.shift_ = boost::math::quantile(boost::math::chi_squared(nu), 0.5);
  return d;
}

DistributionSpec DistributionSpec::empirical(std::vector<double> samples) {
  if (samples.empty()) throw std::domain_error("empirical: no samples");
  DistributionSpec d;
  d.family_ = Family::empirical;
  d.samples_ = std::move(samples);
  std::sort(d.samples_.begin(), d.samples_.end());
  return d;
}

double DistributionSpec::cdf(double x) const {
  switch (family_) {
    case Family::normal:
      return boost::math::cdf(boost::math::normal(a_, b_), x);
    case Family::student_t:
      return boost::math::cdf(boost::math::students_t(a_), x / b_);
    case Family::cauchy:
      return boost::math::cdf(boost::math::cauchy(a_, b_), x);
    case Family::chi_sq: {
      const double arg = x / b_ + shift_;
      if (arg <= 0.0) return 0.0;  // below the support of the shifted variable
      return boost::math::cdf(boost::math::chi_squared(a_), arg);
    }
    case Family::empirical: {
      auto it = std::upper_bound(samples_.begin(), samples_.end(), x);
      return static_cast<double>(it - samples_.begin()) /
             static_cast<double>(samples_.size());
    }
  }
  return 0.0;
}

double DistributionSpec::quantile(double beta) const {
  if (!(beta > 0.0 && beta < 1.0))
    throw std::domain_error("quantile: beta must lie in (0,1)");
  switch (family_) {
    case Family::normal:
      return boost::math::quantile(boost::math::normal(a_, b_), beta);
    case Family::student_t:
      return b_ * boost::math::quantile(boost::math::students_t(a_), beta);
    case Family::cauchy:
      return boost::math::quantile(boost::math::cauchy(a_, b_), beta);
    case Family::chi_sq:
      return b_ * (boost::math::quantile(boost::math::chi_squared(a_), beta) -
                   shift_);
    case Family::empirical: {
      const int m = static_cast<int>(samples_.size());
      long r = std::clamp(ceil_guarded(m * beta), 1L, static_cast<long>(m));
      return samples_[static_cast<size_t>(r) - 1];
    }
  }
  return 0.0;
}

double quantile_jump(const DistributionSpec& f, double beta, double delta) {
  return std::fabs(f.cdf(f.quantile(beta) + delta) - beta);
}

SignalCharacteristics signal_characteristics(const StepFunction& f,
                                             const DistributionSpec& f_min,
                                             const DistributionSpec& f_max,
                                             double beta) {
  QuantileLevel check(beta);
  SignalCharacteristics out;
  const int n = f.n();
  const int s_count = f.segments();

  double min_len = kInf;
  std::vector<double> seg_len;
  for (int s = 1; s <= s_count; ++s) {
    double len = static_cast<double>(f.segment_end(s) - f.segment_begin(s) + 1) / n;
    seg_len.push_back(len);
    min_len = std::min(min_len, len);
  }
  out.min_segment_len = min_len;

  if (s_count < 2) return out;  // no jumps: min_jump stays absent

  double min_xi = kInf;
  for (int s = 1; s < s_count; ++s) {
    const double delta = f.value(s + 1) - f.value(s);
    const double xi = std::min(quantile_jump(f_min, beta, -delta),
                               quantile_jump(f_max, beta, delta));
    out.jump_delta.push_back(delta);
    out.jump_xi.push_back(xi);
    out.jump_pair_len.push_back(std::min(seg_len[static_cast<size_t>(s) - 1],
                                         seg_len[static_cast<size_t>(s)]));
    min_xi = std::min(min_xi, xi);
  }
  out.min_jump = min_xi;
  return out;
}

double over_bound(double alpha, int s) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::domain_error("over_bound: alpha must lie in (0,1)");
  if (s < 0) throw std::domain_error("over_bound: s must be >= 0");
  return std::pow(alpha, s / 2 + 1);
}

namespace {

double miss_bound(int n, int s_true, double len, double xi, double q) {
  if (s_true <= 1) return 0.0;
  const double root = std::sqrt(n * len);
  const double expo = 2.0 * root * xi *
                      (q / std::sqrt(2.0) + std::sqrt(std::log(2.0 * M_E / len)));
  const double val = 4.0 * (s_true - 1) * std::exp(-n * len * xi * xi) *
                     (std::exp(expo) + 1.0);
  return std::clamp(val, 0.0, 1.0);
}

}  // namespace

double under_bound(int n, int s_true, double lambda, double xi, double q) {
  if (n < 1 || !(lambda > 0.0 && lambda <= 1.0) || xi < 0.0)
    throw std::domain_error("under_bound: bad arguments");
  return miss_bound(n, s_true, lambda, xi, q);
}

double gamma_ns(int n, double lambda_s, double xi_s, double q) {
  if (n < 1 || !(lambda_s > 0.0 && lambda_s <= 1.0) || xi_s < 0.0)
    throw std::domain_error("gamma_ns: bad arguments");
  const double inner = std::sqrt(2.0 * n * lambda_s) * xi_s - q -
                       std::sqrt(2.0 * std::log(2.0 * M_E / lambda_s));
  const double pos = std::max(0.0, inner);
  const double bracket = 1.0 - 2.0 * std::exp(-pos * pos / 2.0) -
                         2.0 * std::exp(-n * lambda_s * xi_s * xi_s);
  const double clamped = std::max(0.0, bracket);
  return clamped * clamped;
}

double location_rate_bound(int n, int s_true, double xi, double q,
                           double eps) {
  if (n < 1 || !(eps > 0.0 && eps <= 1.0) || xi < 0.0)
    throw std::domain_error("location_rate_bound: bad arguments");
  return miss_bound(n, s_true, eps, xi, q);
}

}  // namespace mqseg
