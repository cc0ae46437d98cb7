// Scale-penalized local likelihood-ratio machinery: the penalty, the local
// binomial LLR, its inversion into admissible ones-count ranks, per-interval
// confidence boxes, and a quadratic-time reference evaluator of the
// multiscale statistic.
//
// The chain of equivalences this module implements, for an interval of
// length len inside a constant piece with value theta and bits
// w_i = 1{z_i <= theta}:
//
//     sqrt(2*T) - P <= q
// <=> T <= (q+P)^2 / 2                      (needs q+P >= 0, else no value passes)
// <=> h(mean(w)) <= q_tilde := (q+P)^2/(2*len)
// <=> l(q_tilde) <= mean(w) <= u(q_tilde)   (h is convex with minimum 0 at beta)
// <=> ceil(len*l) <= #ones <= floor(len*u)
// <=> theta in [ z_(m_lo), z_(m_hi+1) )    (order statistics of the interval,
//                                           rank 0 -> -inf, rank len+1 -> +inf)
#ifndef MQSEG_MULTISCALE_HPP
#define MQSEG_MULTISCALE_HPP

#include <limits>
#include <vector>

#include "mqseg/series.hpp"

namespace mqseg {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Scale penalty sqrt(2*log(e*n/len)), evaluated as sqrt(2*(1+log(n/len))) so
// that the full scale (len == n) yields exactly sqrt(2).
double penalty(int len, int n);

// h(x) = x*log(x/beta) + (1-x)*log((1-x)/(1-beta)) with 0*log(0) = 0.
// Convex on [0,1], zero at x = beta.
double llr_rate(double x, double beta);

// Local test statistic T = len * h(w_mean).
double local_llr(double w_mean, int len, double beta);

// Roots of h(x) = q_tilde around beta: l in [0, beta], u in [beta, 1].
// Analytic clamps: q_tilde >= h(0) = log(1/(1-beta)) gives l = 0;
// q_tilde >= h(1) = log(1/beta) gives u = 1. Inside the open range the roots
// come from bisection run to interval collapse (h is monotone on each side).
struct LlrRoots {
  double lower;  // l(q_tilde)
  double upper;  // u(q_tilde)
};
LlrRoots invert_llr(double q_tilde, double beta);

// Admissible ones-count range for an interval of length len at threshold q.
//   m_lo = ceil(len * l),  m_hi = floor(len * u), both in [0, len].
// m_lo == 0 means the box is unbounded below; m_hi == len unbounded above.
// m_lo == m_hi + 1 encodes an empty box. A scale with q + P < 0 admits no
// value at all and is reported via the `usable` flag.
struct BoxRanks {
  int m_lo = 0;
  int m_hi = 0;
  bool usable = true;
  bool empty() const { return !usable || m_lo > m_hi; }
};
BoxRanks box_ranks(int len, int n, double q, double beta);

// Half-open admissible value interval [lower, upper) for one interval of the
// series, from its order statistics at the given ranks.
struct ConfidenceBox {
  double lower = -kInf;
  double upper = kInf;
  int first = 0;  // 1-based interval [first, last] in the source series
  int last = 0;
  BoxRanks ranks;

  bool empty() const { return !(lower < upper); }
};

// Box for the multiset `window` (the data of z[first..last]); sorts a copy.
ConfidenceBox confidence_box(const std::vector<double>& window, const BoxRanks& ranks,
                             int first, int last);

// Reference multiscale statistic: max over all intervals lying inside a
// single segment of f of sqrt(2*T) - P. Quadratic time; used as the
// correctness oracle for the DP and the simulation kernels.
double multiscale_stat(const Series& z, const StepFunction& f, double beta);

// Precomputed per-length data for one (n, q, beta) triple: penalties and
// admissible ranks for every interval length. Shared by the DP and the
// brute-force oracle so both sides test exactly the same geometry.
struct ScaleTable {
  int n = 0;
  double q = 0.0;
  double beta = 0.0;
  std::vector<double> pen;    // pen[len-1] = penalty(len, n)
  std::vector<BoxRanks> ranks;  // ranks[len-1]
};
ScaleTable make_scale_table(int n, double q, double beta);

// Exact acceptance check: every interval inside a segment of f has its
// ones-count within the admissible rank window of its length.  Equivalent to
// multiscale_stat(z, f, beta) <= tab.q but free of floating-point slack, so
// it is usable as a hard audit.
bool passes_all_scales(const Series& z, const StepFunction& f,
                       const ScaleTable& tab);

}  // namespace mqseg

#endif  // MQSEG_MULTISCALE_HPP
