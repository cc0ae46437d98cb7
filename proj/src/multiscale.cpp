#include "mqseg/multiscale.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mqseg {

double penalty(int len, int n) {
  if (len < 1 || len > n)
    throw std::domain_error("penalty: interval length out of range");
  return std::sqrt(2.0 * (1.0 + std::log(static_cast<double>(n) / len)));
}

double llr_rate(double x, double beta) {
  double t = 0.0;
  if (x > 0.0) t += x * std::log(x / beta);
  if (x < 1.0) t += (1.0 - x) * std::log((1.0 - x) / (1.0 - beta));
  return t;
}

double local_llr(double w_mean, int len, double beta) {
  return static_cast<double>(len) * llr_rate(w_mean, beta);
}

namespace {

// Bisection for the root of h(x) = target on [a, b] where h is monotone.
// Runs to interval collapse (or the 200-iteration cap, whichever first);
// residuals easily clear the 1e-10 acceptance bar that way even where h is
// flat near beta.
double bisect_root(double a, double b, double target, double beta, bool increasing) {
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (a + b);
    if (mid <= a || mid >= b) break;  // interval collapsed to adjacent doubles
    const double v = llr_rate(mid, beta);
    const bool below = increasing ? (v < target) : (v > target);
    if (below)
      a = mid;
    else
      b = mid;
  }
  return 0.5 * (a + b);
}

}  // namespace

LlrRoots invert_llr(double q_tilde, double beta) {
  if (q_tilde < 0.0) throw std::domain_error("invert_llr: negative threshold");
  if (!(beta > 0.0 && beta < 1.0)) throw std::domain_error("invert_llr: beta outside (0,1)");

  const double h0 = -std::log1p(-beta);  // h(0) = log(1/(1-beta))
  const double h1 = -std::log(beta);     // h(1) = log(1/beta)

  LlrRoots r;
  if (q_tilde >= h0)
    r.lower = 0.0;
  else
    // h decreases from h(0) to 0 on [0, beta]
    r.lower = bisect_root(0.0, beta, q_tilde, beta, /*increasing=*/false);

  if (q_tilde >= h1)
    r.upper = 1.0;
  else
    r.upper = bisect_root(beta, 1.0, q_tilde, beta, /*increasing=*/true);
  return r;
}

BoxRanks box_ranks(int len, int n, double q, double beta) {
  BoxRanks out;
  const double p = penalty(len, n);
  if (q + p < 0.0) {
    // sqrt(2T) >= 0 > q + P: the test rejects every value on this scale.
    out.usable = false;
    out.m_lo = 1;
    out.m_hi = 0;
    return out;
  }
  const double qp = q + p;
  const double q_tilde = qp * qp / (2.0 * static_cast<double>(len));
  const LlrRoots roots = invert_llr(q_tilde, beta);
  out.m_lo = static_cast<int>(std::clamp(ceil_guarded(len * roots.lower), 0L,
                                         static_cast<long>(len)));
  out.m_hi = static_cast<int>(std::clamp(floor_guarded(len * roots.upper), 0L,
                                         static_cast<long>(len)));
  return out;
}

ConfidenceBox confidence_box(const std::vector<double>& window, const BoxRanks& ranks,
                             int first, int last) {
  const int len = static_cast<int>(window.size());
  if (len != last - first + 1)
    throw std::invalid_argument("confidence_box: window size does not match [first,last]");
  ConfidenceBox box;
  box.first = first;
  box.last = last;
  box.ranks = ranks;
  if (ranks.empty()) {
    box.lower = kInf;
    box.upper = -kInf;
    return box;
  }
  std::vector<double> sorted(window);
  std::sort(sorted.begin(), sorted.end());
  box.lower = (ranks.m_lo >= 1) ? sorted[static_cast<size_t>(ranks.m_lo) - 1] : -kInf;
  box.upper = (ranks.m_hi >= len) ? kInf : sorted[static_cast<size_t>(ranks.m_hi)];
  return box;
}

double multiscale_stat(const Series& z, const StepFunction& f, double beta) {
  if (z.size() != f.n())
    throw std::invalid_argument("multiscale_stat: series/function length mismatch");
  const int n = z.size();
  const BinarySeries w = transform(z, f);
  // Prefix ones counts, pre[i] = #ones among w_1..w_i.
  std::vector<int> pre(static_cast<size_t>(n) + 1, 0);
  for (int i = 1; i <= n; ++i) pre[static_cast<size_t>(i)] = pre[static_cast<size_t>(i) - 1] + w[i];

  double best = -kInf;
  for (int s = 1; s <= f.segments(); ++s) {
    const int lo = f.segment_begin(s), hi = f.segment_end(s);
    for (int i = lo; i <= hi; ++i) {
      for (int j = i; j <= hi; ++j) {
        const int len = j - i + 1;
        const int k = pre[static_cast<size_t>(j)] - pre[static_cast<size_t>(i) - 1];
        const double t = local_llr(static_cast<double>(k) / len, len, beta);
        best = std::max(best, std::sqrt(2.0 * t) - penalty(len, n));
      }
    }
  }
  return best;
}

bool passes_all_scales(const Series& z, const StepFunction& f,
                       const ScaleTable& tab) {
  if (z.size() != f.n() || z.size() != tab.n)
    throw std::invalid_argument("passes_all_scales: length mismatch");
  const int n = z.size();
  const BinarySeries w = transform(z, f);
  std::vector<int> pre(static_cast<size_t>(n) + 1, 0);
  for (int i = 1; i <= n; ++i)
    pre[static_cast<size_t>(i)] = pre[static_cast<size_t>(i) - 1] + w[i];

  for (int s = 1; s <= f.segments(); ++s) {
    const int lo = f.segment_begin(s), hi = f.segment_end(s);
    for (int i = lo; i <= hi; ++i) {
      for (int j = i; j <= hi; ++j) {
        const int len = j - i + 1;
        const BoxRanks& rk = tab.ranks[static_cast<size_t>(len) - 1];
        if (rk.empty()) return false;
        const int k = pre[static_cast<size_t>(j)] - pre[static_cast<size_t>(i) - 1];
        if (k < rk.m_lo || k > rk.m_hi) return false;
      }
    }
  }
  return true;
}

ScaleTable make_scale_table(int n, double q, double beta) {
  ScaleTable t;
  t.n = n;
  t.q = q;
  t.beta = beta;
  t.pen.resize(static_cast<size_t>(n));
  t.ranks.resize(static_cast<size_t>(n));
  for (int len = 1; len <= n; ++len) {
    t.pen[static_cast<size_t>(len) - 1] = penalty(len, n);
    t.ranks[static_cast<size_t>(len) - 1] = box_ranks(len, n, q, beta);
  }
  return t;
}

}  // namespace mqseg
