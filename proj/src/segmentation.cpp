#include "mqseg/segmentation.hpp"

#include <algorithm>
#include <bit>
#include <climits>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <vector>

#include "mqseg/double_heap.hpp"

namespace mqseg {

namespace {

// Half-open value interval [lo, hi).
struct ValueBox {
  double lo = -kInf;
  double hi = kInf;
};

constexpr ValueBox kAllReals{-kInf, kInf};
constexpr ValueBox kEmptyBox{kInf, -kInf};

bool nonempty(const ValueBox& b) { return b.lo < b.hi; }

ValueBox meet(const ValueBox& a, const ValueBox& b) {
  return {std::max(a.lo, b.lo), std::min(a.hi, b.hi)};
}

// Smallest interval containing both; empty boxes act as identity.
ValueBox box_hull(const ValueBox& a, const ValueBox& b) {
  if (!nonempty(a)) return b;
  if (!nonempty(b)) return a;
  return {std::min(a.lo, b.lo), std::max(a.hi, b.hi)};
}

// ---------------------------------------------------------------------------
// Order-statistic index over the current window.
//
// Fenwick trees over the rank-compressed values of the whole series: counts
// and sums for the window itself, plus counts over min/max of adjacent pairs
// (i, i+1).  The pair trees give the number of sign changes of the bit vector
// 1{z_t <= theta} inside the window for arbitrary theta:
//   boundary at t  <=>  min(z_t, z_{t+1}) <= theta < max(z_t, z_{t+1}),
// so #boundaries = #(min <= theta) - #(max <= theta), and runs = boundaries+1.
// Inserts are journaled so a window can be torn down in O(inserted * log).
// ---------------------------------------------------------------------------
class WindowIndex {
 public:
  explicit WindowIndex(const std::vector<double>& values) : uniq_(values) {
    std::sort(uniq_.begin(), uniq_.end());
    uniq_.erase(std::unique(uniq_.begin(), uniq_.end()), uniq_.end());
    m_ = static_cast<int>(uniq_.size());
    highbit_ = static_cast<int>(std::bit_floor(static_cast<unsigned>(m_)));
    cnt_.assign(m_ + 1, 0);
    sum_.assign(m_ + 1, 0.0);
    pmin_.assign(m_ + 1, 0);
    pmax_.assign(m_ + 1, 0);
  }

  void reset() {
    for (int r : vtouch_) {
      add(cnt_, r, -1);
      addd(sum_, r, -uniq_[r - 1]);
    }
    for (int r : mintouch_) add(pmin_, r, -1);
    for (int r : maxtouch_) add(pmax_, r, -1);
    vtouch_.clear();
    mintouch_.clear();
    maxtouch_.clear();
    wsize_ = 0;
  }

  void insert_value(double v) {
    int r = rank_exact(v);
    add(cnt_, r, 1);
    addd(sum_, r, v);
    vtouch_.push_back(r);
    ++wsize_;
  }

  void insert_pair(double mn, double mx) {
    int rmn = rank_exact(mn), rmx = rank_exact(mx);
    add(pmin_, rmn, 1);
    add(pmax_, rmx, 1);
    mintouch_.push_back(rmn);
    maxtouch_.push_back(rmx);
  }

  int size() const { return wsize_; }

  int count_lt(double x) const { return prefix(cnt_, rank_lt(x)); }
  int count_le(double x) const { return prefix(cnt_, rank_le(x)); }
  double sum_lt(double x) const { return prefixd(sum_, rank_lt(x)); }
  int pairs_min_le(double x) const { return prefix(pmin_, rank_le(x)); }
  int pairs_max_le(double x) const { return prefix(pmax_, rank_le(x)); }

  // r-th smallest window value, 1 <= r <= size().
  double select(int r) const {
    int pos = 0, rem = r;
    for (int pw = highbit_; pw > 0; pw >>= 1) {
      int np = pos + pw;
      if (np <= m_ && cnt_[np] < rem) {
        pos = np;
        rem -= cnt_[np];
      }
    }
    return uniq_[pos];
  }

 private:
  int rank_exact(double v) const {
    return static_cast<int>(std::lower_bound(uniq_.begin(), uniq_.end(), v) -
                            uniq_.begin()) +
           1;
  }
  int rank_lt(double x) const {
    return static_cast<int>(std::lower_bound(uniq_.begin(), uniq_.end(), x) -
                            uniq_.begin());
  }
  int rank_le(double x) const {
    return static_cast<int>(std::upper_bound(uniq_.begin(), uniq_.end(), x) -
                            uniq_.begin());
  }

  static void add(std::vector<int>& t, int i, int d) {
    for (; i < static_cast<int>(t.size()); i += i & (-i)) t[i] += d;
  }
  static void addd(std::vector<double>& t, int i, double d) {
    for (; i < static_cast<int>(t.size()); i += i & (-i)) t[i] += d;
  }
  static int prefix(const std::vector<int>& t, int i) {
    int s = 0;
    for (; i > 0; i -= i & (-i)) s += t[i];
    return s;
  }
  static double prefixd(const std::vector<double>& t, int i) {
    double s = 0.0;
    for (; i > 0; i -= i & (-i)) s += t[i];
    return s;
  }

  std::vector<double> uniq_;
  int m_ = 0, highbit_ = 0, wsize_ = 0;
  std::vector<int> cnt_, pmin_, pmax_;
  std::vector<double> sum_;
  std::vector<int> vtouch_, mintouch_, maxtouch_;
};

// ---------------------------------------------------------------------------
// Per-length sliding boxes.
//
// For the interval [i, j] of length len the admissible value box is
// [z_(m_lo), z_(m_hi+1)) over the window's order statistics.  Each length
// keeps (at most) two double heaps pivoted at those ranks; advancing the
// window end by one is a tagged replace, anything else is a rebuild.  Heaps
// are created lazily, so sparse scans stay cheap in memory.
// ---------------------------------------------------------------------------
class BoxBank {
 public:
  BoxBank(const Series& z, const ScaleTable& tab)
      : z_(z), tab_(tab), entries_(static_cast<size_t>(tab.n) + 1) {}

  ValueBox interval_box(int i, int j) {
    const int len = j - i + 1;
    const BoxRanks& rk = tab_.ranks[static_cast<size_t>(len) - 1];
    if (rk.empty()) return kEmptyBox;
    const bool need_lo = rk.m_lo >= 1;
    const bool need_hi = rk.m_hi < len;
    if (!need_lo && !need_hi) return kAllReals;

    Entry& e = entries_[static_cast<size_t>(len)];
    if (e.last_end == j - 1 && e.built) {
      if (e.lo) e.lo->replace_tagged(i - 1, z_[j], j);
      if (e.hi) e.hi->replace_tagged(i - 1, z_[j], j);
      e.last_end = j;
    } else if (e.last_end != j || !e.built) {
      scratch_.clear();
      for (int t = i; t <= j; ++t) scratch_.push_back(z_[t]);
      e.lo = need_lo ? std::make_unique<DoubleHeap>(rk.m_lo, scratch_, i)
                     : nullptr;
      e.hi = need_hi ? std::make_unique<DoubleHeap>(rk.m_hi + 1, scratch_, i)
                     : nullptr;
      e.built = true;
      e.last_end = j;
    }
    return {need_lo ? e.lo->root() : -kInf, need_hi ? e.hi->root() : kInf};
  }

 private:
  struct Entry {
    std::unique_ptr<DoubleHeap> lo, hi;
    int last_end = -1;
    bool built = false;
  };

  const Series& z_;
  const ScaleTable& tab_;
  std::vector<Entry> entries_;
  std::vector<double> scratch_;
};

// Running intersections A(a, i) (rows) and A(s, b) (columns) over [a, b],
// where A(i, j) is the meet of the boxes of every subinterval of [i, j].
struct RunningInter {
  int a = 1, b = 0;
  std::vector<ValueBox> row;  // row[i - a] = A(a, i)
  std::vector<ValueBox> col;  // col[s - a] = A(s, b)

  ValueBox row_at(int i) const {
    if (i < a) return kAllReals;
    return row[static_cast<size_t>(i - a)];
  }
  ValueBox col_at(int s) const {
    if (s > b) return kAllReals;
    return col[static_cast<size_t>(s - a)];
  }
};

RunningInter running_intersections(const Series& z, const ScaleTable& tab,
                                   int a, int b) {
  RunningInter out;
  out.a = a;
  out.b = b;
  if (b < a) return out;
  const int span = b - a + 1;
  out.row.resize(static_cast<size_t>(span));
  BoxBank bank(z, tab);
  std::vector<ValueBox> acc(static_cast<size_t>(span));  // acc[i-a] = A(i, e)
  for (int e = a; e <= b; ++e) {
    ValueBox bend = kAllReals;
    for (int i = e; i >= a; --i) {
      bend = meet(bend, bank.interval_box(i, e));
      ValueBox prev = (i == e) ? kAllReals : acc[static_cast<size_t>(i - a)];
      acc[static_cast<size_t>(i - a)] = meet(prev, bend);
    }
    out.row[static_cast<size_t>(e - a)] = acc[0];
  }
  out.col = std::move(acc);
  return out;
}

// ---------------------------------------------------------------------------
// Segment value rule, shared verbatim by DP and oracle.
//
// Take the empirical beta-quantile of the window and clamp it into the box.
// A clamp against the open upper edge lands on the largest window value
// strictly below it (the box edges are themselves window order statistics, so
// such a value exists whenever the lower edge is finite); if the whole window
// sits at or above the edge, fall back to one representable step below it.
// ---------------------------------------------------------------------------
int quantile_rank(int len, double beta) {
  long r = ceil_guarded(static_cast<double>(len) * beta);
  return static_cast<int>(std::clamp(r, 1L, static_cast<long>(len)));
}

double clamped_quantile_win(const WindowIndex& win, int len, double beta,
                            const ValueBox& box) {
  double qv = win.select(quantile_rank(len, beta));
  if (qv < box.lo) return box.lo;
  if (qv >= box.hi) {
    int c = win.count_lt(box.hi);
    if (c >= 1) return win.select(c);
    return std::nextafter(box.hi, -kInf);
  }
  return qv;
}

double clamped_quantile_sorted(const std::vector<double>& sorted, double beta,
                               const ValueBox& box) {
  double qv = sorted[static_cast<size_t>(
      quantile_rank(static_cast<int>(sorted.size()), beta) - 1)];
  if (qv < box.lo) return box.lo;
  if (qv >= box.hi) {
    auto it = std::lower_bound(sorted.begin(), sorted.end(), box.hi);
    if (it != sorted.begin()) return *std::prev(it);
    return std::nextafter(box.hi, -kInf);
  }
  return qv;
}

// Check loss of one segment, accumulated left to right.  The DP and the
// oracle both build their totals from this exact sequence of additions, so
// equal configurations produce bit-equal costs.
double seg_koenker_direct(const Series& z, int s, int j, double theta,
                          double beta) {
  double acc = 0.0;
  for (int t = s; t <= j; ++t) {
    double u = z[t] - theta;
    acc += u * (beta - (u < 0.0 ? 1.0 : 0.0));
  }
  return acc;
}

double fallback_cost(const Series& z, const StepFunction& f, double beta,
                     CostRule rule, RunsMean conv) {
  if (rule == CostRule::koenker) return koenker_cost(z, f, beta);
  BinarySeries w = transform(z, f);
  return runs_log_density(runs_count(w), ones_count(w), z.size(), beta, conv);
}

struct Candidate {
  bool set = false;
  double score = 0.0;
  int s = 0;
  double theta = 0.0;
  int ones = 0, runs = 0;
};

void compute_bands(const Series& z, const ScaleTable& tab,
                   const std::vector<int>& R, const std::vector<int>& L,
                   const std::vector<double>& alo_final,
                   const std::vector<double>& ahi_final,
                   SegmentationResult* res) {
  const int n = z.size();
  const int K = static_cast<int>(R.size());
  res->band.assign(static_cast<size_t>(n), BandPoint{kInf, -kInf});
  auto widen = [&](int t, const ValueBox& b) {
    if (!nonempty(b)) return;
    BandPoint& p = res->band[static_cast<size_t>(t) - 1];
    p.lower = std::min(p.lower, b.lo);
    p.upper = std::max(p.upper, b.hi);
  };

  if (K == 0) {
    ValueBox g{alo_final[1], ahi_final[1]};
    for (int t = 1; t <= n; ++t) widen(t, g);
    return;
  }

  for (int k = 1; k <= K; ++k) {
    const int a1 = (k == 1) ? 1 : R[static_cast<size_t>(k) - 2] + 1;
    const int b1 = R[static_cast<size_t>(k) - 1] - 1;
    const int lo = L[static_cast<size_t>(k) - 1];
    const int hi = R[static_cast<size_t>(k) - 1];
    const int a2 = lo;
    const int b2 = (k < K) ? L[static_cast<size_t>(k)] - 1 : n;
    RunningInter s1 = running_intersections(z, tab, a1, b1);
    RunningInter s2 = running_intersections(z, tab, a2, b2);

    // Constant stretch in front of this interval.
    const int core_end = lo - 1;
    if (core_end >= a1) {
      ValueBox core = s1.row_at(core_end);
      for (int t = a1; t <= core_end; ++t) widen(t, core);
    }

    // Inside [lo, hi] the breakpoint location p is uncertain.  An index t is
    // left of p for p > t (value confined to the left-segment box) and right
    // of p otherwise, so its band is the hull over admissible placements.
    const int span = hi - lo + 1;
    std::vector<ValueBox> leftb(static_cast<size_t>(span)),
        rightb(static_cast<size_t>(span));
    std::vector<bool> adm(static_cast<size_t>(span));
    for (int p = lo; p <= hi; ++p) {
      ValueBox lb = (p - 1 < a1) ? kAllReals : s1.row_at(p - 1);
      ValueBox rb = (p > b2) ? kAllReals : s2.col_at(p);
      leftb[static_cast<size_t>(p - lo)] = lb;
      rightb[static_cast<size_t>(p - lo)] = rb;
      adm[static_cast<size_t>(p - lo)] = nonempty(lb) && nonempty(rb);
    }
    std::vector<ValueBox> suf(static_cast<size_t>(span) + 1, kEmptyBox);
    for (int p = hi; p >= lo; --p) {
      size_t idx = static_cast<size_t>(p - lo);
      suf[idx] = adm[idx] ? box_hull(suf[idx + 1], leftb[idx]) : suf[idx + 1];
    }
    ValueBox pre = kEmptyBox;
    for (int t = lo; t <= hi; ++t) {
      size_t idx = static_cast<size_t>(t - lo);
      if (adm[idx]) pre = box_hull(pre, rightb[idx]);
      widen(t, box_hull(suf[idx + 1], pre));
    }

    // Trailing constant stretch after the last interval.
    if (k == K) {
      const int tail_start = hi + 1;
      if (tail_start <= n) {
        ValueBox core = s2.col_at(tail_start);
        for (int t = tail_start; t <= n; ++t) widen(t, core);
      }
    }
  }
}

}  // namespace

SegmentationResult fit(const Series& z, const SegmentationConfig& cfg) {
  if (z.empty()) throw std::domain_error("fit: empty series");
  QuantileLevel beta_check(cfg.beta);
  const int n = z.size();
  const double beta = cfg.beta;
  const double q = cfg.q;

  SegmentationResult res;
  res.q_used = q;
  res.beta = beta;
  res.cost_rule = cfg.cost;

  ScaleTable tab = make_scale_table(n, q, beta);
  const double gq = empirical_quantile(z.values(), beta);

  if (q + tab.pen[static_cast<size_t>(n) - 1] <= 0.0) {
    // Even the full interval's statistic cannot come in under q.
    res.status = FitStatus::degenerate_threshold;
    res.s_hat = 1;
    res.fit = StepFunction::constant(n, gq);
    res.cost = fallback_cost(z, res.fit, beta, cfg.cost, cfg.runs_mean);
    return res;
  }
  if (tab.ranks[0].empty()) {
    // Single-point boxes are empty, so no step function passes at all.
    res.status = FitStatus::infeasible;
    res.s_hat = 0;
    res.fit = StepFunction::constant(n, gq);
    res.cost = fallback_cost(z, res.fit, beta, cfg.cost, cfg.runs_mean);
    return res;
  }

  const bool use_koenker = (cfg.cost == CostRule::koenker);
  const std::vector<double>& zv = z.values();
  std::vector<double> pre(static_cast<size_t>(n) + 1, 0.0);
  for (int j = 1; j <= n; ++j)
    pre[static_cast<size_t>(j)] =
        pre[static_cast<size_t>(j) - 1] + zv[static_cast<size_t>(j) - 1];

  WindowIndex win(zv);
  BoxBank bank(z, tab);

  std::vector<double> alo(static_cast<size_t>(n) + 1),
      ahi(static_cast<size_t>(n) + 1);
  std::vector<int> m(static_cast<size_t>(n) + 1, 0);
  std::vector<int> prev_idx(static_cast<size_t>(n) + 1, 0);
  std::vector<double> cost(static_cast<size_t>(n) + 1, 0.0);
  std::vector<double> segval(static_cast<size_t>(n) + 1, 0.0);
  std::vector<int> ones_p, runs_p;
  std::vector<signed char> last_p;
  if (!use_koenker) {
    ones_p.assign(static_cast<size_t>(n) + 1, 0);
    runs_p.assign(static_cast<size_t>(n) + 1, 0);
    last_p.assign(static_cast<size_t>(n) + 1, 0);
  }

  // rvec[c] = last prefix length whose minimal segment count is c.
  std::vector<int> rvec{0};
  auto rv = [&rvec](int c) -> int {
    return c < 0 ? -1 : rvec[static_cast<size_t>(c)];
  };
  std::vector<int> r_list, l_list;  // per changepoint: latest / earliest index

  for (int j = 1; j <= n; ++j) {
    const int c_prev = m[static_cast<size_t>(j) - 1];
    int same_lo = 1, same_hi = 0;
    if (c_prev >= 1) {
      same_lo = rv(c_prev - 2) + 2;
      same_hi = rv(c_prev - 1) + 1;
    }
    const int up_lo = rv(c_prev - 1) + 2;
    const int floor_i = (c_prev >= 1) ? same_lo : up_lo;

    win.reset();
    ValueBox bend = kAllReals;
    Candidate best_same, best_up;
    int ibreak = 0;

    for (int i = j; i >= floor_i; --i) {
      win.insert_value(zv[static_cast<size_t>(i) - 1]);
      if (i < j) {
        double a = zv[static_cast<size_t>(i) - 1],
               b = zv[static_cast<size_t>(i)];
        win.insert_pair(std::min(a, b), std::max(a, b));
      }
      bend = meet(bend, bank.interval_box(i, j));
      if (i == j) {
        alo[static_cast<size_t>(i)] = -kInf;
        ahi[static_cast<size_t>(i)] = kInf;
      }
      alo[static_cast<size_t>(i)] = std::max(alo[static_cast<size_t>(i)], bend.lo);
      ahi[static_cast<size_t>(i)] = std::min(ahi[static_cast<size_t>(i)], bend.hi);
      if (!(alo[static_cast<size_t>(i)] < ahi[static_cast<size_t>(i)])) {
        ibreak = i;
        break;
      }

      const bool in_same = (i >= same_lo && i <= same_hi);
      const bool in_up = (i >= up_lo);
      if (!in_same && !in_up) continue;

      const ValueBox abox{alo[static_cast<size_t>(i)],
                          ahi[static_cast<size_t>(i)]};
      const int len = j - i + 1;
      Candidate cand;
      cand.set = true;
      cand.s = i;
      cand.theta = clamped_quantile_win(win, len, beta, abox);
      if (use_koenker) {
        const double th = cand.theta;
        const double c_lt = win.count_lt(th);
        const double s_lt = win.sum_lt(th);
        const double stot = pre[static_cast<size_t>(j)] -
                            pre[static_cast<size_t>(i) - 1];
        const double segc = (1.0 - beta) * (c_lt * th - s_lt) +
                            beta * ((stot - s_lt) - (len - c_lt) * th);
        cand.score = cost[static_cast<size_t>(i) - 1] + segc;
      } else {
        const double th = cand.theta;
        int ones = win.count_le(th);
        int rseg = 1 + win.pairs_min_le(th) - win.pairs_max_le(th);
        int firstb = (zv[static_cast<size_t>(i) - 1] <= th) ? 1 : 0;
        if (i == 1) {
          cand.ones = ones;
          cand.runs = rseg;
        } else {
          cand.ones = ones_p[static_cast<size_t>(i) - 1] + ones;
          cand.runs = runs_p[static_cast<size_t>(i) - 1] + rseg -
                      (last_p[static_cast<size_t>(i) - 1] == firstb ? 1 : 0);
        }
        cand.score = runs_log_density(cand.runs, cand.ones, j, beta,
                                      cfg.runs_mean);
      }

      Candidate& slot = in_same ? best_same : best_up;
      const bool take =
          !slot.set || (use_koenker ? cand.score <= slot.score
                                    : cand.score >= slot.score);
      if (take) slot = cand;
    }

    const Candidate* chosen;
    if (best_same.set) {
      m[static_cast<size_t>(j)] = c_prev;
      chosen = &best_same;
    } else {
      m[static_cast<size_t>(j)] = c_prev + 1;
      if (c_prev >= 1) {
        rvec.push_back(j - 1);
        r_list.push_back(j);
        l_list.push_back(ibreak + 1);
      }
      chosen = &best_up;
    }

    prev_idx[static_cast<size_t>(j)] = chosen->s - 1;
    segval[static_cast<size_t>(j)] = chosen->theta;
    if (use_koenker) {
      cost[static_cast<size_t>(j)] =
          cost[static_cast<size_t>(chosen->s) - 1] +
          seg_koenker_direct(z, chosen->s, j, chosen->theta, beta);
    } else {
      cost[static_cast<size_t>(j)] = chosen->score;
      ones_p[static_cast<size_t>(j)] = chosen->ones;
      runs_p[static_cast<size_t>(j)] = chosen->runs;
      last_p[static_cast<size_t>(j)] =
          (zv[static_cast<size_t>(j) - 1] <= chosen->theta) ? 1 : 0;
    }
  }

  const int s_hat = m[static_cast<size_t>(n)];
  std::vector<int> starts;
  std::vector<double> vals;
  for (int j = n; j > 0; j = prev_idx[static_cast<size_t>(j)]) {
    starts.push_back(prev_idx[static_cast<size_t>(j)] + 1);
    vals.push_back(segval[static_cast<size_t>(j)]);
  }
  std::reverse(starts.begin(), starts.end());
  std::reverse(vals.begin(), vals.end());
  std::vector<int> bps = starts;
  bps.push_back(n + 1);

  res.status = FitStatus::ok;
  res.s_hat = s_hat;
  res.fit = StepFunction(bps, vals);
  res.cost = cost[static_cast<size_t>(n)];

  for (int k = 1; k < s_hat; ++k) {
    ChangepointInterval ci;
    ci.index = starts[static_cast<size_t>(k)];
    ci.left = l_list[static_cast<size_t>(k) - 1];
    ci.right = r_list[static_cast<size_t>(k) - 1];
    ci.tau = static_cast<double>(ci.index - 1) / n;
    ci.tau_left = static_cast<double>(ci.left - 1) / n;
    ci.tau_right = static_cast<double>(ci.right - 1) / n;
    res.cp_intervals.push_back(ci);
  }

  if (cfg.with_bands)
    compute_bands(z, tab, r_list, l_list, alo, ahi, &res);

  return res;
}

double koenker_cost(const Series& z, const StepFunction& f, double beta) {
  if (f.n() != z.size())
    throw std::invalid_argument("koenker_cost: length mismatch");
  double acc = 0.0;
  for (int s = 1; s <= f.segments(); ++s) {
    const double v = f.value(s);
    for (int t = f.segment_begin(s); t <= f.segment_end(s); ++t) {
      double u = z[t] - v;
      acc += u * (beta - (u < 0.0 ? 1.0 : 0.0));
    }
  }
  return acc;
}

std::pair<double, double> segment_value_range(const Series& z,
                                              const ScaleTable& tab,
                                              int first, int last) {
  if (first < 1 || last > z.size() || first > last)
    throw std::domain_error("segment_value_range: bad interval");
  RunningInter ri = running_intersections(z, tab, first, last);
  ValueBox b = ri.col_at(first);  // A(first, last)
  return {b.lo, b.hi};
}

double clamped_segment_value(const Series& z, int first, int last, double beta,
                             double lo, double hi) {
  std::vector<double> sorted;
  for (int t = first; t <= last; ++t) sorted.push_back(z[t]);
  std::sort(sorted.begin(), sorted.end());
  return clamped_quantile_sorted(sorted, beta, ValueBox{lo, hi});
}

double runs_log_density(int r, int k, int n, double beta, RunsMean convention) {
  if (n < 1 || k < 0 || k > n)
    throw std::domain_error("runs_log_density: bad (k, n)");
  const double logp_config = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) -
                             std::lgamma(n - k + 1.0) + k * std::log(beta) +
                             (n - k) * std::log1p(-beta);
  const double prod = 2.0 * static_cast<double>(k) * (n - k);
  const double sig2 =
      (n >= 2) ? prod * (prod - n) / (static_cast<double>(n) * n * (n - 1))
               : 0.0;
  if (!(sig2 > 0.0))
    return r == 1 ? logp_config : -kInf;
  const double mu =
      (convention == RunsMean::classical) ? 1.0 + prod / n : prod / n - 1.0;
  const double d = r - mu;
  return logp_config - 0.5 * std::log(2.0 * M_PI * sig2) -
         d * d / (2.0 * sig2);
}

BruteForceResult brute_force_fit(const Series& z, double beta, double q) {
  const int n = z.size();
  if (n < 1) throw std::domain_error("brute_force_fit: empty series");
  if (n > 20)
    throw std::domain_error("brute_force_fit: n > 20 is not enumerable");
  QuantileLevel beta_check(beta);
  ScaleTable tab = make_scale_table(n, q, beta);

  // Full intersection table: every subinterval's box, met bottom-up.
  std::vector<std::vector<ValueBox>> A(
      static_cast<size_t>(n) + 2,
      std::vector<ValueBox>(static_cast<size_t>(n) + 1, kAllReals));
  std::vector<double> window;
  for (int len = 1; len <= n; ++len) {
    for (int i = 1; i + len - 1 <= n; ++i) {
      const int j = i + len - 1;
      window.clear();
      for (int t = i; t <= j; ++t) window.push_back(z[t]);
      ConfidenceBox cb =
          confidence_box(window, tab.ranks[static_cast<size_t>(len) - 1], i, j);
      ValueBox b{cb.lower, cb.upper};
      if (len > 1) {
        b = meet(b, A[static_cast<size_t>(i) + 1][static_cast<size_t>(j)]);
        b = meet(b, A[static_cast<size_t>(i)][static_cast<size_t>(j) - 1]);
      }
      A[static_cast<size_t>(i)][static_cast<size_t>(j)] = b;
    }
  }
  auto feasible = [&](int i, int j) {
    return nonempty(A[static_cast<size_t>(i)][static_cast<size_t>(j)]);
  };

  BruteForceResult out;
  int best = INT_MAX;
  const std::uint32_t masks = 1u << (n - 1);
  for (std::uint32_t mask = 0; mask < masks; ++mask) {
    const int count = std::popcount(mask) + 1;
    if (count > best) continue;
    bool ok = true;
    int start = 1;
    std::vector<int> bks;
    for (int t = 1; t < n && ok; ++t) {
      if (mask & (1u << (t - 1))) {
        ok = feasible(start, t);
        bks.push_back(t + 1);
        start = t + 1;
      }
    }
    if (ok) ok = feasible(start, n);
    if (!ok) continue;
    if (count < best) {
      best = count;
      out.minimal_breakpoint_sets.clear();
    }
    out.minimal_breakpoint_sets.push_back(std::move(bks));
  }

  if (best == INT_MAX) {
    out.s_hat = 0;
    return out;
  }
  out.s_hat = best;

  double best_cost = kInf;
  std::vector<double> sorted;
  for (const auto& bks : out.minimal_breakpoint_sets) {
    double acc = 0.0;
    int start = 1;
    auto run_segment = [&](int i, int j) {
      sorted.clear();
      for (int t = i; t <= j; ++t) sorted.push_back(z[t]);
      std::sort(sorted.begin(), sorted.end());
      double theta = clamped_quantile_sorted(
          sorted, beta, A[static_cast<size_t>(i)][static_cast<size_t>(j)]);
      acc += seg_koenker_direct(z, i, j, theta, beta);
    };
    for (int b : bks) {
      run_segment(start, b - 1);
      start = b;
    }
    run_segment(start, n);
    if (acc < best_cost) {
      best_cost = acc;
      out.best_breakpoints = bks;
    }
  }
  out.best_koenker = best_cost;
  return out;
}

}  // namespace mqseg
