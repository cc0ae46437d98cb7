#include "mqseg/msb.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

#include "mqseg/multiscale.hpp"

namespace mqseg {

namespace {

struct CpRef {
  int qi = 0;   // which quantile
  int ord = 0;  // ordinal of the changepoint within that fit (0-based)
  int b = 0;    // fitted index
  int left = 0, right = 0;
  bool done = false;
};

bool intervals_intersect(const CpRef& a, const CpRef& b) {
  return std::max(a.left, b.left) <= std::min(a.right, b.right);
}

// Round to nearest index, ties to the lower one.
int round_ties_low(double x) { return static_cast<int>(std::ceil(x - 0.5)); }

double refit_cost(const Series& z, const StepFunction& f, double beta,
                  CostRule rule, RunsMean conv) {
  if (rule == CostRule::koenker) return koenker_cost(z, f, beta);
  BinarySeries w = transform(z, f);
  return runs_log_density(runs_count(w), ones_count(w), z.size(), beta, conv);
}

}  // namespace

MsbResult msb_fit(const Series& z, ThresholdTable& thresholds,
                  const MsbConfig& cfg) {
  if (z.empty()) throw std::domain_error("msb_fit: empty series");
  if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0))
    throw std::domain_error("msb_fit: alpha must lie in (0,1)");
  const int n = z.size();

  MsbResult out;
  out.alpha_each = cfg.alpha;
  out.alpha_simultaneous = 3.0 * cfg.alpha;

  for (int k = 0; k < 3; ++k) {
    ThresholdKey key{n, cfg.betas[static_cast<size_t>(k)], cfg.alpha, cfg.reps,
                     cfg.seed};
    out.thresholds[static_cast<size_t>(k)] =
        threshold_for(thresholds, key, cfg.table_path, cfg.nthreads);
    SegmentationConfig sc;
    sc.beta = cfg.betas[static_cast<size_t>(k)];
    sc.q = out.thresholds[static_cast<size_t>(k)];
    sc.cost = cfg.cost;
    sc.runs_mean = cfg.runs_mean;
    sc.with_bands = true;
    out.fits[static_cast<size_t>(k)] = fit(z, sc);
  }

  // Candidate changepoints, left to right (ties by quantile).
  std::vector<CpRef> cps;
  for (int k = 0; k < 3; ++k) {
    const auto& fr = out.fits[static_cast<size_t>(k)];
    if (fr.status != FitStatus::ok) continue;
    for (size_t o = 0; o < fr.cp_intervals.size(); ++o) {
      const auto& ci = fr.cp_intervals[o];
      cps.push_back({k, static_cast<int>(o), ci.index, ci.left, ci.right});
    }
  }
  std::sort(cps.begin(), cps.end(), [](const CpRef& a, const CpRef& b) {
    return a.b != b.b ? a.b < b.b : a.qi < b.qi;
  });

  std::array<std::vector<int>, 3> new_idx;
  for (int k = 0; k < 3; ++k)
    for (const auto& ci : out.fits[static_cast<size_t>(k)].cp_intervals)
      new_idx[static_cast<size_t>(k)].push_back(ci.index);

  for (size_t i = 0; i < cps.size(); ++i) {
    if (cps[i].done) continue;
    cps[i].done = true;

    // Leftmost open changepoint of each other quantile whose interval meets
    // this one.
    std::vector<size_t> partners;
    for (int qj = 0; qj < 3; ++qj) {
      if (qj == cps[i].qi) continue;
      for (size_t j = 0; j < cps.size(); ++j) {
        if (cps[j].done || cps[j].qi != qj) continue;
        if (intervals_intersect(cps[i], cps[j])) partners.push_back(j);
        break;  // only the leftmost open one counts
      }
    }

    std::vector<size_t> group{i};
    if (partners.size() == 2) {
      int max_l = std::max({cps[i].left, cps[partners[0]].left,
                            cps[partners[1]].left});
      int min_r = std::min({cps[i].right, cps[partners[0]].right,
                            cps[partners[1]].right});
      if (max_l <= min_r) {
        group.push_back(partners[0]);
        group.push_back(partners[1]);
      } else {
        // Pairwise overlaps only: keep the nearer partner (ties toward the
        // lower quantile, which comes first in `partners`).
        size_t pick = partners[0];
        if (std::abs(cps[partners[1]].b - cps[i].b) <
            std::abs(cps[partners[0]].b - cps[i].b))
          pick = partners[1];
        group.push_back(pick);
      }
    } else if (partners.size() == 1) {
      group.push_back(partners[0]);
    }
    if (group.size() < 2) continue;

    int max_l = INT_MIN, min_r = INT_MAX;
    double mean = 0.0;
    for (size_t g : group) {
      max_l = std::max(max_l, cps[g].left);
      min_r = std::min(min_r, cps[g].right);
      mean += cps[g].b;
    }
    mean /= static_cast<double>(group.size());
    int merged = round_ties_low(mean);
    merged = std::clamp(merged, max_l, min_r);

    MergeRecord rec;
    std::sort(group.begin(), group.end(), [&cps](size_t a, size_t b) {
      return cps[a].qi < cps[b].qi;
    });
    for (size_t g : group) {
      cps[g].done = true;
      rec.quantiles.push_back(cps[g].qi);
      rec.original_indices.push_back(cps[g].b);
      new_idx[static_cast<size_t>(cps[g].qi)]
             [static_cast<size_t>(cps[g].ord)] = merged;
    }
    rec.merged_index = merged;
    out.merges.push_back(std::move(rec));
  }

  // Rebuild any fit whose changepoints moved; if the moved configuration is
  // no longer acceptable (it can fall outside the acceptance region in
  // principle), roll that quantile back to its original fit.
  for (int k = 0; k < 3; ++k) {
    auto& fr = out.fits[static_cast<size_t>(k)];
    if (fr.status != FitStatus::ok) continue;
    const auto& idx = new_idx[static_cast<size_t>(k)];
    bool moved = false;
    for (size_t o = 0; o < idx.size(); ++o)
      if (idx[o] != fr.cp_intervals[o].index) moved = true;
    if (!moved) continue;

    bool valid = true;
    for (size_t o = 0; o < idx.size(); ++o) {
      if (idx[o] < 2 || idx[o] > n) valid = false;
      if (o > 0 && idx[o] <= idx[o - 1]) valid = false;
    }

    StepFunction refit;
    if (valid) {
      std::vector<int> bps{1};
      for (int b : idx) bps.push_back(b);
      bps.push_back(n + 1);
      ScaleTable tab =
          make_scale_table(n, fr.q_used, cfg.betas[static_cast<size_t>(k)]);
      std::vector<double> vals;
      for (size_t s = 0; s + 1 < bps.size() && valid; ++s) {
        int first = bps[s], last = bps[s + 1] - 1;
        auto [lo, hi] = segment_value_range(z, tab, first, last);
        if (!(lo < hi)) {
          valid = false;
          break;
        }
        vals.push_back(clamped_segment_value(
            z, first, last, cfg.betas[static_cast<size_t>(k)], lo, hi));
      }
      if (valid) {
        refit = StepFunction(bps, vals);
        valid = passes_all_scales(z, refit, tab);
      }
    }

    if (!valid) {
      out.reverted[static_cast<size_t>(k)] = true;
      continue;
    }
    fr.fit = refit;
    fr.cost = refit_cost(z, refit, cfg.betas[static_cast<size_t>(k)],
                         cfg.cost, cfg.runs_mean);
    for (size_t o = 0; o < idx.size(); ++o) {
      fr.cp_intervals[o].index = idx[o];
      fr.cp_intervals[o].tau = static_cast<double>(idx[o] - 1) / n;
    }
  }

  return out;
}

}  // namespace mqseg
