// Penalty / local LLR machinery: golden values from closed forms, inversion
// residuals, rank boxes, and agreement between the float statistic and the
// exact integer-rank audit.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "mqseg/multiscale.hpp"
#include "mqseg/series.hpp"

using namespace mqseg;

TEST_CASE("penalty closed forms") {
  // sqrt(2 * (1 + log(n/len)))
  CHECK(penalty(100, 100) == std::sqrt(2.0));  // full scale, exactly
  CHECK(penalty(1, 100) == doctest::Approx(3.3481846382743266).epsilon(1e-15));
  CHECK(penalty(1, 1) == std::sqrt(2.0));
  CHECK(penalty(10, 1000) ==
        doctest::Approx(std::sqrt(2.0 * (1.0 + std::log(100.0)))).epsilon(1e-15));
  // Monotone decreasing in len.
  for (int len = 2; len <= 50; ++len) CHECK(penalty(len, 50) < penalty(len - 1, 50));
}

TEST_CASE("llr rate golden values and shape") {
  CHECK(llr_rate(0.5, 0.5) == 0.0);
  CHECK(llr_rate(0.25, 0.25) == 0.0);
  CHECK(llr_rate(0.6, 0.5) == doctest::Approx(0.020135513550688863).epsilon(1e-15));
  CHECK(llr_rate(0.0, 0.5) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(llr_rate(1.0, 0.5) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(llr_rate(1.0, 0.25) == doctest::Approx(std::log(4.0)).epsilon(1e-15));
  CHECK(llr_rate(0.0, 0.25) ==
        doctest::Approx(std::log(4.0 / 3.0)).epsilon(1e-15));
  CHECK(local_llr(0.5, 2, 0.25) ==
        doctest::Approx(0.28768207245178085).epsilon(1e-15));

  // Convexity on a grid: midpoint never above the chord.
  for (double beta : {0.25, 0.5, 0.75}) {
    for (int i = 0; i <= 98; ++i) {
      double a = i / 100.0, b = (i + 2) / 100.0;
      CHECK(llr_rate((a + b) / 2, beta) <=
            0.5 * (llr_rate(a, beta) + llr_rate(b, beta)) + 1e-12);
    }
  }
}

TEST_CASE("inversion residuals stay below 1e-10") {
  // For 1000 (q_tilde, beta) pairs, the recovered roots must satisfy
  // |h(root) - q_tilde| <= 1e-10 whenever the root is interior.
  std::mt19937_64 gen(42);
  std::uniform_real_distribution<double> qd(1e-6, 2.0), bd(0.05, 0.95);
  int interior_checked = 0;
  for (int rep = 0; rep < 1000; ++rep) {
    double beta = bd(gen);
    double qt = qd(gen);
    LlrRoots r = invert_llr(qt, beta);
    CHECK(r.lower >= 0.0);
    CHECK(r.upper <= 1.0);
    CHECK(r.lower <= beta);
    CHECK(r.upper >= beta);
    if (r.lower > 0.0) {
      CHECK(std::fabs(llr_rate(r.lower, beta) - qt) <= 1e-10);
      ++interior_checked;
    } else {
      CHECK(qt >= llr_rate(0.0, beta) - 1e-12);
    }
    if (r.upper < 1.0) {
      CHECK(std::fabs(llr_rate(r.upper, beta) - qt) <= 1e-10);
      ++interior_checked;
    } else {
      CHECK(qt >= llr_rate(1.0, beta) - 1e-12);
    }
  }
  CHECK(interior_checked > 500);  // the grid is not degenerate
}

TEST_CASE("box ranks match a direct integer scan") {
  // m in [m_lo, m_hi]  <=>  sqrt(2*len*h(m/len)) - pen <= q, checked by
  // enumerating every ones-count.
  for (double beta : {0.25, 0.5, 0.75}) {
    for (double q : {-0.2, 0.1, 0.7, 1.5, 3.0}) {
      for (int n : {1, 2, 5, 17}) {
        for (int len = 1; len <= n; ++len) {
          BoxRanks rk = box_ranks(len, n, q, beta);
          double pen = penalty(len, n);
          if (q + pen < 0.0) {
            CHECK(!rk.usable);
            continue;
          }
          CHECK(rk.usable);
          for (int m = 0; m <= len; ++m) {
            double stat =
                std::sqrt(2.0 * local_llr(static_cast<double>(m) / len, len, beta)) -
                pen;
            bool inside = m >= rk.m_lo && m <= rk.m_hi;
            // Allow the enumeration no slack except at exact float boundaries.
            if (stat <= q - 1e-9) CHECK(inside);
            if (stat >= q + 1e-9) CHECK(!inside);
          }
        }
      }
    }
  }
}

TEST_CASE("confidence box maps ranks to order statistics") {
  std::vector<double> window{3.0, 1.0, 2.0, 5.0, 4.0};
  BoxRanks rk;
  rk.m_lo = 2;
  rk.m_hi = 3;
  ConfidenceBox box = confidence_box(window, rk, 1, 5);
  CHECK(box.lower == 2.0);  // z_(2)
  CHECK(box.upper == 4.0);  // z_(4) half-open
  CHECK(!box.empty());

  rk.m_lo = 0;  // unbounded below
  rk.m_hi = 5;  // unbounded above
  box = confidence_box(window, rk, 1, 5);
  CHECK(box.lower == -kInf);
  CHECK(box.upper == kInf);

  rk.m_lo = 3;
  rk.m_hi = 2;  // empty encoding
  box = confidence_box(window, rk, 1, 5);
  CHECK(box.empty());
}

TEST_CASE("scale table matches per-length primitives") {
  ScaleTable tab = make_scale_table(23, 0.8, 0.25);
  CHECK(tab.n == 23);
  REQUIRE(static_cast<int>(tab.pen.size()) == 23);
  REQUIRE(static_cast<int>(tab.ranks.size()) == 23);
  for (int len = 1; len <= 23; ++len) {
    CHECK(tab.pen[static_cast<size_t>(len) - 1] == penalty(len, 23));
    BoxRanks direct = box_ranks(len, 23, 0.8, 0.25);
    CHECK(tab.ranks[static_cast<size_t>(len) - 1].m_lo == direct.m_lo);
    CHECK(tab.ranks[static_cast<size_t>(len) - 1].m_hi == direct.m_hi);
    CHECK(tab.ranks[static_cast<size_t>(len) - 1].usable == direct.usable);
  }
}

TEST_CASE("multiscale statistic agrees with a hand-rolled double loop") {
  std::mt19937_64 gen(7);
  std::normal_distribution<double> nd;
  for (int rep = 0; rep < 20; ++rep) {
    int n = 5 + static_cast<int>(gen() % 20);
    std::vector<double> v(static_cast<size_t>(n));
    for (auto& x : v) x = nd(gen);
    Series z(v);
    StepFunction f =
        (rep % 2 == 0)
            ? StepFunction::constant(n, 0.3)
            : StepFunction({1, n / 2 + 1, n + 1}, {-0.5, 0.8});
    double beta = (rep % 3 == 0) ? 0.25 : 0.5;

    double expect = -kInf;
    for (int s = 1; s <= f.segments(); ++s) {
      for (int i = f.segment_begin(s); i <= f.segment_end(s); ++i) {
        int ones = 0;
        for (int j = i; j <= f.segment_end(s); ++j) {
          if (z[j] <= f.value(s)) ++ones;
          int len = j - i + 1;
          double stat = std::sqrt(2.0 * local_llr(
                            static_cast<double>(ones) / len, len, beta)) -
                        penalty(len, n);
          expect = std::max(expect, stat);
        }
      }
    }
    CHECK(multiscale_stat(z, f, beta) == doctest::Approx(expect).epsilon(1e-13));
  }
}

TEST_CASE("exact audit agrees with the float statistic") {
  std::mt19937_64 gen(99);
  std::normal_distribution<double> nd;
  int passes = 0, fails = 0;
  for (int rep = 0; rep < 300; ++rep) {
    int n = 4 + static_cast<int>(gen() % 16);
    std::vector<double> v(static_cast<size_t>(n));
    for (auto& x : v) x = nd(gen);
    Series z(v);
    int b = 2 + static_cast<int>(gen() % (static_cast<unsigned>(n) - 2));
    StepFunction f({1, b, n + 1}, {nd(gen), nd(gen)});
    double beta = 0.5;
    double q = -0.3 + 0.01 * static_cast<double>(gen() % 300);
    ScaleTable tab = make_scale_table(n, q, beta);
    bool audit = passes_all_scales(z, f, tab);
    double stat = multiscale_stat(z, f, beta);
    // Exempt only exact-boundary cases from the comparison.
    if (std::fabs(stat - q) > 1e-9) CHECK(audit == (stat <= q));
    (audit ? passes : fails)++;
  }
  CHECK(passes > 20);
  CHECK(fails > 20);
}
