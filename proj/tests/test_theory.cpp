// Finite-sample bound calculators: distribution plumbing, the quantile jump
// function, signal characteristics, and the probability bounds, each checked
// against closed forms or an independent in-test evaluation.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "mqseg/series.hpp"
#include "mqseg/theory.hpp"

using namespace mqseg;

TEST_CASE("distribution cdfs at golden points") {
  DistributionSpec n01 = DistributionSpec::normal(0.0, 1.0);
  CHECK(n01.cdf(0.0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(n01.cdf(1.0) ==
        doctest::Approx(0.5 + 0.3413447460685429).epsilon(1e-13));
  CHECK(n01.quantile(0.5) == doctest::Approx(0.0));

  DistributionSpec t3 = DistributionSpec::student_t(3.0, 1.0);
  CHECK(t3.cdf(1.0) == doctest::Approx(0.8044988905221148).epsilon(1e-13));
  CHECK(t3.cdf(0.0) == doctest::Approx(0.5));

  DistributionSpec cau = DistributionSpec::cauchy(0.0, 1.0);
  CHECK(cau.cdf(0.0) == doctest::Approx(0.5));
  CHECK(cau.cdf(1.0) == doctest::Approx(0.75).epsilon(1e-14));

  // Centering subtracts the chi-square median, so zero is the median for any
  // scale.
  for (double scale : {1.0, 0.25, 3.0}) {
    DistributionSpec chi = DistributionSpec::chi_square_centered(3.0, scale);
    CHECK(chi.cdf(0.0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(chi.quantile(0.5) == doctest::Approx(0.0).epsilon(1e-9));
  }
}

TEST_CASE("cdf/quantile consistency and monotonicity") {
  std::vector<DistributionSpec> specs{
      DistributionSpec::normal(1.0, 2.0), DistributionSpec::student_t(3.0, 0.5),
      DistributionSpec::cauchy(-1.0, 0.3),
      DistributionSpec::chi_square_centered(3.0, 0.7)};
  for (const auto& d : specs) {
    double prev = -1.0;
    for (double x = -5.0; x <= 5.0; x += 0.25) {
      double c = d.cdf(x);
      CHECK(c >= prev - 1e-15);  // nondecreasing
      CHECK(c >= 0.0);
      CHECK(c <= 1.0);
      prev = c;
    }
    for (double b : {0.1, 0.25, 0.5, 0.75, 0.9})
      CHECK(d.cdf(d.quantile(b)) == doctest::Approx(b).epsilon(1e-9));
  }
}

TEST_CASE("empirical distribution is the right-continuous step cdf") {
  DistributionSpec emp = DistributionSpec::empirical({2.0, 1.0, 2.0, 4.0});
  CHECK(emp.cdf(0.5) == 0.0);
  CHECK(emp.cdf(1.0) == 0.25);   // right-continuous: includes the atom
  CHECK(emp.cdf(1.999) == 0.25);
  CHECK(emp.cdf(2.0) == 0.75);
  CHECK(emp.cdf(3.0) == 0.75);
  CHECK(emp.cdf(4.0) == 1.0);
  CHECK(emp.cdf(9.0) == 1.0);
  CHECK(emp.quantile(0.5) == 2.0);   // rank ceil(2) = 2
  CHECK(emp.quantile(0.75) == 2.0);  // rank 3
  CHECK(emp.quantile(0.76) == 4.0);  // rank 4
  CHECK(emp.quantile(0.1) == 1.0);
}

TEST_CASE("quantile jump function") {
  DistributionSpec n01 = DistributionSpec::normal(0.0, 1.0);
  CHECK(quantile_jump(n01, 0.5, 0.0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(quantile_jump(n01, 0.5, 1.0) ==
        doctest::Approx(0.3413447460685429).epsilon(1e-12));
  CHECK(quantile_jump(n01, 0.5, 1e9) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(quantile_jump(n01, 0.25, 1e9) == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(quantile_jump(DistributionSpec::cauchy(0.0, 1.0), 0.5, 1.0) ==
        doctest::Approx(0.25).epsilon(1e-12));

  // Nondecreasing in |delta| on each side.
  for (double beta : {0.25, 0.5, 0.75}) {
    double prev = -1.0;
    for (double d = 0.0; d <= 3.0; d += 0.1) {
      double j = quantile_jump(n01, beta, d);
      CHECK(j >= prev - 1e-15);
      prev = j;
    }
    prev = -1.0;
    for (double d = 0.0; d >= -3.0; d -= 0.1) {
      double j = quantile_jump(n01, beta, d);
      CHECK(j >= prev - 1e-15);
      prev = j;
    }
  }

  // Discrete cdf: even delta = 0 can move mass (the atom at the quantile).
  DistributionSpec emp = DistributionSpec::empirical({1.0, 2.0, 2.0, 4.0});
  CHECK(quantile_jump(emp, 0.5, 0.0) == doctest::Approx(0.25));
}

TEST_CASE("signal characteristics of a two-segment signal") {
  StepFunction f({1, 251, 501}, {0.0, 1.0});  // jump of 1 at tau = 0.5
  DistributionSpec n01 = DistributionSpec::normal(0.0, 1.0);
  SignalCharacteristics sc = signal_characteristics(f, n01, n01, 0.5);
  CHECK(sc.min_segment_len == doctest::Approx(0.5));
  REQUIRE(sc.min_jump.has_value());
  CHECK(*sc.min_jump == doctest::Approx(0.3413447460685429).epsilon(1e-12));
  REQUIRE(sc.jump_delta.size() == 1);
  CHECK(sc.jump_delta[0] == doctest::Approx(1.0));
  REQUIRE(sc.jump_xi.size() == 1);
  CHECK(sc.jump_xi[0] == doctest::Approx(*sc.min_jump));
  REQUIRE(sc.jump_pair_len.size() == 1);
  CHECK(sc.jump_pair_len[0] == doctest::Approx(0.5));
}

TEST_CASE("signal characteristics: flat signal and segment-count invariant") {
  DistributionSpec n01 = DistributionSpec::normal(0.0, 1.0);
  SignalCharacteristics flat =
      signal_characteristics(StepFunction::constant(100, 2.0), n01, n01, 0.5);
  CHECK(flat.min_segment_len == 1.0);
  CHECK(!flat.min_jump.has_value());
  CHECK(flat.jump_delta.empty());

  // Three segments of lengths 100/300/100 out of 500.
  StepFunction g({1, 101, 401, 501}, {0.0, 1.0, -0.5});
  SignalCharacteristics sc = signal_characteristics(g, n01, n01, 0.25);
  CHECK(sc.min_segment_len == doctest::Approx(0.2));
  // 1/Lambda >= S - 1 always.
  CHECK(1.0 / sc.min_segment_len >= g.segments() - 1);
  REQUIRE(sc.jump_delta.size() == 2);
  CHECK(sc.jump_delta[0] == doctest::Approx(1.0));
  CHECK(sc.jump_delta[1] == doctest::Approx(-1.5));
  CHECK(sc.jump_pair_len[0] == doctest::Approx(0.2));
  CHECK(sc.jump_pair_len[1] == doctest::Approx(0.2));
  // Xi never exceeds max(beta, 1 - beta).
  REQUIRE(sc.min_jump.has_value());
  CHECK(*sc.min_jump <= std::max(0.25, 0.75));
  // Small beta drives the jump mass toward zero for a fixed delta.
  SignalCharacteristics tiny = signal_characteristics(g, n01, n01, 0.0001);
  CHECK(*tiny.min_jump < *sc.min_jump);
}

TEST_CASE("overestimation bound") {
  CHECK(over_bound(0.1, 0) == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(over_bound(0.1, 1) == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(over_bound(0.1, 2) == doctest::Approx(0.01).epsilon(1e-14));
  CHECK(over_bound(0.1, 3) == doctest::Approx(0.01).epsilon(1e-14));
  CHECK(over_bound(0.05, 5) == doctest::Approx(1.25e-4).epsilon(1e-12));
  // Decreasing in s, and always a probability.
  for (int s = 0; s < 12; ++s) {
    CHECK(over_bound(0.2, s + 1) <= over_bound(0.2, s) + 1e-18);
    CHECK(over_bound(0.2, s) <= 1.0);
    CHECK(over_bound(0.2, s) > 0.0);
  }
}

TEST_CASE("underestimation bound against an in-test evaluation") {
  auto direct = [](int n, int S, double L, double Xi, double q) {
    double raw = 4.0 * (S - 1) * std::exp(-n * L * Xi * Xi) *
                 (std::exp(2.0 * std::sqrt(n * L) * Xi *
                           (q / std::sqrt(2.0) +
                            std::sqrt(std::log(2.0 * std::exp(1.0) / L)))) +
                  1.0);
    return std::min(1.0, std::max(0.0, raw));
  };
  CHECK(under_bound(500, 1, 0.25, 0.34, 2.0) == 0.0);  // no jumps to miss
  CHECK(under_bound(500, 2, 0.25, 1e-12, 2.0) == 1.0);  // vacuous, clamped
  CHECK(under_bound(500, 2, 0.25, 0.34, 2.0) ==
        doctest::Approx(direct(500, 2, 0.25, 0.34, 2.0)).epsilon(1e-12));
  // An interior (unclamped) point.
  double v = under_bound(5000, 2, 0.25, 0.5, 0.0);
  CHECK(v == doctest::Approx(direct(5000, 2, 0.25, 0.5, 0.0)).epsilon(1e-12));
  CHECK(v > 0.0);
  CHECK(v < 1.0);
  for (int n : {100, 500, 2000})
    for (double q : {0.0, 1.0, 3.0}) {
      double b = under_bound(n, 3, 0.2, 0.3, q);
      CHECK(b >= 0.0);
      CHECK(b <= 1.0);
      CHECK(b == doctest::Approx(direct(n, 3, 0.2, 0.3, q)).epsilon(1e-12));
    }
}

TEST_CASE("per-jump detection bound and its monotonicities") {
  auto direct = [](int n, double lam, double xi, double q) {
    double pos = std::sqrt(2.0 * n * lam) * xi - q -
                 std::sqrt(2.0 * std::log(2.0 * std::exp(1.0) / lam));
    if (pos < 0.0) pos = 0.0;
    double inner = 1.0 - 2.0 * std::exp(-pos * pos / 2.0) -
                   2.0 * std::exp(-n * lam * xi * xi);
    if (inner < 0.0) inner = 0.0;
    return inner * inner;
  };
  CHECK(gamma_ns(1000, 0.25, 0.3, 1.5) ==
        doctest::Approx(direct(1000, 0.25, 0.3, 1.5)).epsilon(1e-12));
  CHECK(gamma_ns(100, 0.25, 0.3, 1e9) == 0.0);  // clamp path
  CHECK(gamma_ns(4000000, 0.25, 0.45, 0.5) > 0.99);

  double prev = -1.0;
  for (int n : {100, 400, 1600, 6400, 25600, 102400}) {
    double g = gamma_ns(n, 0.25, 0.3, 1.5);
    CHECK(g >= prev - 1e-15);  // nondecreasing in n
    CHECK(g >= 0.0);
    CHECK(g <= 1.0);
    prev = g;
  }
  prev = -1.0;
  for (double xi = 0.05; xi <= 0.5; xi += 0.05) {
    double g = gamma_ns(20000, 0.25, xi, 1.5);
    CHECK(g >= prev - 1e-15);  // nondecreasing in xi
    prev = g;
  }
  prev = 2.0;
  for (double q = 0.0; q <= 5.0; q += 0.5) {
    double g = gamma_ns(20000, 0.25, 0.3, q);
    CHECK(g <= prev + 1e-15);  // nonincreasing in q
    prev = g;
  }
}

TEST_CASE("location rate bound") {
  // With eps equal to the minimal segment length the formula reduces to the
  // underestimation bound exactly.
  CHECK(location_rate_bound(500, 2, 0.34, 2.0, 0.25) ==
        under_bound(500, 2, 0.25, 0.34, 2.0));
  CHECK(location_rate_bound(777, 4, 0.2, 1.3, 0.11) ==
        under_bound(777, 4, 0.11, 0.2, 1.3));
  CHECK(location_rate_bound(500, 1, 0.34, 2.0, 0.1) == 0.0);

  // Shrinking localization radius: at eps = C log(n) / (n Xi^2) with a big
  // enough constant the bound vanishes as n grows.  (With C = 1 the positive
  // exponential wins and the bound is vacuous -- it needs C > 4.)
  const double Xi = 0.3;
  double prev = 2.0;
  for (int n : {1000, 10000, 100000, 1000000}) {
    double eps = 6.0 * std::log(static_cast<double>(n)) / (n * Xi * Xi);
    double q = 0.1 * std::sqrt(std::log(static_cast<double>(n)));
    double b = location_rate_bound(n, 2, Xi, q, eps);
    CHECK(b <= prev);
    prev = b;
  }
  CHECK(prev < 1e-6);
}
