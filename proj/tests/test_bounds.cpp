#include <doctest.h>

#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include <boost/math/special_functions/erf.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "dks/bounds.hpp"
#include "dks/bounds_suite.hpp"
#include "dks/combinatorics.hpp"
#include "dks/disorder.hpp"
#include "dks/errors.hpp"
#include "dks/rng.hpp"

using namespace dks;
using big = boost::multiprecision::cpp_bin_float_50;

namespace {

double erfc_tail(double x) {
  return static_cast<double>(boost::math::erfc(big(x) / boost::multiprecision::sqrt(big(2))) / 2);
}

// P(S_n >= t) by summing binomial probabilities in long double.
long double exact_rademacher_tail(int n, double t) {
  long double p = 0.0L;
  for (int b = 0; b <= n; ++b)
    if (2.0 * b - n >= t - 1e-12) p += std::exp(std::lgamma(n + 1.0L) - std::lgamma(b + 1.0L) - std::lgamma(n - b + 1.0L) - n * std::log(2.0L));
  return p;
}

// The 15 pair indices of K_6, and the 20 triangles as edge-index triples.
struct TriangleTable {
  std::vector<std::array<int, 3>> tri;
  TriangleTable() {
    for (int a = 0; a < 6; ++a)
      for (int b = a + 1; b < 6; ++b)
        for (int c = b + 1; c < 6; ++c)
          tri.push_back({static_cast<int>(pair_index(6, a, b)), static_cast<int>(pair_index(6, a, c)),
                         static_cast<int>(pair_index(6, b, c))});
  }
};

}  // namespace

TEST_CASE("Mills bounds bracket the exact Gaussian tail") {
  for (double x : {0.5, 1.0, 2.0, 4.0}) {
    const auto t = gaussian_tail(x);
    const double exact = erfc_tail(x);
    CHECK(t.lower <= exact);
    CHECK(exact <= t.upper);
    CHECK(normal_sf(x) == doctest::Approx(exact).epsilon(1e-14));
  }
  const auto far = gaussian_tail(20.0);
  CHECK(far.upper / far.lower <= 1.01);
  CHECK(gaussian_tail(1.0).upper == doctest::Approx(std::exp(-0.5) / std::sqrt(2 * std::numbers::pi)));
  CHECK(gaussian_tail(1.0).upper == doctest::Approx(0.24197).epsilon(1e-4));
  CHECK_THROWS_AS(gaussian_tail(0.0), DomainError);
  CHECK(log_normal_sf(30.0) == doctest::Approx(std::log(erfc_tail(30.0))).epsilon(1e-12));
  CHECK(log_normal_sf(40.0) == doctest::Approx(static_cast<double>(boost::multiprecision::log(
                                   boost::math::erfc(big(40) / boost::multiprecision::sqrt(big(2))) / 2)))
                                   .epsilon(1e-12));
}

TEST_CASE("Rademacher tail domination") {
  for (int n = 1; n <= 30; ++n)
    for (double x : {1.0, 1.5, 2.0}) {
      const double exact = static_cast<double>(exact_rademacher_tail(n, x * std::sqrt(n)));
      CHECK(rademacher_tail(n, x * std::sqrt(n)) == doctest::Approx(exact).epsilon(1e-12));
      CHECK(rademacher_gaussian_domination(n, x) >= exact);
    }
  double prev = INFINITY;
  for (double x = 1.0; x <= 6.0; x += 0.25) {
    const double b = rademacher_gaussian_domination(10, x);
    CHECK(b < prev);
    prev = b;
  }
  CHECK(rademacher_tail(4, 4.0) == 0.0625);
  CHECK(rademacher_gaussian_domination(4, 2.0) == doctest::Approx(0.3438).epsilon(1e-3));
  CHECK_THROWS_AS(rademacher_gaussian_domination(4, 0.5), DomainError);
}

TEST_CASE("joint Rademacher bound") {
  CHECK(joint_rademacher_bound(2, 3, 0.0) == 15.0);
  // 2 shared + 3 + 3 own signs: all 256 patterns.
  int hits = 0;
  for (int mask = 0; mask < 256; ++mask) {
    auto s = [&](int bit) { return (mask >> bit) & 1 ? 1 : -1; };
    const int shared = s(0) + s(1);
    const int x1 = shared + s(2) + s(3) + s(4);
    const int x2 = shared + s(5) + s(6) + s(7);
    hits += x1 >= 2 && x2 >= 2;
  }
  const double exact = hits / 256.0;
  CHECK(joint_rademacher_exact(2, 3, 2.0) == doctest::Approx(exact).epsilon(1e-14));
  CHECK(joint_rademacher_bound(2, 3, 2.0) >= exact);
  double prev = INFINITY;
  for (double beta = 0.0; beta <= 10.0; beta += 0.5) {
    const double b = joint_rademacher_bound(4, 6, beta);
    CHECK(b <= prev);
    prev = b;
  }
}

TEST_CASE("binomial lower tails") {
  for (int n : {20, 50, 100})
    for (double g : {0.5, 1.0, 2.0}) {
      const double exact = static_cast<double>(exact_rademacher_tail(n, g * std::sqrt(n)));
      const auto b = binomial_lower_tail(n, g);
      CHECK(b.expansion <= exact);
      CHECK(b.kl_exact <= exact);
    }
  CHECK(binomial_lower_tail(50, 1e-9).expansion == doctest::Approx(1.0 / std::sqrt(100.0)).epsilon(1e-9));
  // The unrounded KL form overshoots when lambda n is fractional.
  CHECK(binomial_lower_tail(20, 2.0).kl_unrounded > static_cast<double>(exact_rademacher_tail(20, 2.0 * std::sqrt(20.0))));
  CHECK_THROWS_AS(binomial_lower_tail(4, 2.0), DomainError);
}

TEST_CASE("KL divergence") {
  for (double p : {0.1, 0.5, 0.9}) CHECK(kl_divergence(p, p) == 0.0);
  CHECK(kl_divergence(0.5, 0.5) == 0.0);
  CHECK(kl_divergence(0.7, 0.5) == doctest::Approx(0.7 * std::log(1.4) + 0.3 * std::log(0.6)).epsilon(1e-14));
  CHECK(kl_divergence(0.7, 0.5) == doctest::Approx(0.08228).epsilon(1e-4));
  for (double p : {0.2, 0.5, 0.8})
    for (double x1 = 0.05; x1 < 1.0; x1 += 0.1)
      for (double x2 = 0.05; x2 < 1.0; x2 += 0.1)
        CHECK(kl_divergence((x1 + x2) / 2, p) <= (kl_divergence(x1, p) + kl_divergence(x2, p)) / 2 + 1e-15);
  CHECK(std::isinf(kl_divergence(0.5, 0.0)));
  CHECK(kl_divergence(0.0, 0.0) == 0.0);
}

TEST_CASE("Savage bound") {
  for (double x : {0.5, 1.0, 3.0})
    CHECK(savage_bound({{1.0}}, {x}) == doctest::Approx(gaussian_tail(x).upper).epsilon(1e-13));
  for (long long K : {4, 6, 10})
    for (long long l = 2; l <= K - 1; ++l)
      for (double g : {0.3, 0.5, 1.0}) {
        const double ck = static_cast<double>(choose2(K)), cl = static_cast<double>(choose2(l));
        CHECK(savage_bound({{ck, cl}, {cl, ck}}, {g * ck, g * ck}) ==
              doctest::Approx(bivariate_correlated_bound(K, l, g)).epsilon(1e-12));
      }
  CHECK_THROWS_AS(savage_bound({{1.0, 1.0}, {1.0, 1.0}}, {1.0, 1.0}), HypothesisError);
  CHECK_THROWS_AS(savage_bound({{1.0, 0.9}, {0.9, 1.0}}, {2.0, 0.1}), HypothesisError);
  CHECK_THROWS_AS(savage_bound({{1.0, 0.0}}, {1.0, 1.0}), DimensionError);
}

TEST_CASE("bivariate bound is increasing in the overlap") {
  double prev = 0.0;
  for (long long l = 2; l <= 19; ++l) {
    const double b = bivariate_correlated_bound(20, l, 0.3);
    CHECK(b > prev);
    prev = b;
  }
  CHECK_THROWS_AS(bivariate_correlated_bound(5, 5, 0.5), DomainError);
  CHECK_THROWS_AS(bivariate_correlated_bound(5, 1, 0.5), DomainError);
}

TEST_CASE("domination suite reports no violations") {
  BoundsSuiteOptions o;
  o.mc_samples = 200000;
  const auto rows = run_bounds_suite(o);
  CHECK(rows.size() > 500);
  for (const auto& r : rows) CHECK_MESSAGE(r.passed, r.bound << " " << r.params);
}

TEST_CASE("concentration bounds") {
  const auto c = concentration_bounds(5, 10.0, 10.0);
  CHECK(c.talagrand == 1.0);
  CHECK_FALSE(c.talagrand_hypothesis_met);
  CHECK(concentration_bounds(10, 10.0, 45.0).borell_tis == doctest::Approx(std::exp(-100.0 / 90.0)));
  CHECK(concentration_bounds(1, 60.0, 1.0).talagrand_hypothesis_met);
  double pt = INFINITY, pb = INFINITY;
  for (double t = 30.0; t <= 200.0; t += 10.0) {
    const auto b = concentration_bounds(3, t, 100.0);
    CHECK(b.talagrand <= pt);
    CHECK(b.borell_tis <= pb);
    pt = b.talagrand;
    pb = b.borell_tis;
  }
}

TEST_CASE("first moment") {
  const auto r = first_moment_upper(6, 3, 1.0, DistributionSpec::rademacher());
  CHECK(r.value == doctest::Approx(2.5).epsilon(1e-12));
  CHECK(r.exact);
  CHECK(first_moment_upper(6, 3, 1.01, DistributionSpec::rademacher()).value == 0.0);
  CHECK(first_moment_upper(6, 3, 1.5, DistributionSpec::bernoulli_half()).value == 0.0);

  // Gaussian n=30, K=5: C(n,K) P(Z_S >= 0.7 C(K,2)) against Monte Carlo sums of 10 edges.
  const auto spec = DistributionSpec::gaussian_half_quarter();
  const double gamma = 0.7;
  const auto fm = first_moment_upper(30, 5, gamma, spec);
  SplitMix64 rng(42);
  const long long S = 1000000;
  long long hits = 0;
  for (long long s = 0; s < S; ++s) {
    double z = 0.0;
    for (int e = 0; e < 10; ++e) z += spec.quantile(rng.uniform());
    hits += z >= gamma * 10.0;
  }
  const double p = static_cast<double>(hits) / S;
  const double se = std::sqrt(p * (1 - p) / S);
  const double cnk = binomial(30, 5);
  CHECK(std::abs(fm.value - cnk * p) <= 3.0 * cnk * se);
}

TEST_CASE("s_term") {
  // Combinatorial prefactor alone sums to at most 1 over l.
  for (long long n : {20, 50, 200})
    for (long long K : {4, 7, 10}) {
      double total = 0.0;
      for (long long l = 2; l <= K - 1; ++l) total += std::exp(s_term(n, K, 0.0, l, 0.0));
      CHECK(total <= 1.0);
    }
  const double g = 1.3;
  const double ck = 45.0;
  CHECK(s_term(100, 10, 0.0, 2, g) - s_term(100, 10, 0.0, 2, 0.0) == doctest::Approx(g * g * ck / (ck + 1.0)));
  const long long n = 200, K = 14, l = 5;
  const double gamma = 2.0 * std::sqrt(std::log(200.0 / 14.0) / 14.0);
  auto lb = [](long double a, long double b) { return std::lgamma(a + 1) - std::lgamma(b + 1) - std::lgamma(a - b + 1); };
  const long double want = lb(K, l) + lb(n - K, K - l) - lb(n, K) + 4.0L * std::log(14.0L) +
                           static_cast<long double>(gamma) * gamma * 91.0L * 10.0L / 101.0L;
  CHECK(s_term(n, K, 4.0, l, gamma) == doctest::Approx(static_cast<double>(want)).epsilon(1e-9));
}

TEST_CASE("second moment on the fully enumerated n=6, K=3 Rademacher law") {
  const TriangleTable tt;
  const auto spec = DistributionSpec::rademacher();
  std::vector<double> gammas;
  for (int i = 0; i < 20; ++i) gammas.push_back(-1.0 + 2.0 * i / 19.0);
  for (double gamma : gammas) {
    const auto r = second_moment_report(6, 3, gamma, spec);
    long long at_least_one = 0;
    double eu = 0.0, eu2 = 0.0;
    for (int mask = 0; mask < (1 << 15); ++mask) {
      int u = 0;
      for (const auto& t : tt.tri) {
        int z = 0;
        for (int e : t) z += (mask >> e) & 1 ? 1 : -1;
        u += z >= gamma * 3.0 - 1e-9;
      }
      at_least_one += u >= 1;
      eu += u;
      eu2 += static_cast<double>(u) * u;
    }
    const double n = 1 << 15;
    CHECK(r.first_moment == doctest::Approx(eu / n).epsilon(1e-12));
    CHECK(at_least_one / n >= r.pz_ratio_lower);
    CHECK(r.pz_ratio_lower >= 0.0);
    CHECK(r.pz_ratio_lower <= 1.0);
    CHECK(eu2 / n >= r.a_term * (1 - 1e-12));
    CHECK(eu2 / n <= (r.a_term + r.b_upper) * (1 + 1e-12));
  }
}

TEST_CASE("Paley-Zygmund ratio with vanishing overlap term") {
  for (long long n : {200, 1000, 5000}) {
    const auto spec = DistributionSpec::gaussian_std();
    const long long K = 4;
    for (double eps : {0.5, 2.0, 10.0}) {
      const double gamma = auto_gamma(n, K, eps, spec);
      const auto r = second_moment_report(n, K, gamma, spec);
      const double w = r.first_moment;
      CHECK(r.pz_ratio_lower >= 1.0 / (1.0 + 1.0 / w + r.b_bar_upper) - 1e-12);
      if (r.b_bar_upper < 1e-2) CHECK(r.pz_ratio_lower == doctest::Approx(1.0 / (1.0 + 1.0 / w)).epsilon(0.02));
    }
  }
}
