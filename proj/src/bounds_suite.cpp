#include "dks/bounds_suite.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

#include "dks/bounds.hpp"
#include "dks/combinatorics.hpp"
#include "dks/rng.hpp"

namespace dks {

namespace {

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

// P(Rademacher sum of m signs equals 2b - m).
double rademacher_pmf(int m, int b) { return std::exp(log_binomial(m, b) - m * std::numbers::ln2); }

BoundCheck exact_check(std::string name, std::string params, bool upper, double value, double ref) {
  BoundCheck c{std::move(name), std::move(params), upper, value, ref, 0.0, false};
  c.passed = upper ? value >= ref : value <= ref;
  return c;
}

BoundCheck mc_check(std::string name, std::string params, double value, long long hits, long long samples) {
  const double p = static_cast<double>(hits) / static_cast<double>(samples);
  const double se = std::sqrt(std::max(p * (1.0 - p), 1.0 / static_cast<double>(samples)) / static_cast<double>(samples));
  BoundCheck c{std::move(name), std::move(params), true, value, p, 3.0 * se, false};
  c.passed = value >= p - c.noise;
  return c;
}

// Pairs of standard normals by Box-Muller on a sequential SplitMix64 stream.
struct NormalPairs {
  SplitMix64 rng;
  explicit NormalPairs(std::uint64_t seed) : rng(seed) {}
  void next(double& a, double& b) {
    const double r = std::sqrt(-2.0 * std::log(rng.uniform()));
    const double t = 2.0 * std::numbers::pi * rng.uniform();
    a = r * std::cos(t);
    b = r * std::sin(t);
  }
};

// Monte Carlo hits of {X >= c1, Y >= c2} for a centered pair with the given covariance.
long long bivariate_hits(double s11, double s12, double s22, double c1, double c2, long long samples, std::uint64_t seed) {
  const double l11 = std::sqrt(s11);
  const double l21 = s12 / l11;
  const double l22 = std::sqrt(s22 - l21 * l21);
  NormalPairs gen(seed);
  long long hits = 0;
  for (long long i = 0; i < samples; ++i) {
    double a, b;
    gen.next(a, b);
    const double x = l11 * a;
    const double y = l21 * a + l22 * b;
    hits += (x >= c1 && y >= c2);
  }
  return hits;
}

}  // namespace

double joint_rademacher_exact(int n0, int n_hat, double beta) {
  double total = 0.0;
  for (int b = 0; b <= n0; ++b) {
    const double shared = 2.0 * b - n0;
    const double own = rademacher_tail(n_hat, beta - shared);
    total += rademacher_pmf(n0, b) * own * own;
  }
  return total;
}

std::vector<BoundCheck> run_bounds_suite(const BoundsSuiteOptions& options) {
  std::vector<BoundCheck> out;

  for (int n = 1; n <= 30; ++n)
    for (double x : {1.0, 1.5, 2.0, 3.0}) {
      const double exact = rademacher_tail(n, x * std::sqrt(static_cast<double>(n)));
      out.push_back(exact_check("rademacher_gaussian_domination", fmt("n=%g x=%g", n, x), true,
                                rademacher_gaussian_domination(n, x), exact));
    }

  for (int n0 = 1; n0 <= 8; ++n0)
    for (int nh = 1; nh <= 8; ++nh)
      for (double beta : {0.0, 1.0, 2.0, 3.0, 4.0, 6.0}) {
        out.push_back(exact_check("joint_rademacher_bound", fmt("n0=%g n_hat=%g beta=%g", n0, nh, beta), true,
                                  joint_rademacher_bound(n0, nh, beta), joint_rademacher_exact(n0, nh, beta)));
      }

  for (int n : {20, 50, 100})
    for (double g : {0.5, 1.0, 2.0}) {
      const double exact = rademacher_tail(n, g * std::sqrt(static_cast<double>(n)));
      const auto lower = binomial_lower_tail(n, g);
      out.push_back(exact_check("binomial_lower_tail.expansion", fmt("n=%g gamma=%g", n, g), false, lower.expansion, exact));
      out.push_back(exact_check("binomial_lower_tail.kl_exact", fmt("n=%g gamma=%g", n, g), false, lower.kl_exact, exact));
    }

  for (double x : {0.5, 1.0, 2.0, 4.0})
    out.push_back(exact_check("savage_bound", fmt("d=1 c=%g", x), true, savage_bound({{1.0}}, {x}), normal_sf(x)));

  const long long S = options.mc_samples;
  std::uint64_t stream = 0;
  {
    const double exact = normal_sf(2.0) * normal_sf(2.0);
    const double b = savage_bound({{1.0, 0.0}, {0.0, 1.0}}, {2.0, 2.0});
    out.push_back(exact_check("savage_bound", "d=2 identity c=(2,2) exact", true, b, exact));
    out.push_back(mc_check("savage_bound", "d=2 identity c=(2,2) monte-carlo", b,
                           bivariate_hits(1, 0, 1, 2, 2, S, split_seed(options.seed, stream++)), S));
  }
  for (double rho : {0.3, 0.6})
    for (double c : {1.5, 2.5}) {
      const double b = savage_bound({{1.0, rho}, {rho, 1.0}}, {c, c});
      out.push_back(mc_check("savage_bound", fmt("d=2 rho=%g c=(%g,%g)", rho, c, c), b,
                             bivariate_hits(1, rho, 1, c, c, S, split_seed(options.seed, stream++)), S));
    }

  for (int K : {4, 5, 6})
    for (int l = 2; l <= K - 1; ++l)
      for (double g : {0.5, 1.0}) {
        const double ck = static_cast<double>(choose2(K));
        const double cl = static_cast<double>(choose2(l));
        const double b = bivariate_correlated_bound(K, l, g);
        out.push_back(mc_check("bivariate_correlated_bound", fmt("K=%g l=%g gamma=%g", K, l, g), b,
                               bivariate_hits(ck, cl, ck, g * ck, g * ck, S, split_seed(options.seed, stream++)), S));
      }
  return out;
}

}  // namespace dks
