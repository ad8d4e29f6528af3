#include <doctest.h>

#include <cmath>
#include <vector>

#include "dks/asymptotics.hpp"
#include "dks/combinatorics.hpp"
#include "dks/disorder.hpp"
#include "dks/errors.hpp"
#include "dks/ogp.hpp"
#include "dks/rng.hpp"
#include "dks/solver.hpp"

using namespace dks;

namespace {

OverlapProfile synthetic(const std::vector<double>& psi, bool exact = true) {
  OverlapProfile p;
  p.K = static_cast<int>(psi.size()) - 1;
  for (int z = 0; z <= p.K; ++z) {
    ProfileEntry e;
    e.z = z;
    e.feasible = true;
    e.solution.value = psi[z];
    e.solution.exact = exact;
    p.entries.push_back(e);
  }
  return p;
}

}  // namespace

TEST_CASE("constructed OGP witness") {
  const int K = 8;
  std::vector<double> psi(K + 1, 1.0);
  psi[0] = psi[K] = 10.0;
  const auto d = ogp_witness(synthetic(psi), {2.0, K - 2.0, 2.0, 9.0});
  CHECK(d.part1);
  CHECK(d.part2);
  CHECK_FALSE(d.indeterminate);
  CHECK(d.violating_z.empty());

  const auto c = ogp_witness(synthetic(std::vector<double>(K + 1, 5.0)), {2.0, 6.0, 4.9, 5.0});
  CHECK_FALSE(c.part2);
  CHECK(c.violating_z == std::vector<int>{2, 3, 4, 5, 6});
  CHECK_THROWS_AS(ogp_witness(synthetic(psi), {3.0, 3.0, 1.0, 2.0}), InvalidArgument);
}

TEST_CASE("inexact solves inside the band make part 2 indeterminate") {
  std::vector<double> psi{10, 1, 1, 1, 10};
  auto p = synthetic(psi);
  p.entries[2].solution.exact = false;
  const auto d = ogp_witness(p, {1.0, 3.0, 2.0, 9.0});
  CHECK_FALSE(d.part2);
  CHECK(d.indeterminate);
  p.entries[2].solution.value = 5.0;  // a lower bound above r1 still refutes part 2
  const auto e = ogp_witness(p, {1.0, 3.0, 2.0, 9.0});
  CHECK_FALSE(e.part2);
  CHECK_FALSE(e.indeterminate);
}

TEST_CASE("witness verdicts are monotone in the thresholds") {
  SplitMix64 rng(31);
  for (int t = 0; t < 300; ++t) {
    const int K = 4 + static_cast<int>(rng.below(8));
    std::vector<double> psi(K + 1);
    for (double& v : psi) v = 20.0 * rng.uniform();
    const auto p = synthetic(psi);
    const double z1 = 1.0 + static_cast<double>(rng.below(K / 2));
    const double z2 = z1 + 1.0 + static_cast<double>(rng.below(K - static_cast<int>(z1)));
    const double r1 = 10.0 * rng.uniform(), r2 = r1 + 3.1 + 10.0 * rng.uniform();
    const auto base = ogp_witness(p, {z1, z2, r1, r2});
    const auto raised = ogp_witness(p, {z1, z2, r1 + 3.0, r2 + 3.0});
    const auto lowered = ogp_witness(p, {z1, z2, r1 - 0.05, r2 - 3.0});
    if (base.part2) CHECK(raised.part2);
    if (base.part1) CHECK(lowered.part1);
  }
}

TEST_CASE("dip at n=1e6, K=1e3") {
  const long long n = 1000000, K = 1000;
  const auto d = dip_locator(n, K, 0.1);
  REQUIRE(d.found);
  CHECK(d.margin > 0.0);
  CHECK(d.margin_klogk == doctest::Approx(d.margin / (K * std::log(static_cast<double>(K)))));
  CHECK(d.margin_klogk > 0.0);
  CHECK(d.interval_lo < d.interval_hi);
  CHECK(d.rises_again);
  const double s = std::sqrt(K * std::log(static_cast<double>(K)));
  CHECK(d.window_lo <= std::max<long long>(curve_min_z(n, K), static_cast<long long>(s / 10)));
  CHECK(d.window_hi >= std::min<long long>(static_cast<long long>(0.9 * K), static_cast<long long>(10 * s)));
  double mx = -INFINITY;
  for (long long z = d.interval_lo; z <= d.interval_hi; ++z) mx = std::max(mx, *first_moment_curve(n, K, z));
  CHECK(std::abs(d.margin - (*first_moment_curve(n, K, d.z0) - mx)) <= 1e-9);
  // Frozen observation from the exact curve scan.
  CHECK(d.z0 == 2);
  CHECK(d.z_star == 19);
  CHECK(d.margin == doctest::Approx(17.997).epsilon(1e-4));
}

TEST_CASE("no dip where the curve is undefined") {
  const auto d = dip_locator(60, 8, 0.1);
  CHECK_FALSE(d.found);
}

TEST_CASE("curve domination on small Bernoulli instances") {
  const auto r = curve_dominates_profile(40, 6, DistributionSpec::bernoulli_half(), 10, 7, {}, 1);
  CHECK(r.frequency == 1.0);
  CHECK(r.compared == r.dominated);
  int undefined = 0;
  for (const auto& c : r.per_z) {
    undefined += c.undefined;
    CHECK(c.compared + c.undefined + c.budget_excluded == 10);
  }
  CHECK(undefined == r.undefined_pairs);
  // z = K is always compared and always an equality.
  CHECK(r.per_z.back().z == 6);
  CHECK(r.per_z.back().compared == 10);
  CHECK(r.per_z.back().dominated == 10);
  CHECK_THROWS_AS(curve_dominates_profile(40, 6, DistributionSpec::gaussian_half_quarter(), 2, 1), HypothesisError);
}

TEST_CASE("decomposition lower bound") {
  const auto m = plant_clique(sample_disorder(30, DistributionSpec::bernoulli_half(), 4), 6, 1.0);
  const auto full = decomposition_lower_bound(m, 6, 6, 4.0 * std::sqrt(std::log(30.0)));
  CHECK(full.lhs == 15.0);
  CHECK(full.rhs == 15.0);
  CHECK(full.holds);
  int holds = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto g = plant_clique(sample_disorder(30, DistributionSpec::gaussian_half_quarter(), seed), 6, 1.0);
    const auto d = decomposition_lower_bound(g, 6, 3, 4.0 * std::sqrt(std::log(30.0)));
    holds += d.holds;
    CHECK_FALSE(d.indeterminate);
  }
  MESSAGE("gaussian decomposition n=30 K=6 m=3 holds on " << holds << "/10");
  CHECK_THROWS_AS(decomposition_lower_bound(sample_disorder(10, DistributionSpec::bernoulli_half(), 1), 3, 1, 1.0),
                  MissingPlantError);
}

TEST_CASE("OGP experiment plumbing") {
  OgpConfig c;
  c.n = 30;
  c.K = 5;
  c.trials = 0;
  const auto empty = run_ogp_experiment(c);
  CHECK(empty.instances.empty());
  c.trials = 3;
  c.threads = 1;
  const auto r = run_ogp_experiment(c);
  REQUIRE(r.instances.size() == 3);
  for (const auto& in : r.instances) {
    CHECK(in.status == "ok");
    CHECK(in.z_half == 2);  // floor(5/2)
    CHECK(in.profile.at(5)->solution.value == 10.0);
    CHECK(in.gap_statistic == doctest::Approx(std::min(in.psi_low, in.psi_half) - in.interval_max));
  }
  c.threads = 2;
  const auto again = run_ogp_experiment(c);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(again.instances[i].seed == r.instances[i].seed);
    CHECK(again.instances[i].profile.max_psi() == r.instances[i].profile.max_psi());
  }
}
