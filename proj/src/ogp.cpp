#include "dks/ogp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "dks/asymptotics.hpp"
#include "dks/combinatorics.hpp"
#include "dks/errors.hpp"
#include "dks/parallel.hpp"
#include "dks/rng.hpp"

namespace dks {

namespace {

constexpr double kDominationTolerance = 1e-9;

DisorderMatrix planted_instance(int n, int K, const DistributionSpec& dist, double mu, std::uint64_t seed) {
  return plant_clique(sample_disorder(n, dist, seed), K, mu);
}

}  // namespace

OgpDiagnosis ogp_witness(const OverlapProfile& profile, const OgpParameters& params) {
  if (!(params.zeta1 < params.zeta2)) throw InvalidArgument("OGP needs zeta1 < zeta2");
  if (!(params.r1 < params.r2)) throw InvalidArgument("OGP needs r1 < r2");
  OgpDiagnosis d;
  bool low = false, high = false, unknown_in_band = false;
  for (const auto& e : profile.entries) {
    const double z = e.z;
    const bool solved = e.feasible;
    if (solved && e.solution.value >= params.r2) {
      if (z <= params.zeta1) low = true;
      if (z >= params.zeta2) high = true;
    }
    if (z >= params.zeta1 && z <= params.zeta2) {
      if (solved && e.solution.value > params.r1)
        d.violating_z.push_back(e.z);
      else if (!solved || !e.solution.exact)
        unknown_in_band = true;
    }
  }
  d.part1 = low && high;
  d.part2 = d.violating_z.empty() && !unknown_in_band;
  d.indeterminate = d.violating_z.empty() && unknown_in_band;
  return d;
}

DipResult dip_locator(long long n, long long K, double epsilon, double c0) {
  if (K < 2 || K >= n) throw DomainError("dip_locator needs 2 <= K < n");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw DomainError("dip_locator needs 0 < eps < 1");
  DipResult r;
  const long long zmin = curve_min_z(n, K);
  r.z0 = std::max(zmin, static_cast<long long>(std::floor(c0 * static_cast<double>(K) * K / n)));
  const double s = std::sqrt(static_cast<double>(K) * std::log(static_cast<double>(K)));
  const auto cap = std::min<long long>(K - 1, static_cast<long long>(std::floor((1.0 - epsilon) * K)));
  r.window_lo = std::max(zmin, std::min(r.z0, static_cast<long long>(std::floor(s / 10.0))));
  r.window_hi = std::min(cap, static_cast<long long>(std::ceil(10.0 * s)));
  const auto g0 = first_moment_curve(n, K, r.z0);
  if (!g0 || r.window_hi <= r.z0) return r;
  r.gamma_z0 = *g0;
  if (const auto right = first_moment_curve(n, K, cap)) r.rises_again = *right >= r.gamma_z0;

  std::vector<std::optional<double>> curve(r.window_hi + 1);
  for (long long z = r.window_lo; z <= r.window_hi; ++z) curve[z] = first_moment_curve(n, K, z);
  long long zs = -1;
  for (long long z = r.z0 + 1; z <= r.window_hi; ++z)
    if (curve[z] && (zs < 0 || *curve[z] < *curve[zs])) zs = z;
  if (zs < 0) return r;
  const double depth = r.gamma_z0 - *curve[zs];
  if (!(depth > 0.0)) return r;
  const double level = r.gamma_z0 - depth / 2.0;
  long long lo = zs, hi = zs;
  while (lo - 1 > r.z0 && curve[lo - 1] && *curve[lo - 1] <= level) --lo;
  while (hi + 1 <= r.window_hi && curve[hi + 1] && *curve[hi + 1] <= level) ++hi;
  if (lo == hi) {
    // Widen to the lower neighbour so the interval has two points.
    const bool left_ok = lo - 1 > r.z0 && curve[lo - 1];
    const bool right_ok = hi + 1 <= r.window_hi && curve[hi + 1];
    if (left_ok && (!right_ok || *curve[lo - 1] <= *curve[hi + 1]))
      --lo;
    else if (right_ok)
      ++hi;
  }
  double top = *curve[lo];
  for (long long z = lo; z <= hi; ++z) top = std::max(top, *curve[z]);
  r.margin = r.gamma_z0 - top;
  if (!(r.margin > 0.0) || lo == hi) return r;
  r.found = true;
  r.z_star = zs;
  r.interval_lo = lo;
  r.interval_hi = hi;
  r.margin_klogk = r.margin / (static_cast<double>(K) * std::log(static_cast<double>(K)));
  return r;
}

DominationResult curve_dominates_profile(int n, int K, const DistributionSpec& dist, int trials, std::uint64_t seed,
                                         const SolveOptions& options, int threads) {
  if (dist.kind != DistKind::BernoulliHalf)
    throw HypothesisError("curve domination is stated for planted Bern(1/2) instances");
  if (trials < 0) throw InvalidArgument("trials must be nonnegative");
  std::vector<OverlapProfile> profiles(trials);
  parallel_for(static_cast<std::size_t>(trials), threads, [&](std::size_t i) {
    const auto m = planted_instance(n, K, dist, 0.0, split_seed(seed, i));
    profiles[i] = psi_profile(m, K, options, /*only_where_curve_defined=*/true);
  });
  DominationResult out;
  const int zmin = static_cast<int>(curve_min_z(n, K));
  for (int z = zmin; z <= K; ++z) out.per_z.push_back({z, 0, 0, 0, 0});
  for (const auto& prof : profiles) {
    for (const auto& e : prof.entries) {
      auto& c = out.per_z[e.z - zmin];
      if (!e.gamma) {
        ++c.undefined;
        continue;
      }
      if (!e.feasible) continue;
      if (!e.solution.exact) {
        ++c.budget_excluded;
        continue;
      }
      ++c.compared;
      if (e.solution.value <= *e.gamma + kDominationTolerance) ++c.dominated;
    }
  }
  for (const auto& c : out.per_z) {
    out.compared += c.compared;
    out.dominated += c.dominated;
    out.undefined_pairs += c.undefined;
    out.budget_excluded += c.budget_excluded;
  }
  out.frequency = out.compared > 0 ? static_cast<double>(out.dominated) / out.compared : 1.0;
  return out;
}

Decomposition decomposition_lower_bound(const DisorderMatrix& matrix, int K, int m, double a_n,
                                        const SolveOptions& options) {
  if (!matrix.planted()) throw MissingPlantError("decomposition bound needs a planted clique");
  if (m < 1 || m > K) throw DomainError("decomposition bound needs 0 < m <= K");
  const int n = matrix.n();
  const int kpc = matrix.planted()->K;
  const double mu = matrix.planted()->mu;
  const bool bernoulli = matrix.spec().kind == DistKind::BernoulliHalf;
  Decomposition d;
  const auto lhs = psi_overlap(matrix, K, m, options);
  d.lhs = lhs.value;
  bool exact = lhs.exact;

  std::vector<int> outside(n - kpc);
  std::iota(outside.begin(), outside.end(), kpc);
  double psi_g0 = 0.0;
  if (K - m >= 2) {
    const auto s = psi_exact(matrix.induced(outside), K - m, options);
    psi_g0 = s.value;
    exact = exact && s.exact;
  }
  const double cross = static_cast<double>(K - m) * m;
  d.rhs = psi_g0 + cross / 2.0 - a_n * std::sqrt(cross / 4.0);
  if (bernoulli) {
    d.rhs += static_cast<double>(choose2(m));
  } else {
    d.rhs += mu * static_cast<double>(choose2(m));
    if (m >= 2) {
      std::vector<int> clique(kpc);
      std::iota(clique.begin(), clique.end(), 0);
      auto pc = matrix.induced(clique);
      auto w = pc.weights();
      for (double& x : w) x -= mu;
      const auto s = psi_exact(pc.with_weights(std::move(w)), m, options);
      d.rhs += s.value;
      exact = exact && s.exact;
    }
  }
  d.holds = d.lhs >= d.rhs - kTieTolerance;
  // An inexact lhs is still attained, so it can confirm the bound but not refute it.
  d.indeterminate = !exact && !d.holds;
  return d;
}

OgpResult run_ogp_experiment(const OgpConfig& config) {
  if (config.K < 2 || config.K >= config.n) throw DimensionError("ogp experiment needs 2 <= K < n");
  if (config.trials < 0) throw InvalidArgument("trials must be nonnegative");
  OgpResult res;
  res.config = config;
  res.dip = dip_locator(config.n, config.K, config.epsilon, config.c0);
  const double s = std::sqrt(config.K * std::log(static_cast<double>(config.K)));
  const int zmin = static_cast<int>(curve_min_z(config.n, config.K));
  if (res.dip.found) {
    res.interval_source = "curve-dip";
    res.interval_lo = static_cast<int>(res.dip.interval_lo);
    res.interval_hi = static_cast<int>(res.dip.interval_hi);
  } else {
    res.interval_source = "fallback";
    res.interval_lo = std::max(zmin, static_cast<int>(std::ceil(config.d1 * s)));
    res.interval_hi = std::min(config.K, static_cast<int>(std::floor(config.d2 * s)));
    if (res.interval_hi <= res.interval_lo) res.interval_hi = std::min(config.K, res.interval_lo + 1);
  }
  res.c1 = config.c1 >= 0.0 ? config.c1 : (res.dip.found ? res.dip.margin_klogk : 0.05);
  const double klogk = config.K * std::log(static_cast<double>(config.K));

  SolveOptions opts;
  opts.node_budget = config.budget;
  res.instances.resize(config.trials);
  parallel_for(static_cast<std::size_t>(config.trials), config.threads, [&](std::size_t i) {
    OgpInstance& inst = res.instances[i];
    inst.seed = split_seed(config.seed, i);
    try {
      const auto m = planted_instance(config.n, config.K, config.dist, config.mu, inst.seed);
      inst.profile = psi_profile(m, config.K, opts);
      const auto* low = &inst.profile.entries.front();
      inst.z_low = low->z;
      inst.z_half = config.K / 2;
      const auto* half = inst.profile.at(inst.z_half);
      inst.psi_low = low->solution.value;
      inst.psi_half = half ? half->solution.value : low->solution.value;
      inst.interval_max = -std::numeric_limits<double>::infinity();
      for (const auto& e : inst.profile.entries)
        if (e.feasible && e.z >= res.interval_lo && e.z <= res.interval_hi)
          inst.interval_max = std::max(inst.interval_max, e.solution.value);
      const double r2 = std::min(inst.psi_low, inst.psi_half);
      inst.gap_statistic = r2 - inst.interval_max;
      const OgpParameters params{static_cast<double>(res.interval_lo), static_cast<double>(res.interval_hi),
                                 r2 - res.c1 * klogk, r2};
      inst.diagnosis = ogp_witness(inst.profile, params);
      if (!inst.profile.all_exact()) inst.status = "inexact";
    } catch (const std::exception& ex) {
      inst.status = std::string("error: ") + ex.what();
    }
  });
  return res;
}

}  // namespace dks
