#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dks/disorder.hpp"
#include "dks/solver.hpp"

namespace dks {

struct OgpParameters {
  double zeta1 = 0.0;
  double zeta2 = 0.0;
  double r1 = 0.0;
  double r2 = 0.0;
};

struct OgpDiagnosis {
  bool part1 = false;  // some z <= zeta1 and some z >= zeta2 reach r2
  bool part2 = false;  // every z in [zeta1, zeta2] stays <= r1
  bool indeterminate = false;  // part 2 depends on an inexact or unsolved z in the band
  std::vector<int> violating_z;  // z in the band with Psi > r1
};

/// Checks both conditions of the overlap gap property on a computed profile.
/// Inexact solves are lower bounds: they can witness part 1 or refute part 2
/// but never confirm part 2.
OgpDiagnosis ogp_witness(const OverlapProfile& profile, const OgpParameters& params);

struct DipResult {
  bool found = false;
  long long z0 = 0;
  long long window_lo = 0;
  long long window_hi = 0;
  long long z_star = 0;  // deepest point of the curve in the window
  long long interval_lo = 0;
  long long interval_hi = 0;
  double gamma_z0 = 0.0;
  double margin = 0.0;          // Gamma(z0) - max over the interval
  double margin_klogk = 0.0;    // margin / (K log K)
  bool rises_again = false;     // Gamma(floor((1-eps)K)) >= Gamma(z0)
};

/// Locates the dip of the first-moment curve below Gamma(z0), z0 = floor(C0 K^2/n).
/// The scan window covers [sqrt(K log K)/10, 10 sqrt(K log K)] clipped to the
/// curve domain and to z <= (1-eps)K. The interval is the contiguous run around
/// the deepest point where the curve is at least half the depth below Gamma(z0).
DipResult dip_locator(long long n, long long K, double epsilon, double c0 = 2.0);

struct DominationCount {
  int z = 0;
  int compared = 0;
  int dominated = 0;
  int undefined = 0;        // curve undefined, nothing to compare
  int budget_excluded = 0;  // inexact solve, excluded
};

struct DominationResult {
  double frequency = 1.0;  // dominated / compared (1 when nothing was compared)
  int compared = 0;
  int dominated = 0;
  int undefined_pairs = 0;
  int budget_excluded = 0;
  std::vector<DominationCount> per_z;
};

/// Fraction of (instance, z) pairs with Psi_K(z) <= Gamma_K(z) over planted
/// Bern(1/2) instances. Only z with a defined curve are solved.
DominationResult curve_dominates_profile(int n, int K, const DistributionSpec& dist, int trials, std::uint64_t seed,
                                         const SolveOptions& options = {}, int threads = 0);

struct Decomposition {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
  bool indeterminate = false;
};

/// Lower bound on Psi_K(m) from an m-subset of the clique joined with the best
/// (K-m)-subset of the clique-free part G0:
///   C(m,2) + Psi_{K-m}(G0) + (K-m)m/2 - a_n sqrt((K-m)m/4)            (Bernoulli)
///   mu C(m,2) + Psi_m(PC - mu) + Psi_{K-m}(G0) + (K-m)m/2 - a_n sqrt(...)  (other laws)
Decomposition decomposition_lower_bound(const DisorderMatrix& matrix, int K, int m, double a_n,
                                        const SolveOptions& options = {});

struct OgpConfig {
  int n = 60;
  int K = 8;
  DistributionSpec dist = DistributionSpec::bernoulli_half();
  double mu = 1.0;  // clique shift for non-Bernoulli laws
  int trials = 20;
  std::uint64_t seed = 1;
  std::uint64_t budget = 0;
  double epsilon = 0.1;
  double c0 = 2.0;
  // Interval fallback in units of sqrt(K log K) when the curve has no dip.
  double d1 = 0.5;
  double d2 = 1.0;
  // r1 = r2 - c1 K log K; a negative value means "use the dip margin, or 0.05".
  double c1 = -1.0;
  int threads = 0;
};

struct OgpInstance {
  std::uint64_t seed = 0;
  OverlapProfile profile;
  int z_low = 0;
  int z_half = 0;
  double psi_low = 0.0;
  double psi_half = 0.0;
  double interval_max = 0.0;
  double gap_statistic = 0.0;  // min(psi_low, psi_half) - interval_max
  OgpDiagnosis diagnosis;
  std::string status = "ok";
};

struct OgpResult {
  OgpConfig config;
  DipResult dip;
  std::string interval_source;  // "curve-dip" or "fallback"
  int interval_lo = 0;
  int interval_hi = 0;
  double c1 = 0.0;
  std::vector<OgpInstance> instances;
};

/// Profiles, curve overlay, witness verdicts and the gap statistic for each
/// planted instance. Instance failures are recorded in `status`, not thrown.
OgpResult run_ogp_experiment(const OgpConfig& config);

}  // namespace dks
