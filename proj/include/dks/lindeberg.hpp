#pragma once

#include <cstdint>
#include <vector>

#include "dks/disorder.hpp"

namespace dks {

/// Largest C(n,K) for exact partition sums.
inline constexpr double kPartitionLimit = 1e7;

struct GibbsState {
  int K = 0;
  double beta = 0.0;
  double log_partition = 0.0;  // log sum_S exp(beta Z_S)
  double max_density = 0.0;    // max_S Z_S
  double smooth_max = 0.0;     // log_partition / beta
  std::vector<double> edge_weights;  // U(e)/P per pair index
};

/// Single enumeration pass: partition function, maximum and all Gibbs edge weights.
GibbsState gibbs_state(const DisorderMatrix& matrix, int K, double beta);

/// f_beta(Z) = (1/beta) log sum_{|S|=K} exp(beta Z_S).
double smooth_max(const DisorderMatrix& matrix, int K, double beta);

/// U(e)/P, with U(e) summed over the C(n-2,K-2) sets containing e = {i, j}.
double gibbs_edge_weight(const DisorderMatrix& matrix, int K, double beta, int i, int j);

struct Derivatives {
  double d1 = 0.0;  // U/P
  double d2 = 0.0;  // beta U V / P^2
  double d3 = 0.0;  // beta^2 U V (V - U) / P^3
};

/// Partial derivatives of f_beta in the weight of edge {i, j}; U and V are
/// accumulated separately so 1 - U/P never cancels.
Derivatives smooth_max_derivatives(const DisorderMatrix& matrix, int K, double beta, int i, int j);

/// |sum_e U(e)/P - C(K,2)|.
double gibbs_sum_identity(const DisorderMatrix& matrix, int K, double beta);

struct InterpolationPlan {
  int n = 0;
  std::vector<int> edge_order;     // permutation of pair indices
  std::vector<double> x_weights;   // N(1/2, 1/4) draws
  std::vector<double> y_weights;   // target-law draws
  std::uint64_t seed = 0;
};

/// Random edge order plus independent X (Gaussian) and Y (`target`) weights.
InterpolationPlan make_plan(int n, const DistributionSpec& target, std::uint64_t seed);

/// f_beta(W^0), ..., f_beta(W^N): W^l takes its first l edges (in plan
/// order) from X and the rest from Y.
std::vector<double> interpolation_path(const InterpolationPlan& plan, int K, double beta);

struct MultiplicityCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double residual = 0.0;
  double b0 = 0.0;  // rhs contribution of the all-Y state
  double bN = 0.0;  // rhs contribution of the all-X state
};

/// Sum over all N! edge orders of the per-step Gibbs weights, against the
/// state-by-state count (each state with p X-edges is passed p!q! times).
/// Requires N = n(n-1)/2 <= 7.
MultiplicityCheck aggregated_multiplicity_check(int n, int K, double beta, const std::vector<double>& x_weights,
                                                const std::vector<double>& y_weights);

/// (1 / (2 K sqrt(log n)))^{1/3}, the minimiser of the interpolation error budget.
double default_beta(int n, int K);

struct UniversalityGap {
  int trials = 0;
  double beta = 0.0;
  double mean_gaussian = 0.0;
  double mean_other = 0.0;
  double gap_estimate = 0.0;   // |mean Psi(Gaussian) - mean Psi(other)|
  double ci_halfwidth = 0.0;   // 1.96 * standard error of the paired differences
  double smooth_gap = 0.0;     // same for f_beta
  double smooth_ci_halfwidth = 0.0;
  double budget = 0.0;         // K^{4/3} (log n)^{7/6}
};

/// Paired comparison of Psi_K under N(1/2,1/4) and `dist` over `trials`
/// instances that share a per-trial seed. `threads` = 0 uses the default pool.
UniversalityGap universality_gap(int n, int K, double beta, const DistributionSpec& dist, int trials,
                                 std::uint64_t seed, int threads = 0);

}  // namespace dks
