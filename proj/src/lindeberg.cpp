#include "dks/lindeberg.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>

#include "dks/combinatorics.hpp"
#include "dks/errors.hpp"
#include "dks/parallel.hpp"
#include "dks/rng.hpp"
#include "dks/solver.hpp"

namespace dks {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_partition(int n, int K, double beta) {
  if (K < 2 || K > n) throw DimensionError("need 2 <= K <= n");
  if (!(beta > 0.0)) throw DomainError("beta must be positive");
  if (binomial(n, K) > kPartitionLimit) throw ResourceError("partition sum needs C(n,K) <= 1e7");
}

// Calls fn(set, Z_S) for every K-subset of {0..n-1} with set sorted.
template <class Fn>
void for_each_subset(const DisorderMatrix& m, int K, Fn&& fn) {
  const int n = m.n();
  const auto& w = m.weights();
  std::vector<int> s(K);
  std::iota(s.begin(), s.end(), 0);
  do {
    double z = 0.0;
    for (int a = 0; a < K; ++a)
      for (int b = a + 1; b < K; ++b) z += w[pair_index(n, s[a], s[b])];
    fn(s, z);
  } while (next_combination_lex(s, n));
}

double max_density(const DisorderMatrix& m, int K) {
  double best = kNegInf;
  for_each_subset(m, K, [&](const std::vector<int>&, double z) { best = std::max(best, z); });
  return best;
}

bool contains_edge(const std::vector<int>& s, int i, int j) {
  return std::binary_search(s.begin(), s.end(), i) && std::binary_search(s.begin(), s.end(), j);
}

}  // namespace

GibbsState gibbs_state(const DisorderMatrix& matrix, int K, double beta) {
  const int n = matrix.n();
  check_partition(n, K, beta);
  GibbsState g;
  g.K = K;
  g.beta = beta;
  g.max_density = max_density(matrix, K);
  g.edge_weights.assign(pair_count(n), 0.0);
  double partition = 0.0;
  for_each_subset(matrix, K, [&](const std::vector<int>& s, double z) {
    const double x = std::exp(beta * (z - g.max_density));
    partition += x;
    for (int a = 0; a < K; ++a)
      for (int b = a + 1; b < K; ++b) g.edge_weights[pair_index(n, s[a], s[b])] += x;
  });
  for (double& u : g.edge_weights) u /= partition;
  g.log_partition = beta * g.max_density + std::log(partition);
  g.smooth_max = g.log_partition / beta;
  return g;
}

double smooth_max(const DisorderMatrix& matrix, int K, double beta) {
  check_partition(matrix.n(), K, beta);
  const double top = max_density(matrix, K);
  double partition = 0.0;
  for_each_subset(matrix, K, [&](const std::vector<int>&, double z) { partition += std::exp(beta * (z - top)); });
  return top + std::log(partition) / beta;
}

double gibbs_edge_weight(const DisorderMatrix& matrix, int K, double beta, int i, int j) {
  const int n = matrix.n();
  check_partition(n, K, beta);
  if (i == j || i < 0 || j < 0 || i >= n || j >= n) throw VertexError("invalid edge");
  if (i > j) std::swap(i, j);
  std::vector<int> others;
  for (int v = 0; v < n; ++v)
    if (v != i && v != j) others.push_back(v);
  // U(e): sets {i, j} + T over (K-2)-subsets T of the other vertices.
  double log_u = kNegInf;
  std::vector<int> t(K - 2), s;
  std::iota(t.begin(), t.end(), 0);
  do {
    s = {i, j};
    for (int idx : t) s.push_back(others[idx]);
    std::sort(s.begin(), s.end());
    log_u = log_add_exp(log_u, beta * subset_density(matrix, s));
  } while (K > 2 && next_combination_lex(t, n - 2));
  const double log_p = beta * smooth_max(matrix, K, beta);
  return std::exp(log_u - log_p);
}

Derivatives smooth_max_derivatives(const DisorderMatrix& matrix, int K, double beta, int i, int j) {
  const int n = matrix.n();
  check_partition(n, K, beta);
  if (i == j || i < 0 || j < 0 || i >= n || j >= n) throw VertexError("invalid edge");
  if (i > j) std::swap(i, j);
  const double top = max_density(matrix, K);
  double U = 0.0, V = 0.0;
  for_each_subset(matrix, K, [&](const std::vector<int>& s, double z) {
    (contains_edge(s, i, j) ? U : V) += std::exp(beta * (z - top));
  });
  const double P = U + V;
  const double u = U / P, v = V / P;
  return {u, beta * u * v, beta * beta * u * v * (v - u)};
}

double gibbs_sum_identity(const DisorderMatrix& matrix, int K, double beta) {
  const auto g = gibbs_state(matrix, K, beta);
  double total = 0.0;
  for (double u : g.edge_weights) total += u;
  return std::abs(total - static_cast<double>(choose2(K)));
}

InterpolationPlan make_plan(int n, const DistributionSpec& target, std::uint64_t seed) {
  if (n < 2) throw DimensionError("interpolation plan needs n >= 2");
  InterpolationPlan plan;
  plan.n = n;
  plan.seed = seed;
  plan.x_weights = sample_disorder(n, DistributionSpec::gaussian_half_quarter(), split_seed(seed, 0)).weights();
  plan.y_weights = sample_disorder(n, target, split_seed(seed, 1)).weights();
  plan.edge_order.resize(pair_count(n));
  std::iota(plan.edge_order.begin(), plan.edge_order.end(), 0);
  SplitMix64 rng(split_seed(seed, 2));
  for (std::size_t k = plan.edge_order.size(); k > 1; --k) std::swap(plan.edge_order[k - 1], plan.edge_order[rng.below(k)]);
  return plan;
}

std::vector<double> interpolation_path(const InterpolationPlan& plan, int K, double beta) {
  const std::size_t N = pair_count(plan.n);
  if (plan.x_weights.size() != N || plan.y_weights.size() != N || plan.edge_order.size() != N)
    throw DimensionError("interpolation plan vectors must have n(n-1)/2 entries");
  std::vector<char> seen(N, 0);
  for (int e : plan.edge_order) {
    if (e < 0 || static_cast<std::size_t>(e) >= N || seen[e]) throw InvalidArgument("edge order is not a permutation");
    seen[e] = 1;
  }
  std::vector<double> w = plan.y_weights;
  std::vector<double> path;
  path.reserve(N + 1);
  DisorderMatrix base(plan.n, w);
  path.push_back(smooth_max(base, K, beta));
  for (std::size_t l = 0; l < N; ++l) {
    w[plan.edge_order[l]] = plan.x_weights[plan.edge_order[l]];
    path.push_back(smooth_max(base.with_weights(w), K, beta));
  }
  return path;
}

MultiplicityCheck aggregated_multiplicity_check(int n, int K, double beta, const std::vector<double>& x_weights,
                                                const std::vector<double>& y_weights) {
  const std::size_t N = pair_count(n);
  if (N > 7) throw ResourceError("multiplicity check enumerates N! orders and needs N <= 7");
  if (x_weights.size() != N || y_weights.size() != N) throw DimensionError("weight vectors must have n(n-1)/2 entries");
  const std::size_t states = std::size_t{1} << N;

  // Gibbs weights of every mixed state; bit e set means edge e carries X.
  std::vector<std::vector<double>> gibbs(states);
  for (std::size_t mask = 0; mask < states; ++mask) {
    std::vector<double> w(N);
    for (std::size_t e = 0; e < N; ++e) w[e] = (mask >> e) & 1 ? x_weights[e] : y_weights[e];
    gibbs[mask] = gibbs_state(DisorderMatrix(n, std::move(w)), K, beta).edge_weights;
  }

  MultiplicityCheck out;
  std::vector<int> sigma(N);
  std::iota(sigma.begin(), sigma.end(), 0);
  do {
    std::size_t mask = 0;
    for (std::size_t l = 0; l < N; ++l) {
      const int e = sigma[l];
      const std::size_t next = mask | (std::size_t{1} << e);
      out.lhs += gibbs[next][e] + gibbs[mask][e];
      mask = next;
    }
  } while (std::next_permutation(sigma.begin(), sigma.end()));

  std::vector<double> fact(N + 1, 1.0);
  for (std::size_t k = 1; k <= N; ++k) fact[k] = fact[k - 1] * static_cast<double>(k);
  for (std::size_t mask = 0; mask < states; ++mask) {
    const std::size_t p = static_cast<std::size_t>(std::popcount(mask));
    const std::size_t q = N - p;
    double contrib = 0.0;
    for (std::size_t e = 0; e < N; ++e) {
      const bool from_x = (mask >> e) & 1;
      const double mult = from_x ? fact[p] * fact[q] / static_cast<double>(p) : fact[p] * fact[q] / static_cast<double>(q);
      contrib += mult * gibbs[mask][e];
    }
    out.rhs += contrib;
    if (p == 0) out.b0 = contrib;
    if (q == 0) out.bN = contrib;
  }
  out.residual = std::abs(out.lhs - out.rhs);
  return out;
}

double default_beta(int n, int K) {
  if (n < 2 || K < 1) throw DomainError("default_beta needs n >= 2, K >= 1");
  return std::cbrt(1.0 / (2.0 * K * std::sqrt(std::log(static_cast<double>(n)))));
}

UniversalityGap universality_gap(int n, int K, double beta, const DistributionSpec& dist, int trials,
                                 std::uint64_t seed, int threads) {
  dist.validate();
  if (!dist.matches_universality_moments())
    throw HypothesisError("universality comparison needs mean 1/2 and second moment 1/2");
  if (trials < 0) throw InvalidArgument("trials must be nonnegative");
  if (K < 2 || K > n) throw DimensionError("need 2 <= K <= n");
  const bool smooth = binomial(n, K) <= kPartitionLimit;
  const auto gauss = DistributionSpec::gaussian_half_quarter();
  std::vector<double> psi_g(trials), psi_o(trials), f_g(trials, 0.0), f_o(trials, 0.0);
  parallel_for(static_cast<std::size_t>(trials), threads, [&](std::size_t i) {
    const std::uint64_t s = split_seed(seed, i);
    const auto x = sample_disorder(n, gauss, s);
    const auto y = sample_disorder(n, dist, s);
    psi_g[i] = psi_exact(x, K).value;
    psi_o[i] = psi_exact(y, K).value;
    if (smooth) {
      f_g[i] = smooth_max(x, K, beta);
      f_o[i] = smooth_max(y, K, beta);
    }
  });
  auto paired = [trials](const std::vector<double>& a, const std::vector<double>& b, double& mean_diff, double& ci) {
    mean_diff = 0.0;
    for (int i = 0; i < trials; ++i) mean_diff += a[i] - b[i];
    mean_diff /= std::max(1, trials);
    double ss = 0.0;
    for (int i = 0; i < trials; ++i) ss += (a[i] - b[i] - mean_diff) * (a[i] - b[i] - mean_diff);
    ci = trials > 1 ? 1.96 * std::sqrt(ss / (trials - 1) / trials) : 0.0;
  };
  UniversalityGap out;
  out.trials = trials;
  out.beta = beta;
  for (int i = 0; i < trials; ++i) {
    out.mean_gaussian += psi_g[i];
    out.mean_other += psi_o[i];
  }
  if (trials > 0) {
    out.mean_gaussian /= trials;
    out.mean_other /= trials;
  }
  double d = 0.0;
  paired(psi_g, psi_o, d, out.ci_halfwidth);
  out.gap_estimate = std::abs(d);
  paired(f_g, f_o, d, out.smooth_ci_halfwidth);
  out.smooth_gap = std::abs(d);
  out.budget = std::pow(static_cast<double>(K), 4.0 / 3.0) * std::pow(std::log(static_cast<double>(n)), 7.0 / 6.0);
  return out;
}

}  // namespace dks
