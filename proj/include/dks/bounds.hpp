#pragma once

#include <optional>
#include <vector>

#include "dks/disorder.hpp"

namespace dks {

/// Universal constant for Rademacher-vs-Gaussian tail domination (1 + 14.10, rounded up).
inline constexpr double kRademacherTheta = 15.11;

struct TailPair {
  double upper = 0.0;
  double lower = 0.0;
};

/// Exact P(N(0,1) >= x).
double normal_sf(double x);
/// log P(N(0,1) >= x), accurate far into the tail.
double log_normal_sf(double x);

/// Mills-ratio bounds on P(N(0,1) >= x), x > 0.
TailPair gaussian_tail(double x);

/// theta * P(N(0,1) >= x) for x >= 1, dominating P(S_n >= x sqrt n).
double rademacher_gaussian_domination(int n, double x);

/// Exact P(S_n >= t) for a sum of n Rademacher signs (closed comparison).
double rademacher_tail(int n, double t);
double log_rademacher_tail(int n, double t);

/// 3(N0+Nh) exp(-g^2/(1+rho)), g = beta/sqrt(N0+Nh), rho = N0/(N0+Nh): bounds
/// P(X1 >= beta, X2 >= beta) when X1, X2 share N0 signs and each has Nh own signs.
double joint_rademacher_bound(long long n0, long long n_hat, double beta);

struct BinomialLowerTail {
  double expansion = 0.0;  // exp(-g^2/2 - g^4/(12n)) / sqrt(2n)
  // exp(-n D(l||1/2)) / sqrt(8 n l (1-l)) at the lattice point l = ceil(lambda n)/n,
  // lambda = 1/2 + g/(2 sqrt n). The binomial-sum inequality only holds for
  // integer l n; 0 when l = 1.
  double kl_exact = 0.0;
  double kl_unrounded = 0.0;  // same expression at lambda itself; not a valid bound in general
};

/// Two lower bounds on P(S_n >= g sqrt n), 0 < g < sqrt n.
BinomialLowerTail binomial_lower_tail(int n, double gamma);

/// x log(x/p) + (1-x) log((1-x)/(1-p)); +inf when the support does not match.
double kl_divergence(double x, double p);

/// Multivariate upper-orthant bound P(X >= c) for X ~ N(0, Sigma):
/// (prod Delta_i)^{-1} |Sigma^{-1}|^{1/2} (2 pi)^{-d/2} exp(-c' Sigma^{-1} c / 2), Delta = Sigma^{-1} c.
/// Throws HypothesisError when Sigma is not positive definite or some Delta_i <= 0.
double savage_bound(const std::vector<std::vector<double>>& sigma, const std::vector<double>& c);

/// Savage's bound specialised to variance C(K,2), covariance C(l,2),
/// threshold gamma C(K,2); 2 <= l <= K-1.
double bivariate_correlated_bound(long long K, long long l, double gamma);

struct ConcentrationBounds {
  double talagrand = 1.0;  // min(1, 4 exp(-t^2/(4K^2)))
  bool talagrand_hypothesis_met = false;  // t >= 32 sqrt(pi) K
  double borell_tis = 1.0;  // min(1, exp(-t^2/(2 sigma^2)))
};

ConcentrationBounds concentration_bounds(long long K, double t, double sigma_sq);

/// Tail of Z_S >= gamma C(K,2) for a single K-set, in log space.
struct SetTail {
  double log_p = 0.0;
  bool exact = true;  // false when a domination bound replaced the exact tail
};

SetTail set_tail(long long K, double gamma, const DistributionSpec& dist);

struct FirstMoment {
  double log_value = 0.0;  // log E[U_gamma]
  double value = 0.0;      // exp(log_value), inf if not representable
  bool exact = true;
};

/// E[U_gamma] = C(n,K) P(Z_S >= gamma C(K,2)).
FirstMoment first_moment_upper(long long n, long long K, double gamma, const DistributionSpec& dist);

/// gamma such that C(n,K) exp(-g^2 C(K,2)/2)/sqrt(K log(n/K)) = eps on the
/// centered unit-variance scale, mapped to the scale of `dist`.
double auto_gamma(long long n, long long K, double eps, const DistributionSpec& dist);

/// log of C(K,l)C(n-K,K-l)/C(n,K) * K^m * exp(g^2 C(K,2)C(l,2)/(C(K,2)+C(l,2))).
double s_term(long long n, long long K, double m, long long l, double gamma);

struct MomentReport {
  long long n = 0;
  long long K = 0;
  double gamma = 0.0;
  double first_moment = 0.0;
  double log_first_moment = 0.0;
  double a_term = 0.0;
  double log_a_term = 0.0;
  double b_upper = 0.0;
  double log_b_upper = 0.0;
  double b_bar_upper = 0.0;
  double pz_ratio_lower = 0.0;
  bool tail_exact = true;
};

/// Second-moment decomposition E[U^2] = A + B with B bounded termwise by the
/// joint Rademacher bound (Rademacher/Bernoulli) or the bivariate Gaussian
/// bound (Gaussian), each capped by the single-set tail.
MomentReport second_moment_report(long long n, long long K, double gamma, const DistributionSpec& dist);

}  // namespace dks
