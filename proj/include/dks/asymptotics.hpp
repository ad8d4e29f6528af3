#pragma once

#include <optional>

namespace dks {

/// Closed-form quantities. std::nullopt marks "formula out of regime"
/// (a nonpositive log argument or an entropy argument outside [0, ln 2]).
struct AsymptoticEstimates {
  long long n = 0;
  long long K = 0;
  std::optional<double> v;
  std::optional<double> l;
  std::optional<double> u;
  std::optional<double> leading;
};

std::optional<double> v_nk(long long n, long long K);
std::optional<double> l_nk(long long n, long long K);
std::optional<double> u_nk(long long n, long long K);
AsymptoticEstimates estimates(long long n, long long K);

/// h(x) = -x log x - (1-x) log(1-x), natural log.
double binary_entropy(double x);

/// Solves h(t) = y on the branch t in [1/2, 1] by bisection (abs tol 1e-13).
double inverse_entropy(double y);

/// 1/2 + sqrt(eps/2) - eps^{3/2}/(6 sqrt 2), the small-eps expansion of
/// inverse_entropy(ln 2 - eps). Intended for eps <= 0.1.
double inverse_entropy_expansion(double eps);

/// Smallest overlap on the curve's domain, floor(K^2/n).
long long curve_min_z(long long n, long long K);

/// log(C(K,z) C(n-K,K-z)) / (C(K,2) - C(z,2)), the entropy deficit driving the curve.
double curve_ratio(long long n, long long K, long long z);

/// First-moment curve Gamma_K(z); Gamma_K(K) = C(K,2). The closed form is
/// evaluated for any 0 <= z <= K; profiles and scans start at curve_min_z.
std::optional<double> first_moment_curve(long long n, long long K, long long z);

/// Gamma_K(z+1) - Gamma_K(z) from the exact curve.
std::optional<double> curve_increment(long long n, long long K, long long z);

/// Gamma_K(z) + ratio^{5/4} (C(K,2) - C(z,2)), z < K. Experimental correction
/// for the Gaussian planted model.
std::optional<double> gaussian_first_moment_curve(long long n, long long K, long long z);

/// K^2/4 + K^{3/2} sqrt(log(n/K)) / 2.
double leading_asymptotic(long long n, long long K);

enum class IdentityKind { Vandermonde, BinomRatio, WBound };

struct IdentityCheck {
  bool holds = false;
  double residual = 0.0;  // |lhs - rhs| (Vandermonde, BinomRatio) or slack W - log lhs (WBound)
};

/// Vandermonde: sum_l C(K,l) C(n-K,K-l) = C(n,K) in exact integers (n <= 64).
/// BinomRatio: C(n,l)C(n-l,K-l)C(n-K,K-l)/C(n,K)^2 = C(K,l)C(n-K,K-l)/C(n,K), log-space, 1e-9.
/// WBound: (Ke/l)^l ((n-K)e/(K-l))^{K-l} (K/n)^K ((n-K)/n)^{n-K} <= exp(l(-log eta + 1 + K/n))
///         with eta = l n / K^2, checked in log-space.
IdentityCheck verify_identity(IdentityKind kind, long long n, long long K, long long l = 0);

}  // namespace dks
