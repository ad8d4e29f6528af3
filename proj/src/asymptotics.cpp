#include "dks/asymptotics.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "dks/combinatorics.hpp"
#include "dks/errors.hpp"

namespace dks {

namespace {

void check_nk(long long n, long long K) {
  if (K < 2 || K > n) throw DomainError("need 2 <= K <= n");
}

std::optional<double> root_of(long long K, double log_arg) {
  if (!(log_arg >= 0.0)) return std::nullopt;
  return std::sqrt(2.0 * static_cast<double>(choose2(K)) * log_arg);
}

}  // namespace

std::optional<double> v_nk(long long n, long long K) {
  check_nk(n, K);
  return root_of(K, log_binomial(n, K));
}

std::optional<double> l_nk(long long n, long long K) {
  check_nk(n, K);
  return root_of(K, log_binomial(n, K) - std::log(static_cast<double>(K)));
}

std::optional<double> u_nk(long long n, long long K) {
  check_nk(n, K);
  const double inner = static_cast<double>(K) * std::log(static_cast<double>(n) / K);
  if (!(inner > 0.0)) return std::nullopt;
  return root_of(K, log_binomial(n, K) - 0.5 * std::log(inner));
}

AsymptoticEstimates estimates(long long n, long long K) {
  AsymptoticEstimates e{n, K, v_nk(n, K), l_nk(n, K), u_nk(n, K), std::nullopt};
  if (K < n) e.leading = leading_asymptotic(n, K);
  return e;
}

double binary_entropy(double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("binary_entropy needs x in [0,1]");
  double h = 0.0;
  if (x > 0.0) h -= x * std::log(x);
  if (x < 1.0) h -= (1.0 - x) * std::log1p(-x);
  return h;
}

double inverse_entropy(double y) {
  if (!(y >= 0.0 && y <= std::numbers::ln2 + 1e-15))
    throw DomainError("inverse_entropy needs y in [0, ln 2]");
  double lo = 0.5;  // h(lo) >= y
  double hi = 1.0;  // h(hi) <= y
  while (hi - lo > 1e-13) {
    const double mid = 0.5 * (lo + hi);
    if (binary_entropy(mid) >= y)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

double inverse_entropy_expansion(double eps) {
  if (!(eps >= 0.0)) throw DomainError("inverse_entropy_expansion needs eps >= 0");
  return 0.5 + std::sqrt(eps / 2.0) - std::pow(eps, 1.5) / (6.0 * std::numbers::sqrt2);
}

long long curve_min_z(long long n, long long K) { return (K * K) / n; }

double curve_ratio(long long n, long long K, long long z) {
  const double count = log_binomial(K, z) + log_binomial(n - K, K - z);
  return count / static_cast<double>(choose2(K) - choose2(z));
}

std::optional<double> first_moment_curve(long long n, long long K, long long z) {
  check_nk(n, K);
  if (z < 0 || z > K) throw DomainError("overlap z=" + std::to_string(z) + " outside [0, K]");
  if (z == K) return static_cast<double>(choose2(K));
  if (K - z > n - K) return std::nullopt;
  const double arg = std::numbers::ln2 - curve_ratio(n, K, z);
  if (!(arg >= 0.0 && arg <= std::numbers::ln2)) return std::nullopt;
  const double span = static_cast<double>(choose2(K) - choose2(z));
  return static_cast<double>(choose2(z)) + inverse_entropy(arg) * span;
}

std::optional<double> curve_increment(long long n, long long K, long long z) {
  const auto a = first_moment_curve(n, K, z);
  const auto b = first_moment_curve(n, K, z + 1);
  if (!a || !b) return std::nullopt;
  return *b - *a;
}

std::optional<double> gaussian_first_moment_curve(long long n, long long K, long long z) {
  if (z >= K) throw DomainError("the Gaussian curve correction is defined for z < K");
  const auto base = first_moment_curve(n, K, z);
  if (!base) return std::nullopt;
  const double delta = std::pow(curve_ratio(n, K, z), 1.25);
  return *base + delta * static_cast<double>(choose2(K) - choose2(z));
}

double leading_asymptotic(long long n, long long K) {
  if (K < 2 || K >= n) throw DomainError("leading_asymptotic needs 2 <= K < n");
  const double k = static_cast<double>(K);
  return k * k / 4.0 + std::pow(k, 1.5) * std::sqrt(std::log(static_cast<double>(n) / k)) / 2.0;
}

IdentityCheck verify_identity(IdentityKind kind, long long n, long long K, long long l) {
  switch (kind) {
    case IdentityKind::Vandermonde: {
      if (K < 0 || K > n || n > 64) throw DomainError("Vandermonde check needs 0 <= K <= n <= 64");
      u128 sum = 0;
      for (long long j = 0; j <= K; ++j)
        if (K - j <= n - K) sum += binomial_exact(int(K), int(j)) * binomial_exact(int(n - K), int(K - j));
      const u128 total = binomial_exact(int(n), int(K));
      const double diff = sum >= total ? static_cast<double>(sum - total) : static_cast<double>(total - sum);
      return {sum == total, diff};
    }
    case IdentityKind::BinomRatio: {
      if (K < 0 || K > n || l < 0 || l > K || K - l > n - K)
        throw DomainError("BinomRatio needs 0 <= l <= K <= n and K - l <= n - K");
      const double lhs = log_binomial(n, l) + log_binomial(n - l, K - l) +
                         log_binomial(n - K, K - l) - 2.0 * log_binomial(n, K);
      const double rhs = log_binomial(K, l) + log_binomial(n - K, K - l) - log_binomial(n, K);
      const double residual = std::abs(lhs - rhs);
      return {residual <= 1e-9 * std::max(1.0, std::abs(rhs)), residual};
    }
    case IdentityKind::WBound: {
      if (K < 1 || K >= n || l < 1 || l >= K) throw DomainError("WBound needs 1 <= l < K < n");
      const double N = static_cast<double>(n), k = static_cast<double>(K), L = static_cast<double>(l);
      const double eta = L * N / (k * k);
      if (eta > N / k) throw DomainError("WBound needs eta <= n/K");
      const double log_lhs = L * (std::log(k / L) + 1.0) + (k - L) * (std::log((N - k) / (k - L)) + 1.0) +
                             k * std::log(k / N) + (N - k) * std::log((N - k) / N);
      const double w = L * (-std::log(eta) + 1.0 + k / N);
      const double slack = w - log_lhs;
      return {slack >= -1e-9 * std::max(1.0, std::abs(w)), slack};
    }
  }
  return {};
}

}  // namespace dks
