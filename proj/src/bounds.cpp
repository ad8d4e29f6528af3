#include "dks/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Dense>

#include "dks/asymptotics.hpp"
#include "dks/combinatorics.hpp"
#include "dks/errors.hpp"

namespace dks {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
const double kLogSqrt2Pi = 0.5 * std::log(2.0 * std::numbers::pi);

// log P(Bin(N, 1/2) >= b0).
double log_binomial_upper_tail(long long N, long long b0) {
  if (b0 <= 0) return 0.0;
  if (b0 > N) return kNegInf;
  double acc = kNegInf;
  for (long long b = b0; b <= N; ++b) acc = log_add_exp(acc, log_binomial(N, b));
  return std::min(0.0, acc - static_cast<double>(N) * std::numbers::ln2);
}

long long ceil_tolerant(double x) {
  return static_cast<long long>(std::ceil(x - 1e-9 * std::max(1.0, std::abs(x))));
}

enum class Family { Rademacher, Gaussian, Other };

// Maps a threshold gamma C(K,2) on the scale of `dist` to the centered
// unit-variance scale: Rademacher and N(0,1) keep gamma, Bern(1/2) and
// N(1/2,1/4) use 2 gamma - 1.
Family family_of(const DistributionSpec& dist, double gamma, double& centered_gamma) {
  switch (dist.kind) {
    case DistKind::Rademacher:
      centered_gamma = gamma;
      return Family::Rademacher;
    case DistKind::BernoulliHalf:
      centered_gamma = 2.0 * gamma - 1.0;
      return Family::Rademacher;
    case DistKind::GaussianStd:
      centered_gamma = gamma;
      return Family::Gaussian;
    case DistKind::GaussianHalfQuarter:
      centered_gamma = 2.0 * gamma - 1.0;
      return Family::Gaussian;
    case DistKind::BoundedCustom:
      break;
  }
  centered_gamma = gamma;
  return Family::Other;
}

}  // namespace

double normal_sf(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

double log_normal_sf(double x) {
  if (x < 25.0) return std::log(normal_sf(x));
  // Asymptotic Mills series; relative error below 1e-12 past x = 25.
  const double x2 = x * x;
  const double series = 1.0 - 1.0 / x2 + 3.0 / (x2 * x2) - 15.0 / (x2 * x2 * x2) + 105.0 / (x2 * x2 * x2 * x2);
  return -0.5 * x2 - std::log(x) - kLogSqrt2Pi + std::log(series);
}

TailPair gaussian_tail(double x) {
  if (!(x > 0.0)) throw DomainError("gaussian_tail needs x > 0");
  const double phi = std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
  return {phi / x, x / (1.0 + x * x) * phi};
}

double rademacher_gaussian_domination(int n, double x) {
  if (n < 1) throw DomainError("rademacher_gaussian_domination needs n >= 1");
  if (!(x >= 1.0)) throw DomainError("rademacher_gaussian_domination needs x >= 1");
  return kRademacherTheta * normal_sf(x);
}

double log_rademacher_tail(int n, double t) {
  if (n < 1) throw DomainError("rademacher_tail needs n >= 1");
  // S_n = 2B - n >= t  <=>  B >= (n + t)/2.
  return log_binomial_upper_tail(n, ceil_tolerant((static_cast<double>(n) + t) / 2.0));
}

double rademacher_tail(int n, double t) { return std::exp(log_rademacher_tail(n, t)); }

double joint_rademacher_bound(long long n0, long long n_hat, double beta) {
  if (n0 < 1 || n_hat < 1) throw DomainError("joint_rademacher_bound needs n0, n_hat >= 1");
  if (!(beta >= 0.0)) throw DomainError("joint_rademacher_bound needs beta >= 0");
  const double total = static_cast<double>(n0 + n_hat);
  const double g = beta / std::sqrt(total);
  const double rho = static_cast<double>(n0) / total;
  return 3.0 * total * std::exp(-g * g / (1.0 + rho));
}

BinomialLowerTail binomial_lower_tail(int n, double gamma) {
  if (n < 1) throw DomainError("binomial_lower_tail needs n >= 1");
  if (!(gamma > 0.0)) throw DomainError("binomial_lower_tail needs gamma > 0");
  const double N = static_cast<double>(n);
  const double lambda = 0.5 + gamma / (2.0 * std::sqrt(N));
  if (!(lambda < 1.0)) throw DomainError("binomial_lower_tail needs gamma < sqrt(n)");
  BinomialLowerTail out;
  out.expansion = std::exp(-gamma * gamma / 2.0 - std::pow(gamma, 4) / (12.0 * N)) / std::sqrt(2.0 * N);
  auto kl_bound = [N](double l) {
    return std::exp(-N * kl_divergence(l, 0.5)) / std::sqrt(8.0 * N * l * (1.0 - l));
  };
  out.kl_unrounded = kl_bound(lambda);
  const double lattice = static_cast<double>(ceil_tolerant(lambda * N)) / N;
  out.kl_exact = lattice < 1.0 ? kl_bound(lattice) : 0.0;
  return out;
}

double kl_divergence(double x, double p) {
  if (!(x >= 0.0 && x <= 1.0 && p >= 0.0 && p <= 1.0)) throw DomainError("kl_divergence needs x, p in [0,1]");
  auto term = [](double a, double b) {
    if (a == 0.0) return 0.0;
    if (b == 0.0) return std::numeric_limits<double>::infinity();
    return a * std::log(a / b);
  };
  return std::max(0.0, term(x, p) + term(1.0 - x, 1.0 - p));
}

double savage_bound(const std::vector<std::vector<double>>& sigma, const std::vector<double>& c) {
  const auto d = static_cast<Eigen::Index>(c.size());
  if (d == 0 || static_cast<Eigen::Index>(sigma.size()) != d) throw DimensionError("savage_bound dimension mismatch");
  Eigen::MatrixXd S(d, d);
  Eigen::VectorXd C(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    if (static_cast<Eigen::Index>(sigma[i].size()) != d) throw DimensionError("savage_bound needs a square matrix");
    C(i) = c[i];
    for (Eigen::Index j = 0; j < d; ++j) S(i, j) = sigma[i][j];
  }
  if (!S.isApprox(S.transpose(), 1e-12)) throw HypothesisError("covariance matrix is not symmetric");
  Eigen::LLT<Eigen::MatrixXd> llt(S);
  if (llt.info() != Eigen::Success) throw HypothesisError("covariance matrix is not positive definite");
  const Eigen::MatrixXd L = llt.matrixL();
  double log_det = 0.0;
  for (Eigen::Index i = 0; i < d; ++i) {
    if (!(L(i, i) > 0.0)) throw HypothesisError("covariance matrix is singular");
    log_det += 2.0 * std::log(L(i, i));
  }
  const Eigen::VectorXd delta = llt.solve(C);
  double log_prod = 0.0;
  for (Eigen::Index i = 0; i < d; ++i) {
    if (!(delta(i) > 0.0)) throw HypothesisError("c' Sigma^{-1} has a nonpositive entry");
    log_prod += std::log(delta(i));
  }
  const double quad = C.dot(delta);
  return std::exp(-log_prod - 0.5 * log_det - static_cast<double>(d) * kLogSqrt2Pi - 0.5 * quad);
}

double bivariate_correlated_bound(long long K, long long l, double gamma) {
  if (l < 2 || l > K - 1) throw DomainError("bivariate_correlated_bound needs 2 <= l <= K-1");
  if (!(gamma > 0.0)) throw DomainError("bivariate_correlated_bound needs gamma > 0");
  const double ck = static_cast<double>(choose2(K));
  const double cl = static_cast<double>(choose2(l));
  const double pre = (ck + cl) * (ck + cl) / (ck * ck * std::sqrt(ck * ck - cl * cl));
  return pre / (2.0 * std::numbers::pi * gamma * gamma) * std::exp(-gamma * gamma * ck * ck / (ck + cl));
}

ConcentrationBounds concentration_bounds(long long K, double t, double sigma_sq) {
  if (!(t > 0.0) || !(sigma_sq > 0.0) || K < 1) throw DomainError("concentration_bounds needs t > 0, sigma^2 > 0");
  const double k = static_cast<double>(K);
  ConcentrationBounds out;
  out.talagrand = std::min(1.0, 4.0 * std::exp(-t * t / (4.0 * k * k)));
  out.talagrand_hypothesis_met = t >= 32.0 * std::sqrt(std::numbers::pi) * k;
  out.borell_tis = std::min(1.0, std::exp(-t * t / (2.0 * sigma_sq)));
  return out;
}

SetTail set_tail(long long K, double gamma, const DistributionSpec& dist) {
  if (K < 2) throw DomainError("set_tail needs K >= 2");
  const long long N = choose2(K);
  const double Nd = static_cast<double>(N);
  double cg = 0.0;
  switch (family_of(dist, gamma, cg)) {
    case Family::Rademacher: {
      const double t = cg * Nd;
      if (N <= 10000) return {log_rademacher_tail(static_cast<int>(N), t), true};
      if (t > Nd) return {kNegInf, true};
      const double x = t / std::sqrt(Nd);
      if (x < 1.0) return {0.0, false};
      return {std::min(0.0, std::log(kRademacherTheta) + log_normal_sf(x)), false};
    }
    case Family::Gaussian:
      return {log_normal_sf(cg * std::sqrt(Nd)), true};
    case Family::Other: {
      const double lo = *std::min_element(dist.support.begin(), dist.support.end());
      const double hi = *std::max_element(dist.support.begin(), dist.support.end());
      const double t = gamma * Nd;
      if (t > hi * Nd + 1e-9 * std::max(1.0, std::abs(hi * Nd))) return {kNegInf, true};
      const double excess = t - Nd * dist.declared_mean;
      if (excess <= 0.0 || hi == lo) return {0.0, false};
      return {-2.0 * excess * excess / (Nd * (hi - lo) * (hi - lo)), false};  // Hoeffding
    }
  }
  return {0.0, false};
}

FirstMoment first_moment_upper(long long n, long long K, double gamma, const DistributionSpec& dist) {
  if (K < 2 || K > n) throw DomainError("first_moment_upper needs 2 <= K <= n");
  const SetTail tail = set_tail(K, gamma, dist);
  FirstMoment out;
  out.exact = tail.exact;
  out.log_value = log_binomial(n, K) + tail.log_p;
  out.value = std::exp(out.log_value);
  return out;
}

double auto_gamma(long long n, long long K, double eps, const DistributionSpec& dist) {
  if (!(eps > 0.0)) throw DomainError("auto_gamma needs eps > 0");
  if (K < 2 || K >= n) throw DomainError("auto_gamma needs 2 <= K < n");
  const double k = static_cast<double>(K);
  const double inner = -std::log(eps) + log_binomial(n, K) -
                       0.5 * std::log(k * std::log(static_cast<double>(n) / k));
  if (!(inner > 0.0)) throw DomainError("auto_gamma: nonpositive log argument");
  const double g = std::sqrt(2.0 / static_cast<double>(choose2(K)) * inner);
  double unused = 0.0;
  const Family fam = family_of(dist, 0.0, unused);
  const bool shifted = dist.kind == DistKind::BernoulliHalf || dist.kind == DistKind::GaussianHalfQuarter;
  if (fam == Family::Other) throw DomainError("auto_gamma is defined for Rademacher, Bernoulli and Gaussian laws");
  return shifted ? 0.5 * (1.0 + g) : g;
}

double s_term(long long n, long long K, double m, long long l, double gamma) {
  if (l < 2 || l > K - 1) throw DomainError("s_term needs 2 <= l <= K-1");
  const double ck = static_cast<double>(choose2(K));
  const double cl = static_cast<double>(choose2(l));
  return log_binomial(K, l) + log_binomial(n - K, K - l) - log_binomial(n, K) +
         m * std::log(static_cast<double>(K)) + gamma * gamma * ck * cl / (ck + cl);
}

MomentReport second_moment_report(long long n, long long K, double gamma, const DistributionSpec& dist) {
  if (K < 2 || K > n) throw DomainError("second_moment_report needs 2 <= K <= n");
  MomentReport r;
  r.n = n;
  r.K = K;
  r.gamma = gamma;
  const SetTail tail = set_tail(K, gamma, dist);
  r.tail_exact = tail.exact;
  const double lp = tail.log_p;
  const double lnk = log_binomial(n, K);
  r.log_first_moment = lnk + lp;
  r.first_moment = std::exp(r.log_first_moment);

  // A: overlaps 0, 1 (independent sets) and K (same set).
  double la = lnk + lp;
  if (2 * K <= n) la = log_add_exp(la, lnk + log_binomial(n - K, K) + 2.0 * lp);
  if (2 * K - 1 <= n) la = log_add_exp(la, std::log(static_cast<double>(n)) + log_binomial(n - 1, K - 1) +
                                               log_binomial(n - K, K - 1) + 2.0 * lp);
  r.log_a_term = la;
  r.a_term = std::exp(la);

  // B: overlaps 2..K-1, each joint tail replaced by an upper bound.
  double cg = 0.0;
  const Family fam = family_of(dist, gamma, cg);
  const long long N = choose2(K);
  double lb = kNegInf;
  for (long long l = 2; l <= K - 1; ++l) {
    if (K - l > n - K) continue;
    double lq = lp;  // P(Z_S, Z_T >= t) <= P(Z_S >= t)
    if (fam == Family::Rademacher && cg >= 0.0) {
      lq = std::min(lq, std::log(joint_rademacher_bound(choose2(l), N - choose2(l), cg * static_cast<double>(N))));
    } else if (fam == Family::Gaussian && cg > 0.0) {
      lq = std::min(lq, std::log(bivariate_correlated_bound(K, l, cg)));
    }
    lb = log_add_exp(lb, lnk + log_binomial(K, l) + log_binomial(n - K, K - l) + lq);
  }
  r.log_b_upper = lb;
  r.b_upper = std::exp(lb);
  if (lp == kNegInf) {
    r.b_bar_upper = 0.0;
    r.pz_ratio_lower = 0.0;
    return r;
  }
  r.b_bar_upper = std::exp(lb - 2.0 * (lnk + lp));
  r.pz_ratio_lower = std::min(1.0, std::exp(2.0 * r.log_first_moment - log_add_exp(la, lb)));
  return r;
}

}  // namespace dks
