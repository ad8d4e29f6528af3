#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace dks {

/// One comparison of a bound against its exact or Monte Carlo counterpart.
struct BoundCheck {
  std::string bound;       // which inequality
  std::string params;      // human-readable parameter tuple
  bool upper = true;       // true: bound >= reference; false: bound <= reference
  double value = 0.0;      // the bound
  double reference = 0.0;  // exact value or Monte Carlo estimate
  double noise = 0.0;      // 3 standard errors for Monte Carlo references, else 0
  bool passed = false;
};

struct BoundsSuiteOptions {
  std::uint64_t seed = 1;
  long long mc_samples = 1000000;
};

/// Domination checks for the Rademacher/Gaussian tail constant, the joint
/// Rademacher bound, the two binomial lower tails, the Savage orthant bound
/// and its bivariate specialisation. Monte Carlo references are seeded and
/// single-threaded, so the table is reproducible.
std::vector<BoundCheck> run_bounds_suite(const BoundsSuiteOptions& options = {});

/// Exact P(X1 >= beta, X2 >= beta) where X1, X2 are Rademacher sums sharing
/// n0 signs, each with n_hat further independent signs.
double joint_rademacher_exact(int n0, int n_hat, double beta);

}  // namespace dks
