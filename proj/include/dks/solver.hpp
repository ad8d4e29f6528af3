#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "dks/disorder.hpp"

namespace dks {

struct SubsetSolution {
  std::vector<int> vertices;  // sorted ascending
  double value = 0.0;         // subset_density of `vertices`
  bool exact = false;
  bool budget_exhausted = false;
  std::uint64_t nodes_explored = 0;
};

struct SolveOptions {
  std::uint64_t node_budget = 0;  // 0 means unlimited
  bool enumeration_fallback = true;
  int warm_start_restarts = 4;
  std::uint64_t warm_start_seed = 0x5eed;
};

/// Densities closer than this are treated as tied; ties go to the
/// lexicographically smallest vertex set.
inline constexpr double kTieTolerance = 1e-9;

/// Largest C(n,K) handed to plain enumeration.
inline constexpr double kEnumerationLimit = 1e8;

/// Max over K-subsets of Z_S by branch and bound in lexicographic order.
SubsetSolution psi_exact(const DisorderMatrix& matrix, int K, const SolveOptions& options = {});

/// Same maximum by plain revolving-door enumeration (resource error above 1e8 subsets).
SubsetSolution psi_enumerate(const DisorderMatrix& matrix, int K);

/// Max over K-subsets with exactly z planted-clique vertices.
SubsetSolution psi_overlap(const DisorderMatrix& matrix, int K, int z, const SolveOptions& options = {});
SubsetSolution psi_overlap_enumerate(const DisorderMatrix& matrix, int K, int z);

struct ProfileEntry {
  int z = 0;
  bool feasible = false;
  SubsetSolution solution;
  std::optional<double> gamma;           // first-moment curve
  std::optional<double> gaussian_gamma;  // experimental Gaussian variant (z < K)
};

struct OverlapProfile {
  int n = 0;
  int K = 0;
  std::vector<ProfileEntry> entries;  // z = floor(K^2/n), ..., K

  bool all_exact() const;
  double max_psi() const;
  const ProfileEntry* at(int z) const;
};

/// psi_overlap at every z on the curve domain, with the curve overlay.
/// When `only_where_curve_defined` is set, z values whose curve is undefined
/// are listed but not solved (feasible = false).
OverlapProfile psi_profile(const DisorderMatrix& matrix, int K, const SolveOptions& options = {},
                           bool only_where_curve_defined = false);

/// Greedy seeding plus best-improvement 1-swap local search, best of
/// `restarts` runs. Never certifies optimality.
SubsetSolution psi_lower_heuristic(const DisorderMatrix& matrix, int K, int restarts, std::uint64_t seed);

/// Number of K-subsets with Z_S >= threshold, by enumeration.
std::uint64_t count_exceeding(const DisorderMatrix& matrix, int K, double threshold);

}  // namespace dks
