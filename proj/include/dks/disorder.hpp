#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace dks {

enum class DistKind { BernoulliHalf, Rademacher, GaussianHalfQuarter, GaussianStd, BoundedCustom };

/// Edge-weight law. Every kind is sampled by inverse CDF of one uniform, so two
/// laws driven by the same seed are comonotonically coupled edge by edge.
struct DistributionSpec {
  DistKind kind = DistKind::BernoulliHalf;
  std::vector<double> support;  // BoundedCustom only
  std::vector<double> probs;    // BoundedCustom only
  double declared_mean = 0.5;
  double declared_variance = 0.25;

  static DistributionSpec bernoulli_half();
  static DistributionSpec rademacher();
  static DistributionSpec gaussian_half_quarter();
  static DistributionSpec gaussian_std();
  static DistributionSpec bounded_custom(std::vector<double> support, std::vector<double> probs);

  /// Throws InvalidArgument when probabilities or declared moments are inconsistent.
  void validate() const;

  /// Mean 1/2 and second moment 1/2, the hypotheses of the universality comparison.
  bool matches_universality_moments() const;

  /// Quantile function evaluated at u in (0,1).
  double quantile(double u) const;

  bool is_gaussian() const {
    return kind == DistKind::GaussianHalfQuarter || kind == DistKind::GaussianStd;
  }

  std::string name() const;
  static DistributionSpec from_name(const std::string& name);

  bool operator==(const DistributionSpec&) const = default;
};

struct PlantedInfo {
  int K = 0;
  double mu = 0.0;
  std::vector<int> clique_vertices;  // always {0, ..., K-1}
};

/// Index of the unordered pair (i, j), i < j, in row-major order over i < j.
inline std::size_t pair_index(int n, int i, int j) {
  const auto ii = static_cast<std::size_t>(i);
  return ii * static_cast<std::size_t>(n) - ii * (ii + 1) / 2 + static_cast<std::size_t>(j - i - 1);
}

inline std::size_t pair_count(int n) {
  return static_cast<std::size_t>(n) * static_cast<std::size_t>(n - 1) / 2;
}

class DisorderMatrix {
 public:
  DisorderMatrix() = default;
  DisorderMatrix(int n, std::vector<double> weights, DistributionSpec spec = {},
                 std::uint64_t seed = 0, std::optional<PlantedInfo> planted = std::nullopt);

  int n() const { return n_; }
  double weight(int i, int j) const;
  const std::vector<double>& weights() const { return weights_; }
  const DistributionSpec& spec() const { return spec_; }
  const std::optional<PlantedInfo>& planted() const { return planted_; }
  std::uint64_t seed() const { return seed_; }

  /// Same instance with a different weight vector (same length).
  DisorderMatrix with_weights(std::vector<double> weights) const;

  /// Disorder induced on the listed vertices, relabelled 0..m-1 in list order.
  DisorderMatrix induced(std::span<const int> vertices) const;

 private:
  int n_ = 0;
  std::vector<double> weights_;
  DistributionSpec spec_;
  std::uint64_t seed_ = 0;
  std::optional<PlantedInfo> planted_;
};

DisorderMatrix sample_disorder(int n, const DistributionSpec& spec, std::uint64_t seed);

/// Bernoulli: inside-clique weights set to 1. Other laws: shifted by mu.
DisorderMatrix plant_clique(const DisorderMatrix& matrix, int K, double mu);

/// Sum of weights over pairs inside S.
double subset_density(const DisorderMatrix& matrix, std::span<const int> S);

/// Versioned text serialization; weights use round-trip precision.
void write_matrix(std::ostream& out, const DisorderMatrix& matrix);
DisorderMatrix read_matrix(std::istream& in);

}  // namespace dks
