#include "dks/disorder.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <iomanip>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include <boost/math/special_functions/erf.hpp>

#include "dks/errors.hpp"
#include "dks/rng.hpp"

namespace dks {

namespace {

double standard_normal_quantile(double u) {
  return -std::sqrt(2.0) * boost::math::erfc_inv(2.0 * u);
}

void custom_moments(const std::vector<double>& support, const std::vector<double>& probs,
                    double& mean, double& variance) {
  mean = 0.0;
  double second = 0.0;
  for (std::size_t i = 0; i < support.size(); ++i) {
    mean += probs[i] * support[i];
    second += probs[i] * support[i] * support[i];
  }
  variance = second - mean * mean;
}

}  // namespace

DistributionSpec DistributionSpec::bernoulli_half() {
  return {DistKind::BernoulliHalf, {}, {}, 0.5, 0.25};
}

DistributionSpec DistributionSpec::rademacher() {
  return {DistKind::Rademacher, {}, {}, 0.0, 1.0};
}

DistributionSpec DistributionSpec::gaussian_half_quarter() {
  return {DistKind::GaussianHalfQuarter, {}, {}, 0.5, 0.25};
}

DistributionSpec DistributionSpec::gaussian_std() {
  return {DistKind::GaussianStd, {}, {}, 0.0, 1.0};
}

DistributionSpec DistributionSpec::bounded_custom(std::vector<double> support,
                                                  std::vector<double> probs) {
  DistributionSpec spec{DistKind::BoundedCustom, std::move(support), std::move(probs), 0.0, 0.0};
  if (spec.support.size() != spec.probs.size() || spec.support.empty())
    throw InvalidArgument("custom distribution needs matching non-empty support and probabilities");
  custom_moments(spec.support, spec.probs, spec.declared_mean, spec.declared_variance);
  spec.validate();
  return spec;
}

void DistributionSpec::validate() const {
  double mean = 0.0;
  double variance = 0.0;
  switch (kind) {
    case DistKind::BernoulliHalf:
    case DistKind::GaussianHalfQuarter:
      mean = 0.5;
      variance = 0.25;
      break;
    case DistKind::Rademacher:
    case DistKind::GaussianStd:
      mean = 0.0;
      variance = 1.0;
      break;
    case DistKind::BoundedCustom: {
      if (support.size() != probs.size() || support.empty())
        throw InvalidArgument("custom distribution needs matching non-empty support and probabilities");
      double total = 0.0;
      for (double p : probs) {
        if (!(p >= 0.0)) throw InvalidArgument("custom distribution has a negative probability");
        total += p;
      }
      if (std::abs(total - 1.0) > 1e-12)
        throw InvalidArgument("custom distribution probabilities do not sum to 1");
      custom_moments(support, probs, mean, variance);
      break;
    }
  }
  if (std::abs(mean - declared_mean) > 1e-12 || std::abs(variance - declared_variance) > 1e-12)
    throw InvalidArgument("declared moments disagree with the distribution");
}

bool DistributionSpec::matches_universality_moments() const {
  const double second = declared_variance + declared_mean * declared_mean;
  return std::abs(declared_mean - 0.5) <= 1e-12 && std::abs(second - 0.5) <= 1e-12;
}

double DistributionSpec::quantile(double u) const {
  switch (kind) {
    case DistKind::BernoulliHalf:
      return u >= 0.5 ? 1.0 : 0.0;
    case DistKind::Rademacher:
      return u >= 0.5 ? 1.0 : -1.0;
    case DistKind::GaussianHalfQuarter:
      return 0.5 + 0.5 * standard_normal_quantile(u);
    case DistKind::GaussianStd:
      return standard_normal_quantile(u);
    case DistKind::BoundedCustom: {
      double cumulative = 0.0;
      for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
        cumulative += probs[i];
        if (u < cumulative) return support[i];
      }
      return support.back();
    }
  }
  return 0.0;
}

std::string DistributionSpec::name() const {
  switch (kind) {
    case DistKind::BernoulliHalf: return "bernoulli";
    case DistKind::Rademacher: return "rademacher";
    case DistKind::GaussianHalfQuarter: return "gaussian";
    case DistKind::GaussianStd: return "gaussian-std";
    case DistKind::BoundedCustom: {
      std::ostringstream os;
      os << std::setprecision(17) << "custom:";
      for (std::size_t i = 0; i < support.size(); ++i)
        os << (i ? "," : "") << support[i] << "@" << probs[i];
      return os.str();
    }
  }
  return "unknown";
}

DistributionSpec DistributionSpec::from_name(const std::string& name) {
  if (name == "bernoulli") return bernoulli_half();
  if (name == "rademacher") return rademacher();
  if (name == "gaussian") return gaussian_half_quarter();
  if (name == "gaussian-std") return gaussian_std();
  if (name.rfind("custom:", 0) == 0) {
    // custom:v1@p1,v2@p2,...
    std::vector<double> support, probs;
    std::stringstream ss(name.substr(7));
    std::string item;
    while (std::getline(ss, item, ',')) {
      const auto at = item.find('@');
      if (at == std::string::npos) throw InvalidArgument("bad custom distribution item: " + item);
      support.push_back(std::stod(item.substr(0, at)));
      probs.push_back(std::stod(item.substr(at + 1)));
    }
    return bounded_custom(std::move(support), std::move(probs));
  }
  throw InvalidArgument("unknown distribution: " + name);
}

DisorderMatrix::DisorderMatrix(int n, std::vector<double> weights, DistributionSpec spec,
                               std::uint64_t seed, std::optional<PlantedInfo> planted)
    : n_(n), weights_(std::move(weights)), spec_(std::move(spec)), seed_(seed),
      planted_(std::move(planted)) {
  if (n < 2) throw DimensionError("a disorder matrix needs at least 2 vertices");
  if (weights_.size() != pair_count(n))
    throw DimensionError("weight vector length must be n(n-1)/2");
}

double DisorderMatrix::weight(int i, int j) const {
  if (i < 0 || j < 0 || i >= n_ || j >= n_ || i == j)
    throw VertexError("invalid vertex pair (" + std::to_string(i) + "," + std::to_string(j) + ")");
  if (i > j) std::swap(i, j);
  return weights_[pair_index(n_, i, j)];
}

DisorderMatrix DisorderMatrix::with_weights(std::vector<double> weights) const {
  return DisorderMatrix(n_, std::move(weights), spec_, seed_, planted_);
}

DisorderMatrix DisorderMatrix::induced(std::span<const int> vertices) const {
  const int m = static_cast<int>(vertices.size());
  std::vector<double> w(pair_count(m));
  for (int a = 0; a < m; ++a)
    for (int b = a + 1; b < m; ++b) w[pair_index(m, a, b)] = weight(vertices[a], vertices[b]);
  return DisorderMatrix(m, std::move(w), spec_, seed_);
}

DisorderMatrix sample_disorder(int n, const DistributionSpec& spec, std::uint64_t seed) {
  if (n < 2) throw DimensionError("sample_disorder needs n >= 2");
  spec.validate();
  std::vector<double> w(pair_count(n));
  for (std::size_t e = 0; e < w.size(); ++e) w[e] = spec.quantile(counter_uniform(seed, e));
  return DisorderMatrix(n, std::move(w), spec, seed);
}

DisorderMatrix plant_clique(const DisorderMatrix& matrix, int K, double mu) {
  const int n = matrix.n();
  if (K < 2 || K > n) throw DimensionError("planted clique size must satisfy 2 <= K <= n");
  std::vector<double> w = matrix.weights();
  const bool bernoulli = matrix.spec().kind == DistKind::BernoulliHalf;
  for (int i = 0; i < K; ++i)
    for (int j = i + 1; j < K; ++j) {
      double& x = w[pair_index(n, i, j)];
      x = bernoulli ? 1.0 : x + mu;
    }
  PlantedInfo info{K, bernoulli ? 0.0 : mu, {}};
  info.clique_vertices.resize(K);
  std::iota(info.clique_vertices.begin(), info.clique_vertices.end(), 0);
  return DisorderMatrix(n, std::move(w), matrix.spec(), matrix.seed(), std::move(info));
}

double subset_density(const DisorderMatrix& matrix, std::span<const int> S) {
  const int n = matrix.n();
  for (int v : S)
    if (v < 0 || v >= n) throw VertexError("vertex " + std::to_string(v) + " out of range");
  double total = 0.0;
  for (std::size_t a = 0; a < S.size(); ++a)
    for (std::size_t b = a + 1; b < S.size(); ++b) {
      if (S[a] == S[b]) throw VertexError("repeated vertex " + std::to_string(S[a]));
      total += matrix.weight(S[a], S[b]);
    }
  return total;
}

void write_matrix(std::ostream& out, const DisorderMatrix& matrix) {
  out << "dks-disorder 1\n";
  out << "n " << matrix.n() << "\n";
  out << "dist " << matrix.spec().name() << "\n";
  out << "seed " << matrix.seed() << "\n";
  if (const auto& p = matrix.planted())
    out << "planted " << p->K << " " << std::setprecision(17) << p->mu << "\n";
  else
    out << "planted none\n";
  out << "weights\n";
  char buf[64];
  for (double w : matrix.weights()) {
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, w);
    out.write(buf, end - buf);
    out << '\n';
  }
}

DisorderMatrix read_matrix(std::istream& in) {
  std::string tag;
  int version = 0;
  if (!(in >> tag >> version) || tag != "dks-disorder")
    throw SchemaError("not a disorder matrix file");
  if (version != 1) throw SchemaError("unsupported disorder matrix version " + std::to_string(version));
  int n = 0;
  std::string dist, planted_word;
  std::uint64_t seed = 0;
  if (!(in >> tag >> n) || tag != "n") throw SchemaError("missing n");
  if (!(in >> tag >> dist) || tag != "dist") throw SchemaError("missing dist");
  if (!(in >> tag >> seed) || tag != "seed") throw SchemaError("missing seed");
  if (!(in >> tag >> planted_word) || tag != "planted") throw SchemaError("missing planted");
  std::optional<PlantedInfo> planted;
  if (planted_word != "none") {
    PlantedInfo info;
    info.K = std::stoi(planted_word);
    if (!(in >> info.mu)) throw SchemaError("bad planted record");
    info.clique_vertices.resize(info.K);
    std::iota(info.clique_vertices.begin(), info.clique_vertices.end(), 0);
    planted = info;
  }
  if (!(in >> tag) || tag != "weights") throw SchemaError("missing weights");
  if (n < 2) throw SchemaError("bad vertex count");
  std::vector<double> w(pair_count(n));
  for (double& x : w) {
    std::string token;
    if (!(in >> token)) throw SchemaError("truncated weights");
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), x);
    if (ec != std::errc()) throw SchemaError("bad weight value " + token);
  }
  return DisorderMatrix(n, std::move(w), DistributionSpec::from_name(dist), seed, planted);
}

}  // namespace dks
