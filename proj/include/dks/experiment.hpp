#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dks/ogp.hpp"

namespace dks {

inline constexpr int kCsvSchemaVersion = 1;
inline constexpr const char* kCodeVersion = "0.1.0";

/// Run configuration. Serialises to canonical JSON (sorted keys, only set
/// fields); parsing rejects unknown keys and K together with alpha.
struct ExperimentConfig {
  std::string kind = "sweep";  // solve|curve|moments|ogp|lindeberg|sweep|formulas|bounds-check
  std::optional<int> n;
  std::vector<int> n_values;   // sweep grid; overrides n when non-empty
  std::optional<int> K;
  std::optional<double> alpha;  // K = ceil(n^alpha)
  std::string dist;  // empty: the command's default law
  int trials = 0;
  std::uint64_t seed = 1;
  std::uint64_t budget = 0;
  int threads = 0;
  std::string csv;
  std::string json_out;  // "json" key
  // Free scalars.
  std::optional<double> gamma;
  std::optional<double> eps;
  std::optional<double> beta;
  std::optional<double> mu;
  std::optional<int> z;
  std::optional<int> m;
  std::optional<double> a_n;
  std::optional<int> restarts;
  std::optional<double> epsilon;
  std::optional<double> c0;
  std::optional<double> c1;
  std::optional<double> d1;
  std::optional<double> d2;
  std::optional<int> plant;
  std::string mode;

  /// K for a given n: explicit K, or ceil(n^alpha) with a 1e-9 guard against
  /// round-up of exact powers.
  int resolve_K(int n_value) const;
  std::vector<int> grid() const;

  nlohmann::json to_json() const;
  static ExperimentConfig from_json(const nlohmann::json& j);
  std::string canonical() const { return to_json().dump(); }
  /// FNV-1a of the canonical JSON without threads and output paths.
  std::string hash() const;
};

ExperimentConfig load_config(const std::string& path);

/// ceil(n^alpha) with a small guard so exact powers do not round up.
int k_from_alpha(int n, double alpha);

/// 64-bit FNV-1a, hex encoded.
std::string fnv1a_hex(const std::string& text);

/// 12 significant digits; integers print without exponent where possible.
std::string format_number(double x);
std::string csv_escape(const std::string& field);
void write_csv_row(std::ostream& out, const std::vector<std::string>& fields);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// RFC-4180 reader (quoted fields, embedded commas/quotes/newlines).
CsvTable read_csv(std::istream& in);

struct WilsonInterval {
  double lower = 0.0;
  double upper = 1.0;
};

/// Wilson score interval for k successes in n trials (z = 1.96).
WilsonInterval wilson_interval(long long successes, long long trials, double z = 1.96);

/// Type-7 (linear interpolation) sample quantile of sorted data.
double quantile_sorted(const std::vector<double>& sorted, double q);

/// Numeric columns: mean, std, min, max, quantiles 5/25/50/75/95, standard
/// error. Boolean columns (true/false): frequency with Wilson 95% interval.
/// Rows grouped by the listed columns when given.
nlohmann::json summarize_table(const CsvTable& table, const std::vector<std::string>& group_by = {});

/// Reads a result CSV, checks its schema version, and summarises it.
nlohmann::json summarize(const std::string& path, const std::vector<std::string>& group_by = {});

struct SweepOutput {
  std::string csv;          // full CSV text
  nlohmann::json summary;   // summary plus run record metadata
};

/// Seeded trials of an exact Psi_K solve over the configured (n, K) grid.
/// Columns: schema_version,trial,seed,n,K,dist,status,psi,exact,nodes,
/// leading,ratio,psi_ge_leading, where ratio = (psi - K^2/4)/(K^{3/2} sqrt(log(n/K))/2).
SweepOutput run_sweep(const ExperimentConfig& config);

/// One row per solved (instance, z): schema_version,seed,z,psi,gamma,exact.
std::string ogp_profile_csv(const OgpResult& result);

}  // namespace dks
