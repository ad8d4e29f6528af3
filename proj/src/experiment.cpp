#include "dks/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "dks/asymptotics.hpp"
#include "dks/disorder.hpp"
#include "dks/errors.hpp"
#include "dks/parallel.hpp"
#include "dks/rng.hpp"
#include "dks/solver.hpp"

namespace dks {

using json = nlohmann::json;

int k_from_alpha(int n, double alpha) {
  return static_cast<int>(std::ceil(std::pow(static_cast<double>(n), alpha) - 1e-9));
}

int ExperimentConfig::resolve_K(int n_value) const {
  if (K) return *K;
  if (alpha) return k_from_alpha(n_value, *alpha);
  throw SchemaError("config needs K or alpha");
}

std::vector<int> ExperimentConfig::grid() const {
  if (!n_values.empty()) return n_values;
  if (n) return {*n};
  throw SchemaError("config needs n or n_values");
}

namespace {

const std::set<std::string> kKinds = {"solve", "curve", "moments", "ogp", "lindeberg",
                                      "sweep", "formulas", "bounds-check", "summarize", "sample"};

template <class T>
void put(json& j, const char* key, const std::optional<T>& v) {
  if (v) j[key] = *v;
}

template <class T>
void get(const json& j, const char* key, std::optional<T>& v) {
  if (j.contains(key)) v = j.at(key).get<T>();
}

}  // namespace

nlohmann::json ExperimentConfig::to_json() const {
  json j = json::object();
  j["kind"] = kind;
  put(j, "n", n);
  if (!n_values.empty()) j["n_values"] = n_values;
  put(j, "K", K);
  put(j, "alpha", alpha);
  if (!dist.empty()) j["dist"] = dist;
  j["trials"] = trials;
  j["seed"] = seed;
  j["budget"] = budget;
  j["threads"] = threads;
  if (!csv.empty()) j["csv"] = csv;
  if (!json_out.empty()) j["json"] = json_out;
  put(j, "gamma", gamma);
  put(j, "eps", eps);
  put(j, "beta", beta);
  put(j, "mu", mu);
  put(j, "z", z);
  put(j, "m", m);
  put(j, "a_n", a_n);
  put(j, "restarts", restarts);
  put(j, "epsilon", epsilon);
  put(j, "c0", c0);
  put(j, "c1", c1);
  put(j, "d1", d1);
  put(j, "d2", d2);
  put(j, "plant", plant);
  if (!mode.empty()) j["mode"] = mode;
  return j;
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  static const std::set<std::string> known = {
      "kind", "n", "n_values", "K", "alpha", "dist", "trials", "seed", "budget", "threads", "csv", "json",
      "gamma", "eps", "beta", "mu", "z", "m", "a_n", "restarts", "epsilon", "c0", "c1", "d1", "d2", "plant", "mode"};
  if (!j.is_object()) throw SchemaError("config must be a JSON object");
  for (const auto& [key, value] : j.items())
    if (!known.count(key)) throw SchemaError("unknown config field: " + key);
  ExperimentConfig c;
  try {
    if (j.contains("kind")) c.kind = j.at("kind").get<std::string>();
    get(j, "n", c.n);
    if (j.contains("n_values")) c.n_values = j.at("n_values").get<std::vector<int>>();
    get(j, "K", c.K);
    get(j, "alpha", c.alpha);
    if (j.contains("dist")) c.dist = j.at("dist").get<std::string>();
    if (j.contains("trials")) c.trials = j.at("trials").get<int>();
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("budget")) c.budget = j.at("budget").get<std::uint64_t>();
    if (j.contains("threads")) c.threads = j.at("threads").get<int>();
    if (j.contains("csv")) c.csv = j.at("csv").get<std::string>();
    if (j.contains("json")) c.json_out = j.at("json").get<std::string>();
    get(j, "gamma", c.gamma);
    get(j, "eps", c.eps);
    get(j, "beta", c.beta);
    get(j, "mu", c.mu);
    get(j, "z", c.z);
    get(j, "m", c.m);
    get(j, "a_n", c.a_n);
    get(j, "restarts", c.restarts);
    get(j, "epsilon", c.epsilon);
    get(j, "c0", c.c0);
    get(j, "c1", c.c1);
    get(j, "d1", c.d1);
    get(j, "d2", c.d2);
    get(j, "plant", c.plant);
    if (j.contains("mode")) c.mode = j.at("mode").get<std::string>();
  } catch (const json::exception& e) {
    throw SchemaError(std::string("bad config value: ") + e.what());
  }
  if (!kKinds.count(c.kind)) throw SchemaError("unknown experiment kind: " + c.kind);
  if (c.K && c.alpha) throw SchemaError("K and alpha are mutually exclusive");
  if (c.trials < 0) throw SchemaError("trials must be nonnegative");
  return c;
}

std::string ExperimentConfig::hash() const {
  // Threads and output paths do not affect results, so they stay out of the identity.
  auto j = to_json();
  j.erase("threads");
  j.erase("csv");
  j.erase("json");
  return fnv1a_hex(j.dump());
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw SchemaError("config is not valid JSON: " + std::string(e.what()));
  }
  return ExperimentConfig::from_json(j);
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  std::string s = buf;
  if (s == "-0") s = "0";
  return s;
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

void write_csv_row(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << ',';
    out << csv_escape(fields[i]);
  }
  out << "\r\n";
}

CsvTable read_csv(std::istream& in) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool quoted = false, field_started = false;
  char ch;
  auto end_field = [&] {
    record.push_back(field);
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    records.push_back(std::move(record));
    record.clear();
  };
  while (in.get(ch)) {
    if (quoted) {
      if (ch == '"') {
        if (in.peek() == '"') {
          in.get(ch);
          field += '"';
        } else {
          quoted = false;
        }
      } else {
        field += ch;
      }
      continue;
    }
    if (ch == '"' && !field_started) {
      quoted = true;
      field_started = true;
    } else if (ch == ',') {
      end_field();
    } else if (ch == '\r') {
      if (in.peek() == '\n') in.get(ch);
      end_record();
    } else if (ch == '\n') {
      end_record();
    } else {
      field += ch;
      field_started = true;
    }
  }
  if (quoted) throw SchemaError("unterminated quoted CSV field");
  if (field_started || !record.empty()) end_record();
  CsvTable t;
  if (records.empty()) return t;
  t.header = std::move(records.front());
  for (std::size_t i = 1; i < records.size(); ++i) {
    if (records[i].size() != t.header.size())
      throw SchemaError("CSV row " + std::to_string(i) + " has " + std::to_string(records[i].size()) +
                        " fields, header has " + std::to_string(t.header.size()));
    t.rows.push_back(std::move(records[i]));
  }
  return t;
}

WilsonInterval wilson_interval(long long successes, long long trials, double z) {
  if (trials <= 0) return {0.0, 1.0};
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

double quantile_sorted(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return std::nan("");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

namespace {

bool parse_double(const std::string& s, double& x) {
  if (s.empty()) return false;
  char* end = nullptr;
  x = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size();
}

json summarize_rows(const CsvTable& t, const std::vector<std::size_t>& rows) {
  json cols = json::object();
  for (std::size_t c = 0; c < t.header.size(); ++c) {
    const std::string& name = t.header[c];
    if (name == "schema_version") continue;
    std::vector<double> values;
    long long trues = 0, bools = 0;
    bool numeric = true, boolean = true;
    for (std::size_t r : rows) {
      const std::string& cell = t.rows[r][c];
      if (cell.empty()) continue;  // missing value
      if (cell == "true" || cell == "false") {
        ++bools;
        trues += cell == "true";
        numeric = false;
        continue;
      }
      boolean = false;
      double x;
      if (parse_double(cell, x))
        values.push_back(x);
      else
        numeric = false;
    }
    if (boolean && bools > 0) {
      const auto w = wilson_interval(trues, bools);
      cols[name] = {{"type", "boolean"}, {"count", bools}, {"true", trues},
                    {"frequency", static_cast<double>(trues) / bools}, {"wilson_lower", w.lower},
                    {"wilson_upper", w.upper}};
    } else if (numeric && !values.empty()) {
      const double n = static_cast<double>(values.size());
      double mean = 0.0;
      for (double v : values) mean += v;
      mean /= n;
      double ss = 0.0;
      for (double v : values) ss += (v - mean) * (v - mean);
      const double sd = values.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
      std::sort(values.begin(), values.end());
      cols[name] = {{"type", "numeric"},
                    {"count", values.size()},
                    {"mean", mean},
                    {"std", sd},
                    {"stderr", sd / std::sqrt(n)},
                    {"min", values.front()},
                    {"max", values.back()},
                    {"q05", quantile_sorted(values, 0.05)},
                    {"q25", quantile_sorted(values, 0.25)},
                    {"q50", quantile_sorted(values, 0.50)},
                    {"q75", quantile_sorted(values, 0.75)},
                    {"q95", quantile_sorted(values, 0.95)}};
    }
  }
  return {{"row_count", rows.size()}, {"columns", cols}};
}

}  // namespace

json summarize_table(const CsvTable& table, const std::vector<std::string>& group_by) {
  std::vector<std::size_t> keys;
  for (const auto& g : group_by) {
    const auto it = std::find(table.header.begin(), table.header.end(), g);
    if (it == table.header.end()) throw SchemaError("group-by column not found: " + g);
    keys.push_back(static_cast<std::size_t>(it - table.header.begin()));
  }
  std::vector<std::size_t> all(table.rows.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  json out = summarize_rows(table, all);
  if (!keys.empty()) {
    std::map<std::vector<std::string>, std::vector<std::size_t>> groups;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
      std::vector<std::string> k;
      for (std::size_t c : keys) k.push_back(table.rows[r][c]);
      groups[k].push_back(r);
    }
    json arr = json::array();
    for (const auto& [k, rows] : groups) {
      json g = summarize_rows(table, rows);
      json key = json::object();
      for (std::size_t i = 0; i < keys.size(); ++i) key[group_by[i]] = k[i];
      g["group"] = key;
      arr.push_back(std::move(g));
    }
    out["groups"] = std::move(arr);
  }
  return out;
}

json summarize(const std::string& path, const std::vector<std::string>& group_by) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read results file " + path);
  const CsvTable t = read_csv(in);
  if (t.header.empty()) return {{"row_count", 0}, {"columns", json::object()}};
  if (t.header.front() != "schema_version") throw SchemaError("results file has no schema_version column");
  for (const auto& row : t.rows)
    if (row.front() != std::to_string(kCsvSchemaVersion))
      throw SchemaError("unsupported results schema version " + row.front());
  return summarize_table(t, group_by);
}

SweepOutput run_sweep(const ExperimentConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  const DistributionSpec dist = DistributionSpec::from_name(config.dist.empty() ? "gaussian" : config.dist);
  struct Cell {
    int n, K;
  };
  std::vector<Cell> cells;
  for (int n : config.grid()) cells.push_back({n, config.resolve_K(n)});
  for (const auto& c : cells)
    if (c.K < 2 || c.K > c.n) throw SchemaError("invalid (n, K) in sweep grid");

  const std::size_t per = static_cast<std::size_t>(config.trials);
  const std::size_t total = per * cells.size();
  std::vector<std::vector<std::string>> rows(total);
  SolveOptions opts;
  opts.node_budget = config.budget;
  parallel_for(total, config.threads, [&](std::size_t idx) {
    const Cell& c = cells[idx / per];
    const std::size_t trial = idx % per;
    // The seed depends on (n, trial) so grid order does not change instances.
    const std::uint64_t seed = split_seed(split_seed(config.seed, static_cast<std::uint64_t>(c.n)), trial);
    std::vector<std::string> row{std::to_string(kCsvSchemaVersion), std::to_string(trial), std::to_string(seed),
                                 std::to_string(c.n), std::to_string(c.K), dist.name()};
    try {
      auto m = sample_disorder(c.n, dist, seed);
      if (config.plant) m = plant_clique(m, *config.plant, config.mu.value_or(1.0));
      const auto s = psi_exact(m, c.K, opts);
      std::string leading, ratio, ge;
      if (c.K < c.n) {
        const double lead = leading_asymptotic(c.n, c.K);
        const double k = c.K;
        const double scale = std::pow(k, 1.5) * std::sqrt(std::log(static_cast<double>(c.n) / k)) / 2.0;
        leading = format_number(lead);
        ratio = format_number((s.value - k * k / 4.0) / scale);
        ge = s.value >= lead ? "true" : "false";
      }
      row.insert(row.end(), {"ok", format_number(s.value), s.exact ? "true" : "false",
                             std::to_string(s.nodes_explored), leading, ratio, ge});
    } catch (const std::exception& e) {
      row.insert(row.end(), {std::string("error: ") + e.what(), "", "", "", "", "", ""});
    }
    rows[idx] = std::move(row);
  });

  std::ostringstream csv;
  CsvTable table;
  table.header = {"schema_version", "trial", "seed", "n", "K", "dist", "status",
                  "psi", "exact", "nodes", "leading", "ratio", "psi_ge_leading"};
  write_csv_row(csv, table.header);
  for (const auto& r : rows) write_csv_row(csv, r);
  table.rows = std::move(rows);

  SweepOutput out;
  out.csv = csv.str();
  out.summary = summarize_table(table, {"n", "K"});
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  out.summary["run_record"] = {{"config", config.to_json()},
                               {"config_hash", config.hash()},
                               {"code_version", kCodeVersion},
                               {"seed_rule", "trial_seed = split_seed(split_seed(base, n), trial)"},
                               {"wall_clock_seconds", wall}};
  return out;
}

std::string ogp_profile_csv(const OgpResult& result) {
  std::ostringstream text;
  write_csv_row(text, {"schema_version", "seed", "z", "psi", "gamma", "exact"});
  for (const auto& in : result.instances)
    for (const auto& e : in.profile.entries) {
      if (!e.feasible) continue;
      write_csv_row(text, {std::to_string(kCsvSchemaVersion), std::to_string(in.seed), std::to_string(e.z),
                           format_number(e.solution.value), e.gamma ? format_number(*e.gamma) : "",
                           e.solution.exact ? "true" : "false"});
    }
  return text.str();
}

}  // namespace dks
