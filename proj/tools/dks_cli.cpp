#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dks/asymptotics.hpp"
#include "dks/bounds.hpp"
#include "dks/bounds_suite.hpp"
#include "dks/disorder.hpp"
#include "dks/errors.hpp"
#include "dks/experiment.hpp"
#include "dks/lindeberg.hpp"
#include "dks/ogp.hpp"
#include "dks/solver.hpp"

namespace {

using json = nlohmann::json;
using namespace dks;

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

// Command-line values; only the ones actually given override the config file.
struct Flags {
  std::string config_path;
  std::optional<int> n, K, trials, threads, z, m, restarts, plant;
  std::optional<double> alpha, gamma, eps, beta, mu, a_n, epsilon, c0, c1, d1, d2;
  std::optional<std::uint64_t> seed, budget;
  std::optional<std::string> dist, csv, json_out, mode;
  std::vector<int> n_values;
  // Subcommand-only inputs.
  std::string matrix_path;
  std::string out_path;
  std::string results_path;
  std::vector<std::string> group_by;
  long long samples = 1000000;
};

void add_common(CLI::App* app, Flags& f) {
  app->add_option("--config", f.config_path, "JSON config file; flags override its fields");
  app->add_option("-n,--n", f.n, "number of vertices");
  app->add_option("-K,--K", f.K, "subset size");
  app->add_option("--alpha", f.alpha, "K = ceil(n^alpha)");
  app->add_option("--dist", f.dist, "bernoulli | rademacher | gaussian | gaussian-std | custom:v@p,...");
  app->add_option("--seed", f.seed, "base seed");
  app->add_option("--trials", f.trials, "number of trials");
  app->add_option("--budget", f.budget, "solver node budget (0 = unlimited)");
  app->add_option("--threads", f.threads, "worker threads (0 = DKS_THREADS or hardware)");
  app->add_option("--csv", f.csv, "CSV output path");
  app->add_option("--json", f.json_out, "JSON output path");
}

ExperimentConfig resolve(const std::string& kind, const Flags& f) {
  ExperimentConfig c = f.config_path.empty() ? ExperimentConfig{} : load_config(f.config_path);
  c.kind = kind;
  auto take = [](auto& dst, const auto& src) {
    if (src) dst = *src;
  };
  if (f.n) c.n = f.n;
  if (!f.n_values.empty()) c.n_values = f.n_values;
  if (f.K) {
    c.K = f.K;
    c.alpha.reset();
  }
  if (f.alpha) {
    c.alpha = f.alpha;
    if (!f.K) c.K.reset();
  }
  take(c.dist, f.dist);
  take(c.trials, f.trials);
  take(c.seed, f.seed);
  take(c.budget, f.budget);
  take(c.threads, f.threads);
  take(c.csv, f.csv);
  take(c.json_out, f.json_out);
  take(c.mode, f.mode);
  for (auto [dst, src] : {std::pair{&c.gamma, &f.gamma}, {&c.eps, &f.eps}, {&c.beta, &f.beta}, {&c.mu, &f.mu},
                          {&c.a_n, &f.a_n}, {&c.epsilon, &f.epsilon}, {&c.c0, &f.c0}, {&c.c1, &f.c1},
                          {&c.d1, &f.d1}, {&c.d2, &f.d2}})
    if (*src) *dst = *src;
  for (auto [dst, src] : {std::pair{&c.z, &f.z}, {&c.m, &f.m}, {&c.restarts, &f.restarts}, {&c.plant, &f.plant}})
    if (*src) *dst = *src;
  if (c.dist.empty()) c.dist = (kind == "ogp" || kind == "lindeberg") ? "bernoulli" : "gaussian";
  if (c.K && c.alpha) throw SchemaError("K and alpha are mutually exclusive");
  if (c.trials < 0) throw SchemaError("trials must be nonnegative");
  return c;
}

int need_n(const ExperimentConfig& c) {
  if (!c.n) throw SchemaError("this command needs n");
  return *c.n;
}

int need_K(const ExperimentConfig& c) { return c.resolve_K(need_n(c)); }

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

// Opens the output before any compute so unwritable paths fail early.
std::unique_ptr<std::ofstream> open_out(const std::string& path) {
  if (path.empty()) return nullptr;
  auto f = std::make_unique<std::ofstream>(path, std::ios::binary | std::ios::trunc);
  if (!*f) throw IoError("cannot write " + path);
  return f;
}

void emit_json(const json& j, std::ofstream* file) {
  if (file) {
    *file << j.dump(2) << "\n";
    if (!*file) throw IoError("write failed");
  } else {
    std::cout << j.dump(2) << "\n";
  }
}

SolveOptions solve_options(const ExperimentConfig& c) {
  SolveOptions o;
  o.node_budget = c.budget;
  if (c.restarts) o.warm_start_restarts = *c.restarts;
  return o;
}

DisorderMatrix instance(const ExperimentConfig& c, const std::string& matrix_path) {
  if (!matrix_path.empty()) {
    std::ifstream in(matrix_path, std::ios::binary);
    if (!in) throw IoError("cannot read matrix " + matrix_path);
    return read_matrix(in);
  }
  auto m = sample_disorder(need_n(c), DistributionSpec::from_name(c.dist), c.seed);
  if (c.plant) m = plant_clique(m, *c.plant, c.mu.value_or(1.0));
  return m;
}

json solution_json(const SubsetSolution& s) {
  return {{"vertices", s.vertices}, {"value", s.value}, {"exact", s.exact},
          {"budget_exhausted", s.budget_exhausted}, {"nodes_explored", s.nodes_explored}};
}

int cmd_sample(const ExperimentConfig& c, const Flags& f) {
  auto out = open_out(f.out_path);
  const auto m = instance(c, "");
  if (out)
    write_matrix(*out, m);
  else
    write_matrix(std::cout, m);
  return 0;
}

int cmd_solve(const ExperimentConfig& c, const Flags& f) {
  auto out = open_out(c.json_out);
  const auto m = instance(c, f.matrix_path);
  const int K = c.resolve_K(m.n());
  const auto opts = solve_options(c);
  const auto s = c.z ? psi_overlap(m, K, *c.z, opts) : psi_exact(m, K, opts);
  json j = solution_json(s);
  j["n"] = m.n();
  j["K"] = K;
  if (c.z) j["z"] = *c.z;
  j["seed"] = m.seed();
  j["dist"] = m.spec().name();
  emit_json(j, out.get());
  return 0;
}

int cmd_curve(const ExperimentConfig& c) {
  auto csv = open_out(c.csv);
  auto js = open_out(c.json_out);
  const long long n = need_n(c);
  const long long K = need_K(c);
  std::ostringstream text;
  write_csv_row(text, {"z", "gamma", "gaussian_gamma", "increment"});
  auto cell = [](const std::optional<double>& v) { return v ? format_number(*v) : std::string(); };
  for (long long z = curve_min_z(n, K); z <= K; ++z) {
    const auto g = first_moment_curve(n, K, z);
    const auto gg = z < K ? gaussian_first_moment_curve(n, K, z) : std::nullopt;
    const auto inc = z < K ? curve_increment(n, K, z) : std::nullopt;
    write_csv_row(text, {std::to_string(z), cell(g), cell(gg), cell(inc)});
  }
  (csv ? *csv : std::cout) << text.str();
  if (c.epsilon || js) {
    const auto d = dip_locator(n, K, c.epsilon.value_or(0.1), c.c0.value_or(2.0));
    json j = {{"n", n}, {"K", K}, {"found", d.found}, {"z0", d.z0}, {"window", {d.window_lo, d.window_hi}},
              {"z_star", d.z_star}, {"interval", {d.interval_lo, d.interval_hi}}, {"gamma_z0", d.gamma_z0},
              {"margin", d.margin}, {"margin_klogk", d.margin_klogk}, {"rises_again", d.rises_again}};
    if (js)
      emit_json(j, js.get());
    else
      std::cerr << j.dump(2) << "\n";
  }
  return 0;
}

int cmd_formulas(const ExperimentConfig& c) {
  auto out = open_out(c.json_out);
  const auto e = estimates(need_n(c), need_K(c));
  emit_json({{"n", e.n}, {"K", e.K}, {"V", opt(e.v)}, {"L", opt(e.l)}, {"U", opt(e.u)}, {"leading", opt(e.leading)}},
            out.get());
  return 0;
}

int cmd_moments(const ExperimentConfig& c) {
  auto out = open_out(c.json_out);
  const int n = need_n(c);
  const int K = need_K(c);
  const auto dist = DistributionSpec::from_name(c.dist);
  if (c.gamma && c.eps) throw SchemaError("give gamma or eps, not both");
  const double gamma = c.gamma ? *c.gamma : auto_gamma(n, K, c.eps.value_or(0.1), dist);
  const auto r = second_moment_report(n, K, gamma, dist);
  json j = {{"n", r.n}, {"K", r.K}, {"dist", dist.name()}, {"gamma", r.gamma},
            {"gamma_source", c.gamma ? "given" : "auto"}, {"first_moment", r.first_moment},
            {"log_first_moment", r.log_first_moment}, {"a_term", r.a_term}, {"log_a_term", r.log_a_term},
            {"b_upper", r.b_upper}, {"log_b_upper", r.log_b_upper}, {"b_bar_upper", r.b_bar_upper},
            {"pz_ratio_lower", r.pz_ratio_lower}, {"tail_exact", r.tail_exact}};
  if (!c.gamma) j["eps"] = c.eps.value_or(0.1);
  emit_json(j, out.get());
  return 0;
}

int cmd_bounds_check(const ExperimentConfig& c, const Flags& f) {
  auto csv = open_out(c.csv);
  BoundsSuiteOptions o;
  o.seed = c.seed;
  o.mc_samples = f.samples;
  const auto rows = run_bounds_suite(o);
  std::ostringstream text;
  write_csv_row(text, {"bound", "params", "direction", "value", "reference", "noise", "result"});
  int failures = 0;
  for (const auto& r : rows) {
    failures += !r.passed;
    write_csv_row(text, {r.bound, r.params, r.upper ? "upper" : "lower", format_number(r.value),
                         format_number(r.reference), format_number(r.noise), r.passed ? "pass" : "FAIL"});
  }
  (csv ? *csv : std::cout) << text.str();
  std::cerr << rows.size() - failures << "/" << rows.size() << " checks passed\n";
  return failures ? kExitFailure : 0;
}

int cmd_ogp(const ExperimentConfig& c) {
  auto csv = open_out(c.csv);
  auto js = open_out(c.json_out);
  OgpConfig o;
  o.n = need_n(c);
  o.K = c.resolve_K(o.n);
  o.dist = DistributionSpec::from_name(c.dist);
  if (c.mu) o.mu = *c.mu;
  o.trials = c.trials;
  o.seed = c.seed;
  o.budget = c.budget;
  o.threads = c.threads;
  if (c.epsilon) o.epsilon = *c.epsilon;
  if (c.c0) o.c0 = *c.c0;
  if (c.c1) o.c1 = *c.c1;
  if (c.d1) o.d1 = *c.d1;
  if (c.d2) o.d2 = *c.d2;
  const auto r = run_ogp_experiment(o);

  json inst = json::array();
  long long witnessed = 0, decided = 0;
  for (const auto& in : r.instances) {
    const bool ok = in.diagnosis.part1 && in.diagnosis.part2;
    if (in.status == "ok" && !in.diagnosis.indeterminate) {
      ++decided;
      witnessed += ok;
    }
    inst.push_back({{"seed", in.seed}, {"status", in.status}, {"z_low", in.z_low}, {"z_half", in.z_half},
                    {"psi_low", in.psi_low}, {"psi_half", in.psi_half}, {"interval_max", in.interval_max},
                    {"gap_statistic", in.gap_statistic}, {"part1", in.diagnosis.part1},
                    {"part2", in.diagnosis.part2}, {"indeterminate", in.diagnosis.indeterminate},
                    {"violating_z", in.diagnosis.violating_z}});
  }
  (csv ? *csv : std::cout) << ogp_profile_csv(r);
  const auto w = wilson_interval(witnessed, decided);
  json j = {{"n", o.n}, {"K", o.K}, {"dist", o.dist.name()}, {"trials", o.trials}, {"seed", o.seed},
            {"interval_source", r.interval_source}, {"interval", {r.interval_lo, r.interval_hi}}, {"c1", r.c1},
            {"dip", {{"found", r.dip.found}, {"z0", r.dip.z0}, {"z_star", r.dip.z_star},
                     {"interval", {r.dip.interval_lo, r.dip.interval_hi}}, {"margin", r.dip.margin}}},
            {"witness_frequency", decided ? static_cast<double>(witnessed) / decided : 0.0},
            {"witness_wilson", {w.lower, w.upper}}, {"decided", decided}, {"instances", inst},
            {"config_hash", c.hash()}, {"code_version", kCodeVersion}};
  if (js)
    emit_json(j, js.get());
  else if (csv)
    emit_json(j, nullptr);
  return 0;
}

int cmd_lindeberg(const ExperimentConfig& c) {
  auto out = open_out(c.json_out);
  const int n = need_n(c);
  const int K = c.resolve_K(n);
  const double beta = c.beta.value_or(default_beta(n, K));
  const auto dist = DistributionSpec::from_name(c.dist);
  json j = {{"mode", c.mode}, {"n", n}, {"K", K}, {"beta", beta}, {"seed", c.seed}, {"code_version", kCodeVersion}};
  if (c.mode == "path") {
    const auto plan = make_plan(n, dist, c.seed);
    const auto path = interpolation_path(plan, K, beta);
    j["dist"] = dist.name();
    j["edge_order"] = plan.edge_order;
    j["values"] = path;
    j["drift"] = path.back() - path.front();
  } else if (c.mode == "identity") {
    const auto m = sample_disorder(n, dist, c.seed);
    const auto g = gibbs_state(m, K, beta);
    j["dist"] = m.spec().name();
    j["log_partition"] = g.log_partition;
    j["max_density"] = g.max_density;
    j["smooth_max"] = g.smooth_max;
    j["gibbs_sum_residual"] = gibbs_sum_identity(m, K, beta);
    if (pair_count(n) <= 7) {
      const auto plan = make_plan(n, dist, c.seed);
      const auto mc = aggregated_multiplicity_check(n, K, beta, plan.x_weights, plan.y_weights);
      j["multiplicity"] = {{"lhs", mc.lhs}, {"rhs", mc.rhs}, {"residual", mc.residual}};
    }
  } else if (c.mode == "gap") {
    const auto g = universality_gap(n, K, beta, dist, c.trials, c.seed, c.threads);
    j["dist"] = dist.name();
    j["trials"] = g.trials;
    j["mean_gaussian"] = g.mean_gaussian;
    j["mean_other"] = g.mean_other;
    j["gap_estimate"] = g.gap_estimate;
    j["ci_halfwidth"] = g.ci_halfwidth;
    j["smooth_gap"] = g.smooth_gap;
    j["smooth_ci_halfwidth"] = g.smooth_ci_halfwidth;
    j["budget"] = g.budget;
    j["leading_fraction"] = g.gap_estimate / (K * K / 4.0);
  } else {
    throw SchemaError("lindeberg mode must be path, identity or gap");
  }
  emit_json(j, out.get());
  return 0;
}

int cmd_sweep(const ExperimentConfig& c) {
  auto csv = open_out(c.csv);
  auto js = open_out(c.json_out);
  const auto r = run_sweep(c);
  (csv ? *csv : std::cout) << r.csv;
  if (js)
    emit_json(r.summary, js.get());
  else if (csv)
    emit_json(r.summary, nullptr);
  return 0;
}

int cmd_summarize(const Flags& f) {
  emit_json(summarize(f.results_path, f.group_by), nullptr);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Densest K-subgraph experiments on weighted random graphs"};
  app.require_subcommand(1);
  Flags f;

  auto* sample = app.add_subcommand("sample", "sample a disorder matrix");
  add_common(sample, f);
  sample->add_option("--plant", f.plant, "plant a clique of this size");
  sample->add_option("--mu", f.mu, "clique shift for non-Bernoulli laws");
  sample->add_option("-o,--out", f.out_path, "output path (default stdout)");

  auto* solve = app.add_subcommand("solve", "exact Psi_K or Psi_K(z)");
  add_common(solve, f);
  solve->add_option("--matrix", f.matrix_path, "read the instance from a matrix file");
  solve->add_option("-z,--z", f.z, "overlap with the planted clique");
  solve->add_option("--plant", f.plant, "plant a clique of this size");
  solve->add_option("--mu", f.mu, "clique shift for non-Bernoulli laws");
  solve->add_option("--restarts", f.restarts, "heuristic warm-start restarts");

  auto* curve = app.add_subcommand("curve", "first-moment curve table");
  add_common(curve, f);
  curve->add_option("--epsilon", f.epsilon, "dip locator epsilon");
  curve->add_option("--c0", f.c0, "dip locator z0 constant");

  auto* formulas = app.add_subcommand("formulas", "V, L, U and the leading term");
  add_common(formulas, f);

  auto* moments = app.add_subcommand("moments", "first and second moment report");
  add_common(moments, f);
  moments->add_option("--gamma", f.gamma, "threshold multiplier on C(K,2)");
  moments->add_option("--eps", f.eps, "target E[U] for the automatic gamma");

  auto* bounds = app.add_subcommand("bounds-check", "bound domination suite");
  add_common(bounds, f);
  bounds->add_option("--samples", f.samples, "Monte Carlo samples per row");

  auto* ogp = app.add_subcommand("ogp", "overlap profiles and gap diagnostics");
  add_common(ogp, f);
  ogp->add_option("--mu", f.mu, "clique shift for non-Bernoulli laws");
  ogp->add_option("--epsilon", f.epsilon, "dip locator epsilon");
  ogp->add_option("--c0", f.c0, "dip locator z0 constant");
  ogp->add_option("--c1", f.c1, "r1 = r2 - c1 K log K");
  ogp->add_option("--d1", f.d1, "fallback interval start in sqrt(K log K) units");
  ogp->add_option("--d2", f.d2, "fallback interval end in sqrt(K log K) units");

  auto* lind = app.add_subcommand("lindeberg", "interpolation path, identities, universality gap");
  add_common(lind, f);
  lind->add_option("mode", f.mode, "path | identity | gap")->required();
  lind->add_option("--beta", f.beta, "inverse temperature");

  auto* sweep = app.add_subcommand("sweep", "seeded Psi_K sweep over an n grid");
  add_common(sweep, f);
  sweep->add_option("--n-values", f.n_values, "grid of n");
  sweep->add_option("--plant", f.plant, "plant a clique of this size");
  sweep->add_option("--mu", f.mu, "clique shift for non-Bernoulli laws");

  auto* summ = app.add_subcommand("summarize", "summary statistics of a result CSV");
  summ->add_option("results", f.results_path, "result CSV")->required();
  summ->add_option("--group-by", f.group_by, "columns to group by");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (summ->parsed()) return cmd_summarize(f);
    for (auto* sub : app.get_subcommands()) {
      const std::string name = sub->get_name();
      const ExperimentConfig c = resolve(name, f);
      if (name == "sample") return cmd_sample(c, f);
      if (name == "solve") return cmd_solve(c, f);
      if (name == "curve") return cmd_curve(c);
      if (name == "formulas") return cmd_formulas(c);
      if (name == "moments") return cmd_moments(c);
      if (name == "bounds-check") return cmd_bounds_check(c, f);
      if (name == "ogp") return cmd_ogp(c);
      if (name == "lindeberg") return cmd_lindeberg(c);
      if (name == "sweep") return cmd_sweep(c);
    }
  } catch (const SchemaError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid argument: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::out_of_range& e) {
    std::cerr << "invalid argument: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::domain_error& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}
