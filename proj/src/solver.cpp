#include "dks/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "dks/asymptotics.hpp"
#include "dks/combinatorics.hpp"
#include "dks/errors.hpp"
#include "dks/rng.hpp"

namespace dks {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
// Headroom for rounding differences between incremental and canonical sums.
constexpr double kSlack = 1e-7;

struct Dense {
  int n = 0;
  std::vector<double> w;
  const double* row(int i) const { return w.data() + static_cast<std::size_t>(i) * n; }
};

Dense make_dense(const DisorderMatrix& m) {
  Dense d{m.n(), std::vector<double>(static_cast<std::size_t>(m.n()) * m.n(), 0.0)};
  const auto& w = m.weights();
  std::size_t e = 0;
  for (int i = 0; i < d.n; ++i)
    for (int j = i + 1; j < d.n; ++j, ++e) {
      d.w[static_cast<std::size_t>(i) * d.n + j] = w[e];
      d.w[static_cast<std::size_t>(j) * d.n + i] = w[e];
    }
  return d;
}

// Same summation order as subset_density, so results agree bit for bit.
double canonical(const Dense& d, const std::vector<int>& s) {
  double total = 0.0;
  for (std::size_t a = 0; a < s.size(); ++a) {
    const double* r = d.row(s[a]);
    for (std::size_t b = a + 1; b < s.size(); ++b) total += r[s[b]];
  }
  return total;
}

struct Pool {
  std::vector<int> verts;  // ascending
  int need = 0;
};

std::vector<Pool> drop_empty(std::vector<Pool> pools) {
  std::erase_if(pools, [](const Pool& p) { return p.need == 0; });
  return pools;
}

double pooled_count(const std::vector<Pool>& pools) {
  double c = 1.0;
  for (const auto& p : pools) c *= binomial(static_cast<int>(p.verts.size()), p.need);
  return c;
}

// Keeps the m largest values seen so far; sum() is their total.
class TopM {
 public:
  explicit TopM(int m) : m_(m) { vals_.reserve(m); }
  void push(double x) {
    if (m_ == 0) return;
    if (static_cast<int>(vals_.size()) < m_) {
      vals_.insert(std::upper_bound(vals_.begin(), vals_.end(), x, std::greater<>()), x);
    } else if (x > vals_.back()) {
      vals_.pop_back();
      vals_.insert(std::upper_bound(vals_.begin(), vals_.end(), x, std::greater<>()), x);
    }
  }
  double sum() const { return std::accumulate(vals_.begin(), vals_.end(), 0.0); }

 private:
  int m_;
  std::vector<double> vals_;
};

bool better(double c, const std::vector<int>& s, double best, const std::vector<int>& best_set,
            bool have_best) {
  if (!have_best) return true;
  if (c > best + kTieTolerance) return true;
  return std::abs(c - best) <= kTieTolerance && s < best_set;
}

class BranchAndBound {
 public:
  BranchAndBound(const Dense& d, std::vector<Pool> pools, int K, double floor, std::uint64_t budget)
      : d_(d), pools_(std::move(pools)), K_(K), floor_(floor), budget_(budget) {
    prefix_need_.assign(pools_.size() + 1, 0);
    for (std::size_t p = 0; p < pools_.size(); ++p) prefix_need_[p + 1] = prefix_need_[p] + pools_[p].need;
    build_tables();
    gains_.assign(static_cast<std::size_t>(K_ + 1) * d_.n, 0.0);
    stack_.assign(K_, -1);
  }

  void run() {
    if (pools_.empty()) return;
    node(0, 0, 0, 0.0);
  }

  bool found = false;
  bool aborted = false;
  double best = kNegInf;
  std::vector<int> best_set;
  std::uint64_t nodes = 0;

 private:
  // top(q, v, t, m): sum of the m largest weights from v to pool-q vertices at
  // positions >= t, excluding v itself.
  double top(std::size_t q, int v, int t, int m) const {
    const auto stride = pools_[q].verts.size() + 1;
    return tables_[q][(static_cast<std::size_t>(v) * stride + t) * K_ + m];
  }

  void build_tables() {
    const std::size_t n = static_cast<std::size_t>(d_.n);
    tables_.resize(pools_.size());
    for (std::size_t q = 0; q < pools_.size(); ++q) {
      const auto& verts = pools_[q].verts;
      const std::size_t stride = verts.size() + 1;
      const double entries = static_cast<double>(n) * stride * K_;
      if (entries > 5e7) throw ResourceError("branch-and-bound bound tables would be too large");
      tables_[q].assign(n * stride * K_, 0.0);
      for (std::size_t v = 0; v < n; ++v) {
        std::vector<double> best;  // descending, at most K-1 values
        for (std::size_t t = stride; t-- > 0;) {
          if (t < verts.size() && verts[t] != static_cast<int>(v)) {
            const double x = d_.row(static_cast<int>(v))[verts[t]];
            best.insert(std::upper_bound(best.begin(), best.end(), x, std::greater<>()), x);
            if (static_cast<int>(best.size()) > K_ - 1) best.pop_back();
          }
          double* out = &tables_[q][(v * stride + t) * K_];
          double acc = 0.0;
          out[0] = 0.0;
          for (int m = 1; m < K_; ++m) {
            if (m <= static_cast<int>(best.size())) acc += best[m - 1];
            out[m] = acc;
          }
        }
      }
    }
  }

  double accept_floor() const {
    return found ? std::max(best + kTieTolerance, floor_ - kTieTolerance) : floor_ - kTieTolerance;
  }

  void leaf(double value, int depth, int v) {
    if (value + kSlack < accept_floor()) return;
    std::vector<int> s(stack_.begin(), stack_.begin() + depth);
    s.push_back(v);
    std::sort(s.begin(), s.end());
    const double c = canonical(d_, s);
    if (c < floor_ - kTieTolerance) return;
    if (found && !(c > best + kTieTolerance)) return;
    found = true;
    best = c;
    best_set = std::move(s);
  }

  double bound(int depth, std::size_t p, int t, double cur) const {
    const double* g = &gains_[static_cast<std::size_t>(depth) * d_.n];
    const int m_p = prefix_need_[p + 1] - depth;
    double total = cur;
    for (std::size_t q = p; q < pools_.size(); ++q) {
      const int tq = q == p ? t : 0;
      const int mq = q == p ? m_p : pools_[q].need;
      TopM sel(mq);
      const auto& verts = pools_[q].verts;
      for (std::size_t s = tq; s < verts.size(); ++s) {
        const int v = verts[s];
        double inner = 0.0;
        for (std::size_t q2 = p; q2 < pools_.size(); ++q2) {
          const int t2 = q2 == p ? t : 0;
          const int m2 = (q2 == p ? m_p : pools_[q2].need) - (q2 == q ? 1 : 0);
          if (m2 > 0) inner += top(q2, v, t2, m2);
        }
        sel.push(g[v] + 0.5 * inner);
      }
      total += sel.sum();
    }
    return total;
  }

  void node(int depth, std::size_t p, int t, double cur) {
    ++nodes;
    if (budget_ != 0 && nodes > budget_) {
      aborted = true;
      return;
    }
    if (bound(depth, p, t, cur) + kSlack < accept_floor()) return;
    const auto& verts = pools_[p].verts;
    const int m_p = prefix_need_[p + 1] - depth;
    const double* g = &gains_[static_cast<std::size_t>(depth) * d_.n];
    const int last = static_cast<int>(verts.size()) - m_p;
    if (depth == K_ - 1) {
      for (int s = t; s <= last; ++s) leaf(cur + g[verts[s]], depth, verts[s]);
      return;
    }
    double* g_next = &gains_[static_cast<std::size_t>(depth + 1) * d_.n];
    for (int s = t; s <= last; ++s) {
      const int v = verts[s];
      const double* r = d_.row(v);
      for (int u = 0; u < d_.n; ++u) g_next[u] = g[u] + r[u];
      stack_[depth] = v;
      if (m_p == 1)
        node(depth + 1, p + 1, 0, cur + g[v]);
      else
        node(depth + 1, p, s + 1, cur + g[v]);
      if (aborted) return;
    }
  }

  const Dense& d_;
  std::vector<Pool> pools_;
  int K_;
  double floor_;
  std::uint64_t budget_;
  std::vector<int> prefix_need_;
  std::vector<std::vector<double>> tables_;
  std::vector<double> gains_;
  std::vector<int> stack_;
};

SubsetSolution enumerate_pools(const Dense& d, const std::vector<Pool>& pools_in) {
  const auto pools = drop_empty(pools_in);
  if (pooled_count(pools) > kEnumerationLimit)
    throw ResourceError("enumeration would visit more than 1e8 subsets");
  SubsetSolution out;
  out.exact = true;
  bool have = false;
  if (pools.empty()) return out;

  // Outer pools in lexicographic order, last pool by revolving door.
  std::vector<std::vector<int>> pos(pools.size());
  for (std::size_t q = 0; q + 1 < pools.size(); ++q) {
    pos[q].resize(pools[q].need);
    std::iota(pos[q].begin(), pos[q].end(), 0);
  }
  const Pool& inner = pools.back();
  std::vector<int> fixed;
  std::vector<int> set;
  while (true) {
    fixed.clear();
    for (std::size_t q = 0; q + 1 < pools.size(); ++q)
      for (int i : pos[q]) fixed.push_back(pools[q].verts[i]);
    RevolvingDoor door(static_cast<int>(inner.verts.size()), inner.need);
    auto materialize = [&] {
      set = fixed;
      for (int i : door.current()) set.push_back(inner.verts[i]);
      std::sort(set.begin(), set.end());
    };
    materialize();
    double val = canonical(d, set);
    std::uint64_t steps = 0;
    int removed = 0, added = 0;
    while (true) {
      ++out.nodes_explored;
      if (!have || val + kSlack >= out.value) {
        const double c = canonical(d, set);
        if (better(c, set, out.value, out.vertices, have)) {
          out.value = c;
          out.vertices = set;
          have = true;
        }
      }
      if (!door.next(removed, added)) break;
      const int u = inner.verts[removed];
      const int v = inner.verts[added];
      materialize();
      if (++steps % 4096 == 0) {
        val = canonical(d, set);
      } else {
        const double* rv = d.row(v);
        const double* ru = d.row(u);
        for (int w : set)
          if (w != v) val += rv[w] - ru[w];
      }
    }
    // Advance the outer pools like an odometer.
    std::size_t q = pools.size() - 1;
    bool advanced = false;
    while (q-- > 0) {
      if (next_combination_lex(pos[q], static_cast<int>(pools[q].verts.size()))) {
        for (std::size_t r = q + 1; r + 1 < pools.size(); ++r) std::iota(pos[r].begin(), pos[r].end(), 0);
        advanced = true;
        break;
      }
    }
    if (!advanced) break;
  }
  return out;
}

SubsetSolution heuristic_pools(const Dense& d, const std::vector<Pool>& pools_in, int restarts,
                               std::uint64_t seed) {
  if (restarts < 1) throw InvalidArgument("heuristic needs at least one restart");
  const auto pools = drop_empty(pools_in);
  const int n = d.n;
  std::vector<int> pool_of(n, -1);
  std::vector<int> eligible;
  for (std::size_t q = 0; q < pools.size(); ++q)
    for (int v : pools[q].verts) {
      pool_of[v] = static_cast<int>(q);
      eligible.push_back(v);
    }
  std::sort(eligible.begin(), eligible.end());
  int K = 0;
  for (const auto& p : pools) K += p.need;

  SubsetSolution out;
  bool have = false;
  std::vector<double> gain(n);
  std::vector<char> in(n);
  std::vector<int> left(pools.size());
  for (int r = 0; r < restarts; ++r) {
    SplitMix64 rng(split_seed(seed, static_cast<std::uint64_t>(r)));
    std::fill(gain.begin(), gain.end(), 0.0);
    std::fill(in.begin(), in.end(), 0);
    for (std::size_t q = 0; q < pools.size(); ++q) left[q] = pools[q].need;
    std::vector<int> set;
    auto add = [&](int v) {
      in[v] = 1;
      --left[pool_of[v]];
      set.push_back(v);
      const double* row = d.row(v);
      for (int u = 0; u < n; ++u) gain[u] += row[u];
    };
    if (K > 0) add(eligible[rng.below(eligible.size())]);
    while (static_cast<int>(set.size()) < K) {
      int pick = -1;
      for (int v : eligible)
        if (!in[v] && left[pool_of[v]] > 0 && (pick < 0 || gain[v] > gain[pick])) pick = v;
      add(pick);
    }
    // Best-improvement swaps within a pool until no swap gains more than 1e-12.
    for (long iter = 0; iter < 100L * n * std::max(K, 1); ++iter) {
      double best_delta = 1e-12;
      int bu = -1, bv = -1;
      for (int u : set)
        for (int v : eligible) {
          if (in[v] || pool_of[v] != pool_of[u]) continue;
          const double delta = gain[v] - d.row(u)[v] - gain[u];
          if (delta > best_delta) {
            best_delta = delta;
            bu = u;
            bv = v;
          }
        }
      if (bu < 0) break;
      const double* ru = d.row(bu);
      const double* rv = d.row(bv);
      for (int x = 0; x < n; ++x) gain[x] += rv[x] - ru[x];
      in[bu] = 0;
      in[bv] = 1;
      *std::find(set.begin(), set.end(), bu) = bv;
    }
    std::sort(set.begin(), set.end());
    const double c = canonical(d, set);
    if (better(c, set, out.value, out.vertices, have)) {
      out.value = c;
      out.vertices = std::move(set);
      have = true;
    }
  }
  out.exact = false;
  return out;
}

SubsetSolution solve_pools(const DisorderMatrix& matrix, const std::vector<Pool>& pools_in, int K,
                           const SolveOptions& options) {
  const Dense d = make_dense(matrix);
  const auto pools = drop_empty(pools_in);
  double floor = kNegInf;
  if (options.warm_start_restarts > 0)
    floor = heuristic_pools(d, pools, options.warm_start_restarts, options.warm_start_seed).value;
  BranchAndBound bb(d, pools, K, floor, options.node_budget);
  bb.run();
  SubsetSolution out;
  out.nodes_explored = bb.nodes;
  if (!bb.aborted) {
    out.vertices = bb.best_set;
    out.value = bb.best;
    out.exact = true;
    return out;
  }
  out.budget_exhausted = true;
  if (options.enumeration_fallback && pooled_count(pools) <= kEnumerationLimit) {
    auto e = enumerate_pools(d, pools);
    out.vertices = std::move(e.vertices);
    out.value = e.value;
    out.exact = true;
    return out;
  }
  if (bb.found) {
    out.vertices = bb.best_set;
    out.value = bb.best;
  } else {
    auto h = heuristic_pools(d, pools, std::max(1, options.warm_start_restarts), options.warm_start_seed);
    out.vertices = std::move(h.vertices);
    out.value = h.value;
  }
  out.exact = false;
  return out;
}

void check_k(const DisorderMatrix& m, int K) {
  if (K < 2 || K > m.n()) throw DimensionError("need 2 <= K <= n");
}

std::vector<Pool> single_pool(int n, int K) {
  Pool p{std::vector<int>(n), K};
  std::iota(p.verts.begin(), p.verts.end(), 0);
  return {p};
}

std::vector<Pool> overlap_pools(const DisorderMatrix& m, int K, int z) {
  if (!m.planted()) throw MissingPlantError("overlap-restricted solve needs a planted clique");
  const int n = m.n();
  const int kpc = m.planted()->K;
  if (z < static_cast<int>(curve_min_z(n, K)) || z > K || z > kpc || K - z > n - kpc)
    throw InfeasibleOverlapError("overlap z=" + std::to_string(z) + " is infeasible for n=" +
                                 std::to_string(n) + ", K=" + std::to_string(K));
  Pool inside{{}, z}, outside{{}, K - z};
  for (int v = 0; v < n; ++v) (v < kpc ? inside : outside).verts.push_back(v);
  return {inside, outside};
}

}  // namespace

SubsetSolution psi_exact(const DisorderMatrix& matrix, int K, const SolveOptions& options) {
  check_k(matrix, K);
  return solve_pools(matrix, single_pool(matrix.n(), K), K, options);
}

SubsetSolution psi_enumerate(const DisorderMatrix& matrix, int K) {
  check_k(matrix, K);
  return enumerate_pools(make_dense(matrix), single_pool(matrix.n(), K));
}

SubsetSolution psi_overlap(const DisorderMatrix& matrix, int K, int z, const SolveOptions& options) {
  check_k(matrix, K);
  return solve_pools(matrix, overlap_pools(matrix, K, z), K, options);
}

SubsetSolution psi_overlap_enumerate(const DisorderMatrix& matrix, int K, int z) {
  check_k(matrix, K);
  return enumerate_pools(make_dense(matrix), overlap_pools(matrix, K, z));
}

bool OverlapProfile::all_exact() const {
  return std::all_of(entries.begin(), entries.end(),
                     [](const ProfileEntry& e) { return !e.feasible || e.solution.exact; });
}

double OverlapProfile::max_psi() const {
  double m = kNegInf;
  for (const auto& e : entries)
    if (e.feasible) m = std::max(m, e.solution.value);
  return m;
}

const ProfileEntry* OverlapProfile::at(int z) const {
  for (const auto& e : entries)
    if (e.z == z) return &e;
  return nullptr;
}

OverlapProfile psi_profile(const DisorderMatrix& matrix, int K, const SolveOptions& options,
                           bool only_where_curve_defined) {
  check_k(matrix, K);
  if (!matrix.planted()) throw MissingPlantError("overlap profile needs a planted clique");
  const int n = matrix.n();
  const int kpc = matrix.planted()->K;
  OverlapProfile prof{n, K, {}};
  for (int z = static_cast<int>(curve_min_z(n, K)); z <= K; ++z) {
    ProfileEntry e;
    e.z = z;
    if (K < n) {
      e.gamma = first_moment_curve(n, K, z);
      if (z < K) e.gaussian_gamma = gaussian_first_moment_curve(n, K, z);
    }
    e.feasible = z <= kpc && K - z <= n - kpc;
    if (only_where_curve_defined && !e.gamma) e.feasible = false;
    if (e.feasible) e.solution = psi_overlap(matrix, K, z, options);
    prof.entries.push_back(std::move(e));
  }
  return prof;
}

SubsetSolution psi_lower_heuristic(const DisorderMatrix& matrix, int K, int restarts, std::uint64_t seed) {
  check_k(matrix, K);
  if (restarts < 1) throw InvalidArgument("psi_lower_heuristic needs restarts >= 1");
  return heuristic_pools(make_dense(matrix), single_pool(matrix.n(), K), restarts, seed);
}

std::uint64_t count_exceeding(const DisorderMatrix& matrix, int K, double threshold) {
  check_k(matrix, K);
  const int n = matrix.n();
  if (binomial(n, K) > kEnumerationLimit) throw ResourceError("count_exceeding needs C(n,K) <= 1e8");
  if (threshold == kNegInf) return static_cast<std::uint64_t>(binomial(n, K));
  const Dense d = make_dense(matrix);
  RevolvingDoor door(n, K);
  std::vector<int> set(door.current().begin(), door.current().end());
  double val = canonical(d, set);
  std::uint64_t count = 0, steps = 0;
  int removed = 0, added = 0;
  while (true) {
    if (std::abs(val - threshold) <= kSlack) {
      if (canonical(d, set) >= threshold) ++count;
    } else if (val >= threshold) {
      ++count;
    }
    if (!door.next(removed, added)) break;
    set.assign(door.current().begin(), door.current().end());
    if (++steps % 4096 == 0) {
      val = canonical(d, set);
    } else {
      const double* rv = d.row(added);
      const double* ru = d.row(removed);
      for (int w : set)
        if (w != added) val += rv[w] - ru[w];
    }
  }
  return count;
}

}  // namespace dks
