#include "dks/combinatorics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dks/errors.hpp"

namespace dks {

u128 binomial_exact(int n, int k) {
  if (n < 0 || n > 64) throw DomainError("binomial_exact supports 0 <= n <= 64");
  if (k < 0 || k > n) throw DomainError("binomial needs 0 <= k <= n");
  k = std::min(k, n - k);
  u128 r = 1;
  for (int i = 0; i < k; ++i) r = r * static_cast<u128>(n - i) / static_cast<u128>(i + 1);
  return r;
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  if (n <= 64) return static_cast<double>(binomial_exact(n, k));
  return std::exp(log_binomial(n, k));
}

double log_binomial(long long n, long long k) {
  if (n < 0 || k < 0 || k > n)
    throw DomainError("log_binomial needs 0 <= k <= n (got n=" + std::to_string(n) +
                      ", k=" + std::to_string(k) + ")");
  if (n <= 64)
    return static_cast<double>(std::log(static_cast<long double>(binomial_exact(int(n), int(k)))));
  const long long m = std::min(k, n - k);
  if (m <= 64) {
    long double s = 0.0L;
    for (long long i = 0; i < m; ++i)
      s += std::log(static_cast<long double>(n - i) / static_cast<long double>(i + 1));
    return static_cast<double>(s);
  }
  const long double N = static_cast<long double>(n);
  const long double M = static_cast<long double>(m);
  return static_cast<double>(std::lgamma(N + 1) - std::lgamma(M + 1) - std::lgamma(N - M + 1));
}

double log_add_exp(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

RevolvingDoor::RevolvingDoor(int n, int k) : n_(n), k_(k), c_(k + 1), prev_(k + 1) {
  if (k < 1 || k > n) throw DomainError("revolving door needs 1 <= k <= n");
  for (int j = 0; j < k; ++j) c_[j] = j;
  c_[k] = n;
  c_.resize(k + 1);
}

bool RevolvingDoor::next(int& removed, int& added) {
  // Algorithm R with 1-based c_j stored at c_[j-1]; c_[k] is the sentinel n.
  auto c = [this](int j) -> int& { return c_[j - 1]; };
  const int t = k_;
  prev_ = c_;
  bool moved = false;
  int j = 2;
  bool decrease_step;
  if (t % 2 == 1) {
    if (c(1) + 1 < c(2)) {
      c(1) += 1;
      moved = true;
    }
    decrease_step = true;  // go to R4
  } else {
    if (c(1) > 0) {
      c(1) -= 1;
      moved = true;
    }
    decrease_step = false;  // go to R5
  }
  while (!moved) {
    if (j > t) return false;
    if (decrease_step) {
      // R4: c_j = c_{j-1} + 1 here.
      if (c(j) >= j) {
        c(j) = c(j - 1);
        c(j - 1) = j - 2;
        moved = true;
      } else {
        ++j;
        decrease_step = false;
      }
    } else {
      // R5: c_{j-1} = j - 2 here.
      if (c(j) + 1 < c(j + 1)) {
        c(j - 1) = c(j);
        c(j) += 1;
        moved = true;
      } else {
        ++j;
        decrease_step = true;
      }
    }
  }
  // The stored tuple is sorted ascending; the set changed by one swap.
  removed = added = -1;
  std::size_t a = 0, b = 0;
  while (a < static_cast<std::size_t>(t) || b < static_cast<std::size_t>(t)) {
    if (b >= static_cast<std::size_t>(t) || (a < static_cast<std::size_t>(t) && prev_[a] < c_[b])) {
      removed = prev_[a++];
    } else if (a >= static_cast<std::size_t>(t) || c_[b] < prev_[a]) {
      added = c_[b++];
    } else {
      ++a;
      ++b;
    }
  }
  return true;
}

bool next_combination_lex(std::vector<int>& c, int n) {
  const int k = static_cast<int>(c.size());
  int i = k - 1;
  while (i >= 0 && c[i] == n - k + i) --i;
  if (i < 0) return false;
  ++c[i];
  for (int j = i + 1; j < k; ++j) c[j] = c[j - 1] + 1;
  return true;
}

}  // namespace dks
