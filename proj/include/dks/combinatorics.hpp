#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace dks {

using u128 = unsigned __int128;

/// Exact C(n, k) for n <= 64 (every such value fits in 64 bits).
u128 binomial_exact(int n, int k);

/// C(n, k) as a double (may round; inf on overflow).
double binomial(int n, int k);

/// Natural log of C(n, k). Exact integer path for n <= 64; otherwise a
/// summed-log product when min(k, n-k) is small and lgamma (long double) beyond.
double log_binomial(long long n, long long k);

inline long long choose2(long long k) { return k * (k - 1) / 2; }

/// log(exp(a) + exp(b)) without overflow.
double log_add_exp(double a, double b);

/// k-subsets of {0..n-1} in revolving-door (minimal change) order: each step
/// removes one element and inserts another. Knuth TAOCP 7.2.1.3, Algorithm R.
class RevolvingDoor {
 public:
  RevolvingDoor(int n, int k);

  /// Current subset, sorted ascending.
  std::span<const int> current() const { return {c_.data(), static_cast<std::size_t>(k_)}; }

  /// Advances; returns false once every subset has been visited. On success
  /// `removed` and `added` describe the swap.
  bool next(int& removed, int& added);

 private:
  int n_;
  int k_;
  std::vector<int> c_;     // c_[0..k-1], plus sentinel c_[k] = n
  std::vector<int> prev_;  // scratch copy for swap detection
};

/// Successor of a sorted k-subset of {0..n-1} in lexicographic order.
bool next_combination_lex(std::vector<int>& c, int n);

}  // namespace dks
