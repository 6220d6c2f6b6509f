#include "cme/combinatorics.hpp"

#include <mutex>

namespace cme {

namespace {

// Triangle tables grown on demand.  Guarded: concurrent readers share them.
struct StirlingTables {
  std::mutex mtx;
  std::vector<std::vector<BigInt>> s1;  // s1[k][l], l<=k
  std::vector<std::vector<BigInt>> s2;  // s2[l][k], k<=l

  void grow_s1(unsigned k) {
    if (s1.empty()) s1.push_back({BigInt(1)});
    while (s1.size() <= k) {
      unsigned n = static_cast<unsigned>(s1.size());  // building row n from row n-1
      const auto& prev = s1.back();
      std::vector<BigInt> row(n + 1);
      for (unsigned l = 0; l <= n; ++l) {
        // s1(n, l) = s1(n-1, l-1) - (n-1) * s1(n-1, l)
        BigInt v = 0;
        if (l >= 1 && l - 1 < prev.size()) v += prev[l - 1];
        if (l < prev.size()) v -= BigInt(n - 1) * prev[l];
        row[l] = v;
      }
      s1.push_back(std::move(row));
    }
  }

  void grow_s2(unsigned l) {
    if (s2.empty()) s2.push_back({BigInt(1)});
    while (s2.size() <= l) {
      unsigned n = static_cast<unsigned>(s2.size());
      const auto& prev = s2.back();
      std::vector<BigInt> row(n + 1);
      for (unsigned k = 0; k <= n; ++k) {
        // S2(n, k) = k * S2(n-1, k) + S2(n-1, k-1)
        BigInt v = 0;
        if (k < prev.size()) v += BigInt(k) * prev[k];
        if (k >= 1 && k - 1 < prev.size()) v += prev[k - 1];
        row[k] = v;
      }
      s2.push_back(std::move(row));
    }
  }
};

StirlingTables& tables() {
  static StirlingTables t;
  return t;
}

}  // namespace

BigInt stirling1(unsigned k, unsigned l) {
  if (l > k) return 0;
  auto& t = tables();
  std::lock_guard<std::mutex> lock(t.mtx);
  t.grow_s1(k);
  return t.s1[k][l];
}

BigInt stirling2(unsigned l, unsigned k) {
  if (k > l) return 0;
  auto& t = tables();
  std::lock_guard<std::mutex> lock(t.mtx);
  t.grow_s2(l);
  return t.s2[l][k];
}

BigInt falling_factorial(unsigned long n, unsigned i) {
  if (n < i) return 0;
  BigInt r = 1;
  for (unsigned j = 0; j < i; ++j) r *= BigInt(n - j);
  return r;
}

BigInt binomial(unsigned long n, unsigned long k) {
  BigInt r;
  if (k > n) return 0;
  mpz_bin_uiui(r.get_mpz_t(), n, k);
  return r;
}

BigInt factorial(unsigned long n) {
  BigInt r;
  mpz_fac_ui(r.get_mpz_t(), n);
  return r;
}

BigRational binomial_rational(const BigRational& a, unsigned k) {
  BigRational num = 1;
  for (unsigned j = 0; j < k; ++j) num *= a - j;
  return num / BigRational(factorial(k));
}

BigRational rising_factorial(const BigRational& a, unsigned j) {
  BigRational r = 1;
  for (unsigned i = 0; i < j; ++i) r *= a + i;
  return r;
}

std::vector<BigRational> stirling_transform(const std::vector<BigRational>& a) {
  std::vector<BigRational> b(a.size());
  for (unsigned n = 0; n < a.size(); ++n) {
    BigRational acc = 0;
    for (unsigned k = 0; k <= n; ++k) acc += BigRational(stirling2(n, k)) * a[k];
    b[n] = acc;
  }
  return b;
}

std::vector<BigRational> stirling_transform_inverse(const std::vector<BigRational>& b) {
  std::vector<BigRational> a(b.size());
  for (unsigned k = 0; k < b.size(); ++k) {
    BigRational acc = 0;
    for (unsigned n = 0; n <= k; ++n) acc += BigRational(stirling1(k, n)) * b[n];
    a[k] = acc;
  }
  return a;
}

}  // namespace cme
