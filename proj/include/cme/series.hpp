#ifndef CME_SERIES_HPP
#define CME_SERIES_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "cme/rational.hpp"

namespace cme {

// Multi-index over at most 3 species; unused trailing entries stay 0.
using MultiIndex = std::array<int, 3>;

inline int total_degree(const MultiIndex& m) { return m[0] + m[1] + m[2]; }

namespace series_detail {

inline bool is_zero(double v) { return v == 0.0; }
inline bool is_zero(const BigRational& v) { return sgn(v) == 0; }

inline long simplex_size(int vars, int n) {
  switch (vars) {
    case 1: return n + 1;
    case 2: return static_cast<long>(n + 1) * (n + 2) / 2;
    case 3: return static_cast<long>(n + 1) * (n + 2) / 2 * (n + 3) / 3;
    default: throw std::invalid_argument("series supports 1..3 variables");
  }
}

// Rank of a multi-index within the total-degree simplex, matching the
// enumeration order of for_each_index below.
inline long rank(int vars, int n, const MultiIndex& m) {
  if (vars == 1) return m[0];
  if (vars == 2) {
    long r = static_cast<long>(m[0]) * (n + 1) - static_cast<long>(m[0]) * (m[0] - 1) / 2;
    return r + m[1];
  }
  long r = 0;
  for (int a = 0; a < m[0]; ++a) r += simplex_size(2, n - a);
  int rem = n - m[0];
  r += static_cast<long>(m[1]) * (rem + 1) - static_cast<long>(m[1]) * (m[1] - 1) / 2;
  return r + m[2];
}

template <typename F>
void for_each_index(int vars, int n, F&& f) {
  MultiIndex m{0, 0, 0};
  long r = 0;
  if (vars == 1) {
    for (int a = 0; a <= n; ++a) {
      m[0] = a;
      f(m, r++);
    }
  } else if (vars == 2) {
    for (int a = 0; a <= n; ++a)
      for (int b = 0; b <= n - a; ++b) {
        m[0] = a;
        m[1] = b;
        f(m, r++);
      }
  } else {
    for (int a = 0; a <= n; ++a)
      for (int b = 0; b <= n - a; ++b)
        for (int c = 0; c <= n - a - b; ++c) {
          m = {a, b, c};
          f(m, r++);
        }
  }
}

}  // namespace series_detail

// Dense formal power series truncated at a fixed total degree.  The
// coefficient type selects the arithmetic mode: double for numeric work,
// BigRational for exact work.  All operations discard terms above max_deg,
// so results agree with the untruncated computation on every retained
// degree.
template <typename T>
class TruncatedSeries {
 public:
  TruncatedSeries(int vars, int max_deg)
      : vars_(vars), max_deg_(max_deg), c_(series_detail::simplex_size(vars, max_deg), T(0)) {
    if (vars < 1 || vars > 3) throw std::invalid_argument("series supports 1..3 variables");
    if (max_deg < 0) throw std::invalid_argument("negative truncation degree");
  }

  static TruncatedSeries constant(int vars, int max_deg, const T& v) {
    TruncatedSeries s(vars, max_deg);
    s.c_[0] = v;
    return s;
  }

  static TruncatedSeries variable(int vars, int max_deg, int var) {
    MultiIndex m{0, 0, 0};
    m.at(var) = 1;
    return monomial(vars, max_deg, m, T(1));
  }

  static TruncatedSeries monomial(int vars, int max_deg, const MultiIndex& m, const T& v) {
    TruncatedSeries s(vars, max_deg);
    s.set(m, v);
    return s;
  }

  int vars() const { return vars_; }
  int max_deg() const { return max_deg_; }

  const T& coeff(const MultiIndex& m) const {
    check_index(m);
    return c_[series_detail::rank(vars_, max_deg_, m)];
  }
  // Univariate convenience accessor.
  const T& coeff1(int n) const { return coeff(MultiIndex{n, 0, 0}); }

  void set(const MultiIndex& m, const T& v) {
    check_index(m);
    c_[series_detail::rank(vars_, max_deg_, m)] = v;
  }

  const std::vector<T>& raw() const { return c_; }
  std::vector<T>& raw() { return c_; }

  TruncatedSeries& operator+=(const TruncatedSeries& o) {
    check_shape(o);
    for (long i = 0; i < static_cast<long>(c_.size()); ++i) c_[i] += o.c_[i];
    return *this;
  }
  TruncatedSeries& operator-=(const TruncatedSeries& o) {
    check_shape(o);
    for (long i = 0; i < static_cast<long>(c_.size()); ++i) c_[i] -= o.c_[i];
    return *this;
  }
  TruncatedSeries& operator*=(const T& s) {
    for (auto& v : c_) v *= s;
    return *this;
  }
  friend TruncatedSeries operator+(TruncatedSeries a, const TruncatedSeries& b) { return a += b; }
  friend TruncatedSeries operator-(TruncatedSeries a, const TruncatedSeries& b) { return a -= b; }
  friend TruncatedSeries operator*(TruncatedSeries a, const T& s) { return a *= s; }
  friend TruncatedSeries operator*(const T& s, TruncatedSeries a) { return a *= s; }

  // Cauchy product truncated at max_deg.
  friend TruncatedSeries operator*(const TruncatedSeries& a, const TruncatedSeries& b) {
    a.check_shape(b);
    TruncatedSeries out(a.vars_, a.max_deg_);
    const int n = a.max_deg_;
    if (a.vars_ == 1) {
      for (int i = 0; i <= n; ++i) {
        const T& ai = a.c_[i];
        if (series_detail::is_zero(ai)) continue;
        for (int j = 0; j + i <= n; ++j) out.c_[i + j] += ai * b.c_[j];
      }
      return out;
    }
    series_detail::for_each_index(a.vars_, n, [&](const MultiIndex& mi, long ri) {
      const T& ai = a.c_[ri];
      if (series_detail::is_zero(ai)) return;
      const int rem = n - total_degree(mi);
      series_detail::for_each_index(a.vars_, rem, [&](const MultiIndex& mj, long) {
        const T& bj = b.coeff(mj);
        if (series_detail::is_zero(bj)) return;
        MultiIndex mk{mi[0] + mj[0], mi[1] + mj[1], mi[2] + mj[2]};
        out.c_[series_detail::rank(a.vars_, n, mk)] += ai * bj;
      });
    });
    return out;
  }

  TruncatedSeries pow_int(unsigned e) const {
    TruncatedSeries acc = constant(vars_, max_deg_, T(1));
    TruncatedSeries base = *this;
    while (e) {
      if (e & 1) acc = acc * base;
      e >>= 1;
      if (e) base = base * base;
    }
    return acc;
  }

  // Sum of all retained coefficients; equals the value at x = 1 for
  // series whose tail past max_deg vanishes.
  T eval_at_one() const {
    T s(0);
    for (const auto& v : c_) s += v;
    return s;
  }

  TruncatedSeries derivative(int var) const {
    TruncatedSeries out(vars_, max_deg_);
    series_detail::for_each_index(vars_, max_deg_, [&](const MultiIndex& m, long r) {
      if (m.at(var) == 0) return;
      if (series_detail::is_zero(c_[r])) return;
      MultiIndex d = m;
      d.at(var) -= 1;
      out.c_[series_detail::rank(vars_, max_deg_, d)] += T(m.at(var)) * c_[r];
    });
    return out;
  }

  bool same_shape(const TruncatedSeries& o) const {
    return vars_ == o.vars_ && max_deg_ == o.max_deg_;
  }

 private:
  void check_shape(const TruncatedSeries& o) const {
    if (!same_shape(o)) throw std::invalid_argument("series shape mismatch");
  }
  void check_index(const MultiIndex& m) const {
    for (int v = 0; v < 3; ++v)
      if (m[v] < 0 || (v >= vars_ && m[v] != 0))
        throw std::out_of_range("multi-index outside variable range");
    if (total_degree(m) > max_deg_) throw std::out_of_range("multi-index beyond truncation degree");
  }

  int vars_;
  int max_deg_;
  std::vector<T> c_;
};

using SeriesD = TruncatedSeries<double>;
using SeriesQ = TruncatedSeries<BigRational>;

// Horner evaluation of a univariate polynomial (coefficients by degree) at a
// series argument.  Exact w.r.t. truncation for any inner series.
template <typename T>
TruncatedSeries<T> compose_poly(const std::vector<T>& outer, const TruncatedSeries<T>& inner) {
  TruncatedSeries<T> acc(inner.vars(), inner.max_deg());
  for (auto it = outer.rbegin(); it != outer.rend(); ++it) {
    acc = acc * inner;
    acc += TruncatedSeries<T>::constant(inner.vars(), inner.max_deg(), *it);
  }
  return acc;
}

// Composition outer(inner) where outer is a general truncated series.  Only
// valid when inner has zero constant term (then inner^k has minimum degree k
// and the truncated Horner scheme is exact up to max_deg).
template <typename T>
TruncatedSeries<T> compose_series(const TruncatedSeries<T>& outer, const TruncatedSeries<T>& inner) {
  if (outer.vars() != 1) throw std::invalid_argument("compose_series expects univariate outer");
  if (!series_detail::is_zero(inner.coeff(MultiIndex{0, 0, 0})))
    throw std::invalid_argument("compose_series requires inner with zero constant term");
  std::vector<T> coeffs(outer.max_deg() + 1);
  for (int d = 0; d <= outer.max_deg(); ++d) coeffs[d] = outer.coeff1(d);
  return compose_poly(coeffs, inner);
}

// Multivariate polynomial (finite support) evaluated at a vector of series.
template <typename T>
TruncatedSeries<T> compose_multi(const std::map<MultiIndex, T>& outer,
                                 const std::vector<TruncatedSeries<T>>& inner) {
  if (inner.empty()) throw std::invalid_argument("compose_multi needs at least one inner series");
  const int vars = inner[0].vars();
  const int n = inner[0].max_deg();
  for (const auto& s : inner)
    if (!s.same_shape(inner[0])) throw std::invalid_argument("inner series shape mismatch");

  // Cache powers of each substitution series up to the largest exponent used.
  std::array<std::vector<TruncatedSeries<T>>, 3> powers;
  for (int v = 0; v < static_cast<int>(inner.size()); ++v)
    powers[v].push_back(TruncatedSeries<T>::constant(vars, n, T(1)));
  TruncatedSeries<T> acc(vars, n);
  for (const auto& [mi, cv] : outer) {
    if (series_detail::is_zero(cv)) continue;
    TruncatedSeries<T> term = TruncatedSeries<T>::constant(vars, n, cv);
    for (int v = 0; v < static_cast<int>(inner.size()); ++v) {
      while (static_cast<int>(powers[v].size()) <= mi[v])
        powers[v].push_back(powers[v].back() * inner[v]);
      if (mi[v] > 0) term = term * powers[v][mi[v]];
    }
    acc += term;
  }
  return acc;
}

// exp of a truncated series.  Univariate arguments use the first-order ODE
// recurrence w' = u' w; multivariate arguments use the Taylor sum, which
// saturates because the non-constant part has minimum degree 1.
inline SeriesD exp_series(const SeriesD& s) {
  const int n = s.max_deg();
  const double c0 = s.coeff(MultiIndex{0, 0, 0});
  const double scale = std::exp(c0);
  if (s.vars() == 1) {
    SeriesD w(1, n);
    std::vector<double> u(n + 1);
    for (int d = 1; d <= n; ++d) u[d] = s.coeff1(d);
    w.raw()[0] = 1.0;
    for (int k = 1; k <= n; ++k) {
      double acc = 0.0;
      for (int j = 1; j <= k; ++j) acc += j * u[j] * w.raw()[k - j];
      w.raw()[k] = acc / k;
    }
    return w * scale;
  }
  SeriesD u = s;
  u.set(MultiIndex{0, 0, 0}, 0.0);
  SeriesD acc = SeriesD::constant(s.vars(), n, 1.0);
  SeriesD term = acc;
  for (int k = 1; k <= n; ++k) {
    term = term * u;
    term *= 1.0 / k;
    acc += term;
  }
  return acc * scale;
}

// exp of a polynomial given as dense univariate coefficients.
inline SeriesD exp_poly(const std::vector<double>& p, int max_deg) {
  SeriesD s(1, max_deg);
  for (int d = 0; d < static_cast<int>(p.size()); ++d) {
    if (d > max_deg) {
      if (p[d] != 0.0) throw std::invalid_argument("exp_poly argument exceeds truncation degree");
      continue;
    }
    s.set(MultiIndex{d, 0, 0}, p[d]);
  }
  return exp_series(s);
}

// s^mu for real mu >= 0 via the coefficient recurrence
// (s^mu)' s = mu s' s^mu; requires a nonzero constant term.
inline SeriesD pow_real(const SeriesD& s, double mu) {
  if (s.vars() != 1) throw std::invalid_argument("pow_real expects a univariate series");
  const int n = s.max_deg();
  const double s0 = s.coeff1(0);
  if (s0 == 0.0) throw std::domain_error("pow_real requires nonzero constant term");
  if (mu == 0.0) return SeriesD::constant(1, n, 1.0);
  SeriesD w(1, n);
  w.raw()[0] = std::pow(s0, mu);
  for (int k = 1; k <= n; ++k) {
    double acc = 0.0;
    for (int j = 1; j <= k; ++j) acc += (j * (mu + 1.0) - k) * s.coeff1(j) * w.raw()[k - j];
    w.raw()[k] = acc / (k * s0);
  }
  return w;
}

}  // namespace cme

#endif
