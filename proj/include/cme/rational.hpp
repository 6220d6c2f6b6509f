#ifndef CME_RATIONAL_HPP
#define CME_RATIONAL_HPP

#include <gmpxx.h>

#include <stdexcept>
#include <string>

namespace cme {

using BigInt = mpz_class;
using BigRational = mpq_class;

inline BigRational make_rational(long num, long den) {
  if (den == 0) throw std::invalid_argument("rational with zero denominator");
  BigRational r(num, den);
  r.canonicalize();
  return r;
}

inline double to_double(const BigRational& q) { return q.get_d(); }

inline BigRational rational_pow(const BigRational& base, long e) {
  if (e < 0) {
    if (base == 0) throw std::domain_error("0 raised to negative power");
    return 1 / rational_pow(base, -e);
  }
  BigRational acc(1), b(base);
  while (e) {
    if (e & 1) acc *= b;
    e >>= 1;
    if (e) b *= b;
  }
  return acc;
}

// Parses "3", "-1/40", "0.025", "2.5e-3" into an exact rational.
inline BigRational parse_rational(const std::string& text) {
  std::string s = text;
  auto bad = [&]() { return std::invalid_argument("malformed rational literal: '" + text + "'"); };
  if (s.empty()) throw bad();
  auto slash = s.find('/');
  if (slash != std::string::npos) {
    BigInt num, den;
    if (num.set_str(s.substr(0, slash), 10) != 0) throw bad();
    if (den.set_str(s.substr(slash + 1), 10) != 0 || den == 0) throw bad();
    BigRational r(num, den);
    r.canonicalize();
    return r;
  }
  long exp10 = 0;
  auto epos = s.find_first_of("eE");
  if (epos != std::string::npos) {
    try {
      exp10 = std::stol(s.substr(epos + 1));
    } catch (...) {
      throw bad();
    }
    s = s.substr(0, epos);
  }
  auto dot = s.find('.');
  if (dot != std::string::npos) {
    exp10 -= static_cast<long>(s.size() - dot - 1);
    s.erase(dot, 1);
  }
  if (s.empty() || s == "-" || s == "+") throw bad();
  BigInt mant;
  if (mant.set_str(s, 10) != 0) throw bad();
  BigRational r(mant);
  BigInt scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(exp10 < 0 ? -exp10 : exp10));
  if (exp10 >= 0)
    r *= BigRational(scale);
  else
    r /= BigRational(scale);
  r.canonicalize();
  return r;
}

}  // namespace cme

#endif
