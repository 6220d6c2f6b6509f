#ifndef CME_COMBINATORICS_HPP
#define CME_COMBINATORICS_HPP

#include <vector>

#include "cme/rational.hpp"

namespace cme {

// Signed Stirling numbers of the first kind, s1(k,l).  s1(0,0)=1, s1(k,l)=0
// for l>k.  x(x-1)...(x-k+1) = sum_l s1(k,l) x^l.
BigInt stirling1(unsigned k, unsigned l);

// Stirling numbers of the second kind, S2(l,k); number of partitions of an
// l-set into k nonempty blocks.  0 for k>l.
BigInt stirling2(unsigned l, unsigned k);

// Falling factorial (n)_i = n(n-1)...(n-i+1); 0 when n < i.
BigInt falling_factorial(unsigned long n, unsigned i);

BigInt binomial(unsigned long n, unsigned long k);
BigInt factorial(unsigned long n);

// Generalized binomial C(a, k) = a(a-1)...(a-k+1)/k! for rational a.
BigRational binomial_rational(const BigRational& a, unsigned k);

// Rising factorial (Pochhammer) (a)^(j) = a(a+1)...(a+j-1).
BigRational rising_factorial(const BigRational& a, unsigned j);

// b_n = sum_k S2(n,k) a_k.
std::vector<BigRational> stirling_transform(const std::vector<BigRational>& a);

// a_k = sum_n s1(k,n) b_n; inverse of stirling_transform.
std::vector<BigRational> stirling_transform_inverse(const std::vector<BigRational>& b);

}  // namespace cme

#endif
