#ifndef CME_MOMENTS_HPP
#define CME_MOMENTS_HPP

#include <optional>
#include <vector>

#include "cme/rational_poly.hpp"
#include "cme/reaction.hpp"
#include "cme/series.hpp"

namespace cme {

// One additive contribution to an evolution operator for a moment
// generating function: scalar * prefactor * d^deriv.  The prefactor is
// either (e^{lambda . exp_shift} - 1) or a polynomial in nu.
struct OperatorTerm {
  std::optional<std::vector<int>> exp_shift;  // set for the exponential form
  MultiPoly poly{1};                          // set for the polynomial form
  MultiIndex deriv{0, 0, 0};
  BigRational scalar{1};
};

struct OperatorRep {
  int vars = 1;
  std::vector<OperatorTerm> terms;
};

// Evolution operator acting on the exponential moment generating function:
// per reaction r (e^{lambda.(o-i)} - 1) sum_l s1(i,l) d^l, with per-species
// Stirling products in the multivariate case.
OperatorRep build_egf_operator(const ReactionSystem& system);

// Evolution operator acting on the factorial moment generating function:
// per reaction r ((nu+1)^o - (nu+1)^i) d^i.
OperatorRep build_fmgf_operator(const ReactionSystem& system);

// Substitutes nu = e^lambda - 1 into an EGF operator and collects the result
// as polynomial prefactors per derivative order.  Exact; throws if a
// negative power of (nu+1) survives (it never does for valid operators).
OperatorRep stirling_transform_operator(const OperatorRep& egf_op);

// Collects an operator into a map deriv-order -> polynomial prefactor for
// exact comparison (exponential terms are rejected).
std::map<MultiIndex, MultiPoly> collect_polynomial_operator(const OperatorRep& op);

// Linear ODE system for the factorial moments f_n, |n| <= max_order.
// Row i reads d f_{index[i]}/dt = constant[i] + sum_j matrix[i][j] f_{index[j]}
// plus any open (above-cutoff) dependencies listed separately.
struct MomentODE {
  std::vector<MultiIndex> indices;
  std::vector<std::vector<BigRational>> matrix;
  std::vector<BigRational> constant;
  struct OpenDependency {
    int row;
    MultiIndex target;
    BigRational coeff;
  };
  std::vector<OpenDependency> open;

  bool closed() const { return open.empty(); }
  int find(const MultiIndex& m) const;
};

MomentODE factorial_moment_system(const ReactionSystem& system, int max_order);

// Fixed-step RK4 integration of a closed MomentODE from the system's initial
// factorial moments; returns the moment vector at each requested time.
std::vector<std::vector<double>> integrate_moment_ode(const MomentODE& ode,
                                                      const ReactionSystem& system,
                                                      const std::vector<double>& times,
                                                      int steps_per_unit = 2048);

struct FirstOrderClosure {
  bool closed = false;
  std::vector<std::vector<BigRational>> matrix;  // d<n_a>/dt = matrix <n> + source
  std::vector<BigRational> source;
};

FirstOrderClosure first_order_closure(const ReactionSystem& system);

// First cumulants from a PGF: c1 (mean), c2 (variance), c3.  Factorial
// moments are read off the series coefficients; order <= 3.
std::vector<double> cumulants_from_pgf(const SeriesD& pgf, int order);

}  // namespace cme

#endif
