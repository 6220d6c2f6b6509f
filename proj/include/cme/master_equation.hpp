#ifndef CME_MASTER_EQUATION_HPP
#define CME_MASTER_EQUATION_HPP

#include <vector>

#include "cme/reaction.hpp"

namespace cme {

// Truncated infinitesimal generator on the box prod_j {0..n_max_j}.
// Outflow crossing the box boundary is discarded (absorbing truncation), so
// columns are substochastic and the lost mass shows up as measurable leak.
struct GeneratorMatrix {
  std::vector<int> n_max;
  long dim = 0;

  struct Triplet {
    long row, col;
    double rate;
  };
  std::vector<Triplet> triplets;

  double max_abs_diagonal = 0.0;

  long state_index(const std::vector<int>& counts) const;
  std::vector<int> state_counts(long index) const;
};

GeneratorMatrix build_generator(const ReactionSystem& system, const std::vector<int>& n_max);

struct DistributionSnapshot {
  double time = 0.0;
  std::map<std::vector<int>, double> probs;
  double leak = 0.0;  // 1 - sum(probs)
};

struct NumericGuardError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Classical fixed-step RK4 trajectory of dpsi/dt = L psi, sampled at the
// requested times (ascending, >= 0).  dt must satisfy dt*max|diag| <= 0.1.
std::vector<DistributionSnapshot> integrate_master(const ReactionSystem& system,
                                                   const std::vector<double>& sample_times,
                                                   const std::vector<int>& n_max, double dt);

// Truncation sizing: initial support plus six standard deviations of growth,
// estimated from the deterministic first/second factorial-moment equations
// when those close (semi-linear systems); species that no reaction can grow
// keep their initial maximum.
std::vector<int> default_truncation(const ReactionSystem& system, double t_final);

// Suggested step honoring the stability guard with headroom for the stated
// oracle accuracy: dt = accuracy_factor / max|diag|.
double default_dt(const ReactionSystem& system, const std::vector<int>& n_max,
                  double accuracy_factor = 0.02);

}  // namespace cme

#endif
