#ifndef CME_SEMILINEAR_HPP
#define CME_SEMILINEAR_HPP

#include <map>
#include <vector>

#include "cme/reaction.hpp"
#include "cme/series.hpp"

namespace cme {

// Standard PGF factories (all normalized: coefficients sum to 1 up to
// truncation tail).
SeriesD pgf_pois(double mu, int vars, int max_deg, int var = 0);
SeriesD pgf_bern(double p, int vars, int max_deg, int var = 0);       // (1-p) + p x
SeriesD pgf_geom(double p, int vars, int max_deg, int var = 0);       // x p / (1 - x(1-p))
SeriesD pgf_geom2(double p, int max_deg);                             // p / (1 - x(1-p))
SeriesD pgf_a2pois(double mu, int vars, int max_deg, int var = 0);    // e^{mu(x^2-1)}

// Closed-form action of e^{tH} for a single non-binary reaction:
// P(t;x) = g(t;x) * P(0; T(t;x)).
struct ElementarySolution {
  SeriesD g;
  std::vector<SeriesD> T;  // substitution series, one per species
};

// Throws std::invalid_argument for binary reactions (input_total > 1) and
// for output patterns beyond two particles.
ElementarySolution elementary_solution(const Reaction& reaction, double t, int max_deg);

// P0 as finite-support PGF: count-vector -> probability.
SeriesD apply_solution(const ElementarySolution& sol, const InitialDistribution& p0);

// Exact PGF of the one-species reaction system
//   0->A (beta), 0->2A (gamma), A->0 (tau), A->2A (alpha)
// covering the four parameter cases (alpha=tau=0; alpha=tau>0; alpha!=tau,
// alpha>0; alpha=0, tau>0).
SeriesD composite_one_species(double alpha, double beta, double gamma, double tau, double t,
                              const std::map<int, double>& p0, int max_deg);

// Max coefficient residual of the one-parameter-group identities
// T(l+m;x) = T(m;T(l;x)) and g(l+m;x) = g(l;x) g(m;T(l;x)).
double semigroup_residual(const Reaction& reaction, double lambda, double mu, int max_deg);

// Closed-form solve for a whole system, dispatching per class.  Supports
// single-species NonBinary systems whose reactions are within
// {0->A, 0->2A, A->0, A->2A}, single non-binary reactions of any species
// count (Table rows), and BinarySJ systems (spectral route).  Throws
// std::domain_error otherwise.
SeriesD solve_closed(const ReactionSystem& system, double t, int max_deg);

}  // namespace cme

#endif
