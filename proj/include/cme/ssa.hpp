#ifndef CME_SSA_HPP
#define CME_SSA_HPP

#include <cstdint>
#include <map>
#include <vector>

#include "cme/reaction.hpp"

namespace cme {

struct TrajectoryEnsemble {
  int n_traj = 0;
  std::uint64_t seed = 0;
  std::vector<double> sample_times;
  // per sample time: state -> trajectory count (totals equal n_traj)
  std::vector<std::map<std::vector<int>, long>> histograms;

  double mean(int time_idx, int species) const;
  double variance(int time_idx, int species) const;
  // standard error of the mean
  double mean_stderr(int time_idx, int species) const;
  double empirical_prob(int time_idx, const std::vector<int>& counts) const;
};

// Direct-method Gillespie simulation.  Trajectory k draws from an RNG stream
// derived from (seed, k), so the ensemble is independent of evaluation order
// and of the thread count.  n_threads = 0 picks a default.
TrajectoryEnsemble simulate(const ReactionSystem& system, const std::vector<double>& sample_times,
                            int n_traj, std::uint64_t seed, int n_threads = 0);

}  // namespace cme

#endif
