#include "cme/ssa.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <thread>

namespace cme {

namespace {

// splitmix64: stateless, counter-friendly, passes the usual batteries.
std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

struct Stream {
  std::uint64_t state;
  Stream(std::uint64_t seed, std::uint64_t k) {
    std::uint64_t s = seed;
    std::uint64_t a = splitmix64(s);
    state = a ^ (k * 0xD1342543DE82EF95ULL + 0x2545F4914F6CDD1DULL);
    // decorrelate consecutive stream ids
    splitmix64(state);
    splitmix64(state);
  }
  double uniform() {  // (0, 1]
    const std::uint64_t bits = splitmix64(state) >> 11;
    return (static_cast<double>(bits) + 1.0) * 0x1.0p-53;
  }
};

int pick_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("CME_EXACT_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

}  // namespace

double TrajectoryEnsemble::mean(int time_idx, int species) const {
  double acc = 0.0;
  for (const auto& [counts, c] : histograms.at(time_idx))
    acc += static_cast<double>(c) * counts[species];
  return acc / n_traj;
}

double TrajectoryEnsemble::variance(int time_idx, int species) const {
  const double m = mean(time_idx, species);
  double acc = 0.0;
  for (const auto& [counts, c] : histograms.at(time_idx)) {
    const double d = counts[species] - m;
    acc += static_cast<double>(c) * d * d;
  }
  return n_traj > 1 ? acc / (n_traj - 1) : 0.0;
}

double TrajectoryEnsemble::mean_stderr(int time_idx, int species) const {
  return std::sqrt(variance(time_idx, species) / n_traj);
}

double TrajectoryEnsemble::empirical_prob(int time_idx, const std::vector<int>& counts) const {
  const auto& h = histograms.at(time_idx);
  auto it = h.find(counts);
  return it == h.end() ? 0.0 : static_cast<double>(it->second) / n_traj;
}

TrajectoryEnsemble simulate(const ReactionSystem& system, const std::vector<double>& sample_times,
                            int n_traj, std::uint64_t seed, int n_threads) {
  system.validate();
  if (n_traj < 1) throw std::invalid_argument("n_traj must be >= 1");
  for (size_t i = 0; i + 1 < sample_times.size(); ++i)
    if (sample_times[i] > sample_times[i + 1])
      throw std::invalid_argument("sample times must be ascending");

  const int nsp = system.n_species();
  const int nrx = static_cast<int>(system.reactions.size());
  std::vector<double> rates(nrx);
  for (int r = 0; r < nrx; ++r) rates[r] = system.reactions[r].rate_d();

  // cumulative initial distribution for state sampling
  std::vector<std::pair<double, const std::vector<int>*>> init_cdf;
  double cum = 0.0;
  for (const auto& [counts, p] : system.initial) {
    cum += p;
    init_cdf.push_back({cum, &counts});
  }
  if (init_cdf.empty()) throw std::invalid_argument("SSA requires an initial distribution");

  const int nt = static_cast<int>(sample_times.size());
  const int threads = pick_threads(n_threads);
  std::vector<std::vector<std::map<std::vector<int>, long>>> partial(
      threads, std::vector<std::map<std::vector<int>, long>>(nt));

  auto run_block = [&](int thread_idx, int lo, int hi) {
    auto& hist = partial[thread_idx];
    std::vector<int> state(nsp);
    std::vector<double> prop(nrx);
    for (int k = lo; k < hi; ++k) {
      Stream rng(seed, static_cast<std::uint64_t>(k));
      // draw initial state
      const double u0 = rng.uniform();
      state = *init_cdf.back().second;
      for (const auto& [c, counts] : init_cdf)
        if (u0 <= c) {
          state = *counts;
          break;
        }
      double t = 0.0;
      int next_sample = 0;
      while (next_sample < nt) {
        double total = 0.0;
        for (int r = 0; r < nrx; ++r) {
          double a = rates[r];
          for (int j = 0; j < nsp && a != 0.0; ++j) {
            for (int c = 0; c < system.reactions[r].inputs[j]; ++c) a *= (state[j] - c);
            if (state[j] < system.reactions[r].inputs[j]) a = 0.0;
          }
          prop[r] = std::max(a, 0.0);
          total += prop[r];
        }
        double t_next;
        if (total <= 0.0) {
          t_next = std::numeric_limits<double>::infinity();  // absorbing state
        } else {
          t_next = t - std::log(rng.uniform()) / total;
        }
        while (next_sample < nt && sample_times[next_sample] < t_next) {
          hist[next_sample][state] += 1;
          ++next_sample;
        }
        if (next_sample >= nt) break;
        if (total <= 0.0) break;
        t = t_next;
        double pick = rng.uniform() * total;
        int chosen = nrx - 1;
        for (int r = 0; r < nrx; ++r) {
          pick -= prop[r];
          if (pick <= 0.0) {
            chosen = r;
            break;
          }
        }
        for (int j = 0; j < nsp; ++j)
          state[j] += system.reactions[chosen].outputs[j] - system.reactions[chosen].inputs[j];
      }
    }
  };

  if (threads == 1) {
    run_block(0, 0, n_traj);
  } else {
    std::vector<std::thread> pool;
    const int block = (n_traj + threads - 1) / threads;
    for (int w = 0; w < threads; ++w) {
      const int lo = w * block, hi = std::min(n_traj, (w + 1) * block);
      if (lo >= hi) break;
      pool.emplace_back(run_block, w, lo, hi);
    }
    for (auto& th : pool) th.join();
  }

  TrajectoryEnsemble out;
  out.n_traj = n_traj;
  out.seed = seed;
  out.sample_times = sample_times;
  out.histograms.assign(nt, {});
  for (const auto& part : partial)
    for (int i = 0; i < nt; ++i)
      for (const auto& [counts, c] : part[i]) out.histograms[i][counts] += c;
  return out;
}

}  // namespace cme
