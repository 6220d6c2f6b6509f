#include "cme/master_equation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cme/combinatorics.hpp"
#include "cme/moments.hpp"

namespace cme {

long GeneratorMatrix::state_index(const std::vector<int>& counts) const {
  long idx = 0;
  for (size_t j = 0; j < n_max.size(); ++j) {
    if (counts[j] < 0 || counts[j] > n_max[j]) return -1;
    idx = idx * (n_max[j] + 1) + counts[j];
  }
  return idx;
}

std::vector<int> GeneratorMatrix::state_counts(long index) const {
  std::vector<int> counts(n_max.size());
  for (int j = static_cast<int>(n_max.size()) - 1; j >= 0; --j) {
    counts[j] = static_cast<int>(index % (n_max[j] + 1));
    index /= (n_max[j] + 1);
  }
  return counts;
}

GeneratorMatrix build_generator(const ReactionSystem& system, const std::vector<int>& n_max) {
  system.validate();
  if (n_max.size() != system.species.size())
    throw std::invalid_argument("n_max size differs from species count");
  GeneratorMatrix g;
  g.n_max = n_max;
  long dim = 1;
  for (int m : n_max) {
    if (m < 0) throw std::invalid_argument("negative truncation");
    dim *= (m + 1);
    if (dim > 40'000'000L) throw std::invalid_argument("truncated state space too large");
  }
  g.dim = dim;

  const int nsp = system.n_species();
  std::vector<double> diag(dim, 0.0);
  std::vector<int> counts(nsp, 0);
  for (long s = 0; s < dim; ++s) {
    counts = g.state_counts(s);
    for (const auto& r : system.reactions) {
      double a = r.rate_d();
      for (int j = 0; j < nsp && a != 0.0; ++j)
        a *= to_double(BigRational(falling_factorial(counts[j], r.inputs[j])));
      if (a == 0.0) continue;
      diag[s] -= a;
      std::vector<int> target = counts;
      bool inside = true;
      for (int j = 0; j < nsp; ++j) {
        target[j] += r.outputs[j] - r.inputs[j];
        if (target[j] < 0 || target[j] > n_max[j]) inside = false;
      }
      if (inside) g.triplets.push_back({g.state_index(target), s, a});
    }
  }
  for (long s = 0; s < dim; ++s)
    if (diag[s] != 0.0) g.triplets.push_back({s, s, diag[s]});
  for (long s = 0; s < dim; ++s) g.max_abs_diagonal = std::max(g.max_abs_diagonal, -diag[s]);
  return g;
}

namespace {

struct Csr {
  std::vector<long> row_start;
  std::vector<long> col;
  std::vector<double> val;

  explicit Csr(const GeneratorMatrix& g) {
    std::vector<long> count(g.dim + 1, 0);
    for (const auto& t : g.triplets) ++count[t.row + 1];
    row_start.assign(g.dim + 1, 0);
    for (long i = 0; i < g.dim; ++i) row_start[i + 1] = row_start[i] + count[i + 1];
    col.resize(g.triplets.size());
    val.resize(g.triplets.size());
    std::vector<long> cursor(row_start.begin(), row_start.end() - 1);
    for (const auto& t : g.triplets) {
      col[cursor[t.row]] = t.col;
      val[cursor[t.row]] = t.rate;
      ++cursor[t.row];
    }
  }

  void apply(const std::vector<double>& x, std::vector<double>& y) const {
    const long n = static_cast<long>(row_start.size()) - 1;
    for (long i = 0; i < n; ++i) {
      double acc = 0.0;
      for (long k = row_start[i]; k < row_start[i + 1]; ++k) acc += val[k] * x[col[k]];
      y[i] = acc;
    }
  }
};

}  // namespace

std::vector<DistributionSnapshot> integrate_master(const ReactionSystem& system,
                                                   const std::vector<double>& sample_times,
                                                   const std::vector<int>& n_max, double dt) {
  if (dt <= 0.0) throw std::invalid_argument("dt must be positive");
  for (size_t i = 0; i + 1 < sample_times.size(); ++i)
    if (sample_times[i] > sample_times[i + 1])
      throw std::invalid_argument("sample times must be ascending");
  if (!sample_times.empty() && sample_times.front() < 0.0)
    throw std::invalid_argument("sample times must be nonnegative");

  GeneratorMatrix g = build_generator(system, n_max);
  if (dt * g.max_abs_diagonal > 0.1)
    throw NumericGuardError("dt * max|diagonal| exceeds 0.1; reduce dt or the truncation");

  std::vector<double> psi(g.dim, 0.0);
  for (const auto& [counts, p] : system.initial) {
    long idx = g.state_index(counts);
    if (idx < 0) throw std::invalid_argument("initial support lies outside the truncation box");
    psi[idx] = p;
  }

  Csr L(g);
  std::vector<double> k1(g.dim), k2(g.dim), k3(g.dim), k4(g.dim), tmp(g.dim);
  auto rk4_step = [&](double h) {
    L.apply(psi, k1);
    for (long i = 0; i < g.dim; ++i) tmp[i] = psi[i] + 0.5 * h * k1[i];
    L.apply(tmp, k2);
    for (long i = 0; i < g.dim; ++i) tmp[i] = psi[i] + 0.5 * h * k2[i];
    L.apply(tmp, k3);
    for (long i = 0; i < g.dim; ++i) tmp[i] = psi[i] + h * k3[i];
    L.apply(tmp, k4);
    for (long i = 0; i < g.dim; ++i)
      psi[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  };

  std::vector<DistributionSnapshot> out;
  double t = 0.0;
  for (double target : sample_times) {
    while (target - t > 1e-14) {
      const double h = std::min(dt, target - t);
      rk4_step(h);
      t += h;
    }
    DistributionSnapshot snap;
    snap.time = target;
    double sum = 0.0;
    for (long s = 0; s < g.dim; ++s) {
      sum += psi[s];
      if (psi[s] != 0.0) snap.probs[g.state_counts(s)] = psi[s];
    }
    snap.leak = 1.0 - sum;
    out.push_back(std::move(snap));
  }
  return out;
}

std::vector<int> default_truncation(const ReactionSystem& system, double t_final) {
  const int nsp = system.n_species();
  std::vector<int> n_max(nsp, 0);
  std::vector<bool> can_grow(nsp, false);
  for (const auto& r : system.reactions)
    for (int j = 0; j < nsp; ++j)
      if (r.outputs[j] > r.inputs[j] && sgn(r.rate) > 0) can_grow[j] = true;

  bool semi_linear = true;
  for (const auto& r : system.reactions)
    if (r.input_total() > 1) semi_linear = false;

  std::vector<double> headroom(nsp, 0.0);
  if (semi_linear && t_final > 0.0) {
    MomentODE ode = factorial_moment_system(system, 2);
    // sample the moment trajectory to catch non-monotone growth
    std::vector<double> ts;
    for (int i = 1; i <= 32; ++i) ts.push_back(t_final * i / 32.0);
    auto traj = integrate_moment_ode(ode, system, ts);
    for (int j = 0; j < nsp; ++j) {
      MultiIndex m1{0, 0, 0}, m2{0, 0, 0};
      m1[j] = 1;
      m2[j] = 2;
      const int i1 = ode.find(m1), i2 = ode.find(m2);
      double peak = 0.0;
      for (const auto& f : traj) {
        const double mean = f[i1];
        const double var = std::max(0.0, f[i2] + mean - mean * mean);
        peak = std::max(peak, mean + 6.0 * std::sqrt(var + 1.0));
      }
      headroom[j] = peak;
    }
  }

  for (int j = 0; j < nsp; ++j) {
    const int m0 = system.max_initial_count(j);
    double bound = m0;
    if (can_grow[j]) {
      if (semi_linear)
        bound = std::max(bound, headroom[j]);
      else
        bound = m0 + 6.0 * std::sqrt(m0 + 10.0) + 20.0;  // crude fallback, user-overridable
    }
    n_max[j] = static_cast<int>(std::ceil(bound)) + 2;
  }
  return n_max;
}

double default_dt(const ReactionSystem& system, const std::vector<int>& n_max,
                  double accuracy_factor) {
  GeneratorMatrix g = build_generator(system, n_max);
  if (g.max_abs_diagonal == 0.0) return 0.1;
  return accuracy_factor / g.max_abs_diagonal;
}

}  // namespace cme
