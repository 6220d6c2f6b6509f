#include "cme/moments.hpp"

#include <algorithm>
#include <stdexcept>

#include "cme/combinatorics.hpp"

namespace cme {

namespace {

int check_vars(const ReactionSystem& system) {
  const int n = system.n_species();
  if (n < 1 || n > 3) throw std::invalid_argument("moment operators support 1..3 species");
  return n;
}

// prod_j s1(i_j, k_j)
BigRational stirling1_product(const std::vector<int>& i, const MultiIndex& k) {
  BigRational r(1);
  for (size_t j = 0; j < i.size(); ++j) r *= BigRational(stirling1(i[j], k[j]));
  return r;
}

}  // namespace

OperatorRep build_egf_operator(const ReactionSystem& system) {
  const int n = check_vars(system);
  OperatorRep op;
  op.vars = n;
  for (const auto& r : system.reactions) {
    std::vector<int> shift(n);
    for (int j = 0; j < n; ++j) shift[j] = r.outputs[j] - r.inputs[j];
    // sum over 0 <= k <= i (componentwise)
    MultiIndex k{0, 0, 0};
    while (true) {
      BigRational s = stirling1_product(r.inputs, k);
      if (sgn(s) != 0) {
        OperatorTerm t;
        t.exp_shift = shift;
        t.deriv = k;
        t.scalar = r.rate * s;
        op.terms.push_back(std::move(t));
      }
      int j = 0;
      for (; j < n; ++j) {
        if (k[j] < r.inputs[j]) {
          ++k[j];
          break;
        }
        k[j] = 0;
      }
      if (j == n) break;
    }
  }
  return op;
}

OperatorRep build_fmgf_operator(const ReactionSystem& system) {
  const int n = check_vars(system);
  OperatorRep op;
  op.vars = n;
  for (const auto& r : system.reactions) {
    OperatorTerm t;
    t.poly = MultiPoly::shifted_power(n, r.outputs) - MultiPoly::shifted_power(n, r.inputs);
    for (int j = 0; j < n; ++j) t.deriv[j] = r.inputs[j];
    t.scalar = r.rate;
    if (!t.poly.is_zero()) op.terms.push_back(std::move(t));
  }
  return op;
}

OperatorRep stirling_transform_operator(const OperatorRep& egf_op) {
  if (egf_op.vars != 1)
    throw std::invalid_argument("operator Stirling transform implemented for one species");
  // Work per derivative order with Laurent coefficients in u = nu + 1;
  // negative powers must cancel in the collected result.
  std::map<int, std::map<int, BigRational>> laurent;  // deriv -> (power of u -> coeff)
  for (const auto& t : egf_op.terms) {
    if (!t.exp_shift) throw std::invalid_argument("expected exponential-form operator");
    const int shift = (*t.exp_shift)[0];
    const int l = t.deriv[0];
    // (u^shift - 1) * sum_j S2(l,j) u^j d^j
    for (int j = 0; j <= l; ++j) {
      BigRational c = t.scalar * BigRational(stirling2(l, j));
      if (sgn(c) == 0) continue;
      laurent[j][shift + j] += c;
      laurent[j][j] -= c;
    }
  }
  OperatorRep out;
  out.vars = 1;
  for (auto& [deriv, powers] : laurent) {
    MultiPoly p(1);
    for (auto& [e, c] : powers) {
      if (sgn(c) == 0) continue;
      if (e < 0)
        throw std::runtime_error("negative power of (nu+1) survived operator transform");
      // expand u^e = (nu+1)^e
      for (int d = 0; d <= e; ++d) p.add(MultiIndex{d, 0, 0}, c * BigRational(binomial(e, d)));
    }
    if (p.is_zero()) continue;
    OperatorTerm t;
    t.poly = std::move(p);
    t.deriv = MultiIndex{deriv, 0, 0};
    t.scalar = 1;
    out.terms.push_back(std::move(t));
  }
  return out;
}

std::map<MultiIndex, MultiPoly> collect_polynomial_operator(const OperatorRep& op) {
  std::map<MultiIndex, MultiPoly> out;
  for (const auto& t : op.terms) {
    if (t.exp_shift) throw std::invalid_argument("operator has exponential terms");
    MultiPoly scaled = t.poly;
    MultiPoly factor(op.vars);
    factor.add(MultiIndex{0, 0, 0}, t.scalar);
    scaled = scaled * factor;
    auto it = out.find(t.deriv);
    if (it == out.end())
      out.emplace(t.deriv, scaled);
    else
      it->second += scaled;
  }
  for (auto it = out.begin(); it != out.end();)
    it = it->second.is_zero() ? out.erase(it) : std::next(it);
  return out;
}

int MomentODE::find(const MultiIndex& m) const {
  for (size_t i = 0; i < indices.size(); ++i)
    if (indices[i] == m) return static_cast<int>(i);
  return -1;
}

MomentODE factorial_moment_system(const ReactionSystem& system, int max_order) {
  const int nsp = check_vars(system);
  if (max_order < 1) throw std::invalid_argument("max_order must be >= 1");
  MomentODE ode;
  series_detail::for_each_index(nsp, max_order, [&](const MultiIndex& m, long) {
    if (total_degree(m) >= 1) ode.indices.push_back(m);
  });
  const int rows = static_cast<int>(ode.indices.size());
  ode.matrix.assign(rows, std::vector<BigRational>(rows, BigRational(0)));
  ode.constant.assign(rows, BigRational(0));

  for (int row = 0; row < rows; ++row) {
    const MultiIndex& n = ode.indices[row];
    for (const auto& r : system.reactions) {
      // phi_k(n; i, o) = [(o)_k - (i)_k] binom(n, k), target f_{n+i-k}
      MultiIndex k{0, 0, 0};
      while (true) {
        BigRational phi(1);
        BigRational fo(1), fi(1);
        for (int j = 0; j < nsp; ++j) {
          fo *= BigRational(falling_factorial(r.outputs[j], k[j]));
          fi *= BigRational(falling_factorial(r.inputs[j], k[j]));
          phi *= BigRational(binomial(n[j], k[j]));
        }
        phi *= fo - fi;
        if (sgn(phi) != 0) {
          MultiIndex target{0, 0, 0};
          bool ok = true;
          for (int j = 0; j < nsp; ++j) {
            target[j] = n[j] + r.inputs[j] - k[j];
            if (target[j] < 0) ok = false;
          }
          if (ok) {
            const BigRational coeff = r.rate * phi;
            if (total_degree(target) == 0) {
              ode.constant[row] += coeff;  // f_0 = 1 channel
            } else if (total_degree(target) <= max_order) {
              ode.matrix[row][ode.find(target)] += coeff;
            } else {
              ode.open.push_back({row, target, coeff});
            }
          }
        }
        int j = 0;
        for (; j < nsp; ++j) {
          if (k[j] < n[j]) {
            ++k[j];
            break;
          }
          k[j] = 0;
        }
        if (j == nsp) break;
      }
    }
  }
  return ode;
}

std::vector<std::vector<double>> integrate_moment_ode(const MomentODE& ode,
                                                      const ReactionSystem& system,
                                                      const std::vector<double>& times,
                                                      int steps_per_unit) {
  if (!ode.closed()) throw std::invalid_argument("moment ODE is not closed");
  const int rows = static_cast<int>(ode.indices.size());
  const int nsp = system.n_species();
  std::vector<double> f(rows, 0.0);
  // initial factorial moments E[(n)_m] over the initial distribution
  for (int i = 0; i < rows; ++i) {
    double acc = 0.0;
    for (const auto& [counts, p] : system.initial) {
      double ff = 1.0;
      for (int j = 0; j < nsp; ++j)
        ff *= to_double(BigRational(falling_factorial(counts[j], ode.indices[i][j])));
      acc += p * ff;
    }
    f[i] = acc;
  }
  std::vector<std::vector<double>> mat(rows, std::vector<double>(rows));
  std::vector<double> cst(rows);
  for (int i = 0; i < rows; ++i) {
    cst[i] = to_double(ode.constant[i]);
    for (int j = 0; j < rows; ++j) mat[i][j] = to_double(ode.matrix[i][j]);
  }
  auto deriv = [&](const std::vector<double>& y, std::vector<double>& dy) {
    for (int i = 0; i < rows; ++i) {
      double acc = cst[i];
      for (int j = 0; j < rows; ++j) acc += mat[i][j] * y[j];
      dy[i] = acc;
    }
  };
  std::vector<std::vector<double>> out;
  double t = 0.0;
  std::vector<double> k1(rows), k2(rows), k3(rows), k4(rows), tmp(rows);
  for (double target : times) {
    while (t < target) {
      double h = std::min(1.0 / steps_per_unit, target - t);
      deriv(f, k1);
      for (int i = 0; i < rows; ++i) tmp[i] = f[i] + 0.5 * h * k1[i];
      deriv(tmp, k2);
      for (int i = 0; i < rows; ++i) tmp[i] = f[i] + 0.5 * h * k2[i];
      deriv(tmp, k3);
      for (int i = 0; i < rows; ++i) tmp[i] = f[i] + h * k3[i];
      deriv(tmp, k4);
      for (int i = 0; i < rows; ++i) f[i] += h / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
      t += h;
    }
    out.push_back(f);
  }
  return out;
}

FirstOrderClosure first_order_closure(const ReactionSystem& system) {
  const int nsp = check_vars(system);
  FirstOrderClosure res;
  res.closed = true;
  for (const auto& r : system.reactions)
    if (r.input_total() > 1) res.closed = false;
  if (!res.closed) return res;
  res.matrix.assign(nsp, std::vector<BigRational>(nsp, BigRational(0)));
  res.source.assign(nsp, BigRational(0));
  for (const auto& r : system.reactions) {
    for (int a = 0; a < nsp; ++a) {
      const BigRational gain = r.rate * BigRational(r.outputs[a] - r.inputs[a]);
      if (sgn(gain) == 0) continue;
      if (r.input_total() == 0) {
        res.source[a] += gain;
      } else {
        for (int j = 0; j < nsp; ++j)
          if (r.inputs[j] == 1) res.matrix[a][j] += gain;
      }
    }
  }
  return res;
}

std::vector<double> cumulants_from_pgf(const SeriesD& pgf, int order) {
  if (order < 1 || order > 3) throw std::invalid_argument("cumulant order must be 1..3");
  if (pgf.vars() != 1) throw std::invalid_argument("cumulants_from_pgf expects one species");
  const double norm = pgf.eval_at_one();
  if (std::abs(norm - 1.0) > 1e-6)
    throw std::invalid_argument("PGF is not normalized within 1e-6");
  // factorial moments f_k = sum_n (n)_k p_n
  std::vector<double> f(order + 1, 0.0);
  for (int n = 0; n <= pgf.max_deg(); ++n) {
    const double p = pgf.coeff1(n);
    if (p == 0.0) continue;
    double ff = 1.0;
    for (int k = 0; k <= order; ++k) {
      if (k > 0) ff *= (n - k + 1);
      if (n >= k) f[k] += ff * p;
    }
  }
  // raw moments m_l = sum_k S2(l,k) f_k, then cumulants
  std::vector<double> m(order + 1, 0.0);
  for (int l = 1; l <= order; ++l)
    for (int k = 1; k <= l; ++k) m[l] += to_double(BigRational(stirling2(l, k))) * f[k];
  std::vector<double> c;
  c.push_back(m[1]);
  if (order >= 2) c.push_back(m[2] - m[1] * m[1]);
  if (order >= 3) c.push_back(m[3] - 3.0 * m[1] * m[2] + 2.0 * m[1] * m[1] * m[1]);
  return c;
}

}  // namespace cme
