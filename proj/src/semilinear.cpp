#include "cme/semilinear.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <stdexcept>

#include "cme/sobolev_jacobi.hpp"

namespace cme {

SeriesD pgf_pois(double mu, int vars, int max_deg, int var) {
  if (mu < 0.0) throw std::invalid_argument("Poisson parameter must be >= 0");
  SeriesD s(vars, max_deg);
  double c = std::exp(-mu);
  MultiIndex m{0, 0, 0};
  for (int n = 0; n <= max_deg; ++n) {
    m[var] = n;
    s.set(m, c);
    c *= mu / (n + 1);
  }
  return s;
}

SeriesD pgf_bern(double p, int vars, int max_deg, int var) {
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("Bernoulli parameter must be in [0,1]");
  SeriesD s = SeriesD::constant(vars, max_deg, 1.0 - p);
  MultiIndex m{0, 0, 0};
  m[var] = 1;
  s.set(m, p);
  return s;
}

SeriesD pgf_geom(double p, int vars, int max_deg, int var) {
  if (p <= 0.0 || p > 1.0) throw std::invalid_argument("Geometric parameter must be in (0,1]");
  SeriesD s(vars, max_deg);
  MultiIndex m{0, 0, 0};
  double c = p;
  for (int n = 1; n <= max_deg; ++n) {
    m[var] = n;
    s.set(m, c);
    c *= (1.0 - p);
  }
  return s;
}

SeriesD pgf_geom2(double p, int max_deg) {
  if (p <= 0.0 || p > 1.0) throw std::invalid_argument("Geom2 parameter must be in (0,1]");
  SeriesD s(1, max_deg);
  double c = p;
  for (int n = 0; n <= max_deg; ++n) {
    s.set(MultiIndex{n, 0, 0}, c);
    c *= (1.0 - p);
  }
  return s;
}

SeriesD pgf_a2pois(double mu, int vars, int max_deg, int var) {
  if (mu < 0.0) throw std::invalid_argument("A2Pois parameter must be >= 0");
  SeriesD s(vars, max_deg);
  double c = std::exp(-mu);
  MultiIndex m{0, 0, 0};
  for (int n = 0; 2 * n <= max_deg; ++n) {
    m[var] = 2 * n;
    s.set(m, c);
    c *= mu / (n + 1);
  }
  return s;
}

ElementarySolution elementary_solution(const Reaction& reaction, double t, int max_deg) {
  if (t < 0.0) throw std::invalid_argument("time must be >= 0");
  const int nsp = static_cast<int>(reaction.inputs.size());
  if (nsp < 1 || nsp > 3) throw std::invalid_argument("1..3 species supported");
  if (reaction.input_total() > 1)
    throw std::invalid_argument("binary reaction; use the Sobolev-Jacobi solver");

  const double rate = reaction.rate_d();
  ElementarySolution sol{SeriesD::constant(nsp, max_deg, 1.0), {}};
  for (int v = 0; v < nsp; ++v) sol.T.push_back(SeriesD::variable(nsp, max_deg, v));

  if (reaction.input_total() == 0) {
    // pure creation: g = exp(rate t (x^o - 1)), T = identity
    SeriesD arg(nsp, max_deg);
    MultiIndex mo{0, 0, 0};
    for (int v = 0; v < nsp; ++v) mo[v] = reaction.outputs[v];
    arg.set(mo, rate * t);
    arg.set(MultiIndex{0, 0, 0}, arg.coeff(MultiIndex{0, 0, 0}) - rate * t);
    sol.g = exp_series(arg);
    return sol;
  }

  if (reaction.output_total() > 2)
    throw std::invalid_argument("reactions with more than two output particles are unsupported");

  int src = 0;
  while (reaction.inputs[src] == 0) ++src;
  const double q = std::exp(-rate * t);
  const int o_src = reaction.outputs[src];

  if (o_src == 0) {
    // S_src -> C where C is empty, another species, or a pair not
    // containing src: T_src = C (1 - q) + x_src q
    MultiIndex mo{0, 0, 0};
    for (int v = 0; v < nsp; ++v) mo[v] = reaction.outputs[v];
    SeriesD target = SeriesD::monomial(nsp, max_deg, mo, 1.0);
    sol.T[src] = target * (1.0 - q) + SeriesD::variable(nsp, max_deg, src) * q;
  } else if (o_src == 1 && reaction.output_total() == 1) {
    return sol;  // S -> S: no-op
  } else if (o_src == 2) {
    // autocatalysis S -> 2S: T_src = Geom(e^{-rate t}; x_src)
    sol.T[src] = pgf_geom(q, nsp, max_deg, src);
  } else {
    // S_src -> S_src + S_j: T_src = x_src * Pois(rate t; x_j)
    int j = 0;
    while (j == src || reaction.outputs[j] == 0) ++j;
    sol.T[src] = SeriesD::variable(nsp, max_deg, src) * pgf_pois(rate * t, nsp, max_deg, j);
  }
  return sol;
}

SeriesD apply_solution(const ElementarySolution& sol, const InitialDistribution& p0) {
  std::map<MultiIndex, double> outer;
  double sum = 0.0;
  for (const auto& [counts, p] : p0) {
    MultiIndex m{0, 0, 0};
    for (size_t j = 0; j < counts.size(); ++j) m[j] = counts[j];
    outer[m] = p;
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw std::invalid_argument("initial PGF is not normalized");
  return sol.g * compose_multi(outer, sol.T);
}

namespace {

std::map<MultiIndex, double> univariate_outer(const std::map<int, double>& p0) {
  std::map<MultiIndex, double> outer;
  for (const auto& [n, p] : p0) outer[MultiIndex{n, 0, 0}] = p;
  return outer;
}

// (x-1)^2 and (x-1) prefactors multiplied into a series.
SeriesD mul_poly_x(const SeriesD& s, double c0, double c1, double c2) {
  SeriesD out = s * c0;
  const int n = s.max_deg();
  if (c1 != 0.0)
    for (int d = 0; d < n; ++d) out.raw()[d + 1] += c1 * s.raw()[d];
  if (c2 != 0.0)
    for (int d = 0; d + 2 <= n; ++d) out.raw()[d + 2] += c2 * s.raw()[d];
  return out;
}

}  // namespace

SeriesD composite_one_species(double alpha, double beta, double gamma, double tau, double t,
                              const std::map<int, double>& p0, int max_deg) {
  if (alpha < 0 || beta < 0 || gamma < 0 || tau < 0 || t < 0)
    throw std::invalid_argument("rates and time must be >= 0");
  const int n = max_deg;
  auto one = SeriesD::constant(1, n, 1.0);

  SeriesD g_bda = one, g_cda = one, t_da = SeriesD::variable(1, n, 0);

  const double rel_gap = std::abs(alpha - tau) / std::max({alpha, tau, 1e-300});
  if (alpha != tau && rel_gap < 1e-9)
    std::cerr << "warning: |alpha-tau|/max(alpha,tau) = " << rel_gap
              << " risks cancellation in s_D, s_A; consider the alpha==tau branch\n";

  if (alpha == 0.0 && tau == 0.0) {
    if (beta > 0.0) g_bda = pgf_pois(beta * t, 1, n);
    if (gamma > 0.0) g_cda = pgf_a2pois(gamma * t, 1, n);
  } else if (alpha == tau) {
    // s(t) = ln(1+alpha t)/alpha, so e^{-alpha s} = 1/(1+alpha t)
    const double q = 1.0 / (1.0 + alpha * t);
    SeriesD geom2 = pgf_geom2(q, n);
    t_da = pgf_geom(q, 1, n) * q + SeriesD::constant(1, n, 1.0 - q);
    if (beta > 0.0) g_bda = pow_real(geom2, beta / alpha);
    if (gamma > 0.0)
      g_cda = pow_real(geom2, 2.0 * gamma / alpha) *
              exp_series(mul_poly_x(geom2, gamma * t, -2.0 * gamma * t, gamma * t));
  } else if (alpha > 0.0) {
    const double diff = alpha - tau;
    const double e_big = std::exp(diff * t);
    const double q_a = diff / (alpha * e_big - tau);   // e^{-alpha s_A}
    const double q_d = e_big * q_a;                    // e^{-tau s_D}
    SeriesD geom2 = pgf_geom2(q_a, n);
    t_da = pgf_geom(q_a, 1, n) * q_d + SeriesD::constant(1, n, 1.0 - q_d);
    if (beta > 0.0) g_bda = pow_real(geom2, beta / alpha);
    if (gamma > 0.0) {
      // ln of the non-power factor: gamma (E-1) [(x-1)^2/(alpha-tau)
      //                                          + (x-1)/alpha] Geom2
      const double c2 = gamma * (e_big - 1.0) / diff;
      const double c1 = gamma * (e_big - 1.0) / alpha;
      SeriesD arg = mul_poly_x(geom2, c2 - c1, -2.0 * c2 + c1, c2);
      g_cda = pow_real(geom2, gamma * (alpha + tau) / (alpha * alpha)) * exp_series(arg);
    }
  } else {
    // alpha = 0, tau > 0
    const double eps = std::exp(-tau * t);
    t_da = pgf_bern(eps, 1, n);
    if (beta > 0.0) g_bda = pgf_pois(beta / tau * (1.0 - eps), 1, n);
    if (gamma > 0.0)
      g_cda = pgf_pois(gamma / tau * (1.0 - eps) * (1.0 - eps), 1, n) *
              pgf_a2pois(gamma / (2.0 * tau) * (1.0 - eps * eps), 1, n);
  }

  return g_bda * g_cda * compose_multi(univariate_outer(p0), {t_da});
}

namespace {

double max_abs_diff(const SeriesD& a, const SeriesD& b) {
  double m = 0.0;
  for (size_t i = 0; i < a.raw().size(); ++i)
    m = std::max(m, std::abs(a.raw()[i] - b.raw()[i]));
  return m;
}

// Composes an elementary (g,T) at parameter mu with an inner substitution
// series: returns T_mu(inner) and g_mu(inner) for the reaction's species.
std::pair<SeriesD, SeriesD> chain(const Reaction& reaction, double mu, const SeriesD& inner,
                                  int max_deg) {
  // Only single-species reactions appear in the semigroup checks.
  ElementarySolution at_mu = elementary_solution(reaction, mu, max_deg);
  auto subst = [&](const SeriesD& outer) -> SeriesD {
    // outer is a PGF series in x; evaluate at the inner series.  Bern and
    // the creation g factors are polynomials; Geom has zero constant term
    // matched by a zero-constant inner, so split accordingly.
    if (inner.coeff1(0) == 0.0) return compose_series(outer, inner);
    // polynomial outer (finite support in practice: affine)
    int top = outer.max_deg();
    while (top > 0 && outer.coeff1(top) == 0.0) --top;
    std::vector<double> coeffs(top + 1);
    for (int d = 0; d <= top; ++d) coeffs[d] = outer.coeff1(d);
    return compose_poly(coeffs, inner);
  };
  return {subst(at_mu.T[0]), subst(at_mu.g)};
}

}  // namespace

double semigroup_residual(const Reaction& reaction, double lambda, double mu, int max_deg) {
  if (reaction.inputs.size() != 1)
    throw std::invalid_argument("semigroup check implemented for one species");
  ElementarySolution at_sum = elementary_solution(reaction, lambda + mu, max_deg);
  ElementarySolution at_l = elementary_solution(reaction, lambda, max_deg);
  auto [t_chain, g_of_t] = chain(reaction, mu, at_l.T[0], max_deg);
  double res = max_abs_diff(at_sum.T[0], t_chain);
  res = std::max(res, max_abs_diff(at_sum.g, at_l.g * g_of_t));
  return res;
}

SeriesD solve_closed(const ReactionSystem& system, double t, int max_deg) {
  system.validate();
  if (system.initial.empty()) throw std::invalid_argument("system has no initial distribution");
  const SystemClass cls = classify(system);

  if (cls == SystemClass::BinarySJ) {
    BigRational rd(0), rk(0), rl(0);
    for (const auto& r : system.reactions) {
      if (r.inputs[0] == 1) rd += r.rate;
      else if (r.outputs[0] == 0) rk += r.rate;
      else rl += r.rate;
    }
    SeriesD out(1, max_deg);
    for (const auto& [counts, p] : system.initial) {
      if (p == 0.0) continue;
      const int m = counts[0];
      if (m > max_deg) throw std::invalid_argument("initial count exceeds truncation degree");
      auto coeffs = solve_binary(rd, rk, rl, m, t);
      for (int d = 0; d < static_cast<int>(coeffs.size()); ++d)
        out.raw()[d] += p * coeffs[d];
    }
    return out;
  }

  if (cls == SystemClass::NonBinary) {
    // composite route when all reactions are birth/pair-creation/death/
    // autocatalysis
    double alpha = 0, beta = 0, gamma = 0, tau = 0;
    bool composite_ok = true;
    for (const auto& r : system.reactions) {
      const int i = r.inputs[0], o = r.outputs[0];
      if (i == 0 && o == 1) beta += r.rate_d();
      else if (i == 0 && o == 2) gamma += r.rate_d();
      else if (i == 1 && o == 0) tau += r.rate_d();
      else if (i == 1 && o == 2) alpha += r.rate_d();
      else composite_ok = false;
    }
    if (composite_ok) {
      std::map<int, double> p0;
      for (const auto& [counts, p] : system.initial) p0[counts[0]] += p;
      return composite_one_species(alpha, beta, gamma, tau, t, p0, max_deg);
    }
  }

  if ((cls == SystemClass::NonBinary || cls == SystemClass::SemiLinearMulti) &&
      system.reactions.size() == 1) {
    return apply_solution(elementary_solution(system.reactions[0], t, max_deg), system.initial);
  }

  throw std::domain_error("no closed-form route for class " + to_string(cls));
}

}  // namespace cme
