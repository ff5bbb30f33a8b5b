#include "snowembed/params.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "snowembed/errors.hpp"

namespace snowembed {

namespace {

double lg(double x, LogBase base) {
  return base == LogBase::natural ? std::log(x) : std::log10(x);
}

void check_ranges(double epsilon, double theta, double delta, double C) {
  if (!(epsilon > 0.5 && epsilon < 1.0)) {
    throw BadParameters("epsilon must lie in (1/2, 1)", {{"epsilon", epsilon}});
  }
  if (!(theta > 0.0 && theta < 1.0)) {
    throw ThetaOutOfRange("theta must lie in (0, 1)", {{"theta", theta}});
  }
  if (!(delta > 0.0)) throw BadParameters("delta must be positive", {{"delta", delta}});
  if (!(C >= 1.0)) throw BadParameters("quasidoubling constant must be >= 1", {{"C", C}});
}

}  // namespace

const char* mode_name(Mode m) { return m == Mode::strict ? "strict" : "practical"; }

Mode mode_from_name(const std::string& name) {
  if (name == "strict") return Mode::strict;
  if (name == "practical") return Mode::practical;
  throw BadParameters("unknown mode: " + name);
}

TauCheck check_tau(double tau, double epsilon, double theta, double delta, double C,
                   LogBase log_base) {
  TauCheck out;
  if (!(tau > 0.0 && tau < 0.5)) return out;
  // tau0: below both 2^(-2 eps) and 1 - eps.
  out.satisfied[0] = tau < std::min(std::pow(2.0, -2.0 * epsilon), 1.0 - epsilon);
  // tau1: tau^(2(theta-1)) > 2.
  out.satisfied[1] = std::pow(tau, 2.0 * (theta - 1.0)) > 2.0;
  // tau2: e^(-2 tau ln(1/tau)) <= 1 - tau ln(1/tau); always in natural logs.
  const double g = tau * std::log(1.0 / tau);
  out.satisfied[2] = std::exp(-2.0 * g) <= 1.0 - g;
  // tau3: 1 - 4 tau^(2 eps - 1) >= 1/2.
  out.satisfied[3] = 1.0 - 4.0 * std::pow(tau, 2.0 * epsilon - 1.0) >= 0.5;
  // tau4: -7 log(7 tau) > max(log(40^delta C^2), log 21); base per flag.
  const double rhs = std::max(delta * lg(40.0, log_base) + 2.0 * lg(C, log_base),
                              lg(21.0, log_base));
  out.satisfied[4] = -7.0 * lg(7.0 * tau, log_base) > rhs;
  out.ok = out.satisfied[0] && out.satisfied[1] && out.satisfied[2] && out.satisfied[3] &&
           out.satisfied[4];
  return out;
}

TauCaps tau_caps(double epsilon, double theta, double delta, double C, LogBase log_base) {
  TauCaps caps{};
  caps.cap0 = std::min(std::pow(2.0, -2.0 * epsilon), 1.0 - epsilon);
  caps.cap1 = std::pow(2.0, -1.0 / (2.0 * (1.0 - theta)));
  caps.cap3 = std::pow(8.0, -1.0 / (2.0 * epsilon - 1.0));
  const double rhs = std::max(delta * lg(40.0, log_base) + 2.0 * lg(C, log_base),
                              lg(21.0, log_base));
  // -7 log_b(7 tau) > rhs  <=>  tau < b^(-rhs/7) / 7.
  const double b = (log_base == LogBase::natural) ? std::exp(1.0) : 10.0;
  caps.cap4 = std::pow(b, -rhs / 7.0) / 7.0;
  caps.analytic_cap = std::min({caps.cap0, caps.cap1, caps.cap3, caps.cap4, 0.5});
  return caps;
}

double solve_tau(double epsilon, double theta, double delta, double C, double grid_step,
                 LogBase log_base) {
  check_ranges(epsilon, theta, delta, C);
  if (!(grid_step > 0.0)) throw BadParameters("grid step must be positive", {{"step", grid_step}});

  long long m = static_cast<long long>(std::floor(0.5 / grid_step));
  while (m > 0 && m * grid_step >= 0.5) --m;
  for (long long i = m; i >= 1; --i) {
    const double tau = static_cast<double>(i) * grid_step;
    if (check_tau(tau, epsilon, theta, delta, C, log_base).ok) return tau;
  }

  const auto caps = tau_caps(epsilon, theta, delta, C, log_base);
  throw NoFeasibleTau("no grid point satisfies the tau conditions; shrink grid_step and retry",
                      {{"grid_step", grid_step},
                       {"analytic_cap", caps.analytic_cap},
                       {"caps",
                        {{"tau0", caps.cap0},
                         {"tau1", caps.cap1},
                         {"tau3", caps.cap3},
                         {"tau4", caps.cap4}}}});
}

ScaleRadius scale_radius(double tau, long long k) {
  if (!(tau > 0.0 && tau < 1.0)) throw BadParameters("tau must lie in (0, 1)", {{"tau", tau}});
  ScaleRadius out;
  out.value = std::exp(2.0 * static_cast<double>(k) * std::log(tau));
  out.underflow = out.value < std::numeric_limits<double>::min();
  return out;
}

int base_level(double tau, double diameter) {
  if (!(diameter > 0.0 && diameter < 1.0)) {
    throw BadParameters("diameter must lie in (0, 1)", {{"diameter", diameter}});
  }
  if (!(tau > 0.0 && tau < 1.0)) throw BadParameters("tau must lie in (0, 1)", {{"tau", tau}});
  long long k = static_cast<long long>(std::floor(std::log(diameter) / (2.0 * std::log(tau))));
  while (scale_radius(tau, k).value < diameter) --k;
  while (scale_radius(tau, k + 1).value >= diameter) ++k;
  return static_cast<int>(k);
}

ColorBudget color_budget(double theta, double delta, double C, double tau, int n, long long cap) {
  if (!(theta > 0.0 && theta < 1.0)) {
    throw ThetaOutOfRange("theta must lie in (0, 1)", {{"theta", theta}});
  }
  if (!(delta > 0.0) || !(C >= 1.0) || !(tau > 0.0 && tau < 1.0)) {
    throw BadParameters("color budget inputs out of range");
  }
  ColorBudget out;
  const double L =
      delta * std::log(3.0) + std::log(C) + 2.0 * n * delta * (theta - 1.0) * std::log(tau);
  out.log10_value = L / std::log(10.0);
  const double v = std::exp(L);
  const double capd = static_cast<double>(cap);
  if (!(v <= capd)) {
    out.overflow = true;
    out.value = std::isfinite(v) && v < 9.0e18 ? static_cast<long long>(std::ceil(v)) : -1;
  } else {
    out.value = static_cast<long long>(std::ceil(v));
  }
  return out;
}

int vector_dimension(double theta, double delta, int n) {
  if (!(theta > 0.0 && theta < 1.0)) {
    throw ThetaOutOfRange("theta must lie in (0, 1)", {{"theta", theta}});
  }
  if (!(delta > 0.0) || n < 0) throw BadParameters("vector dimension inputs out of range");
  return static_cast<int>(std::ceil(6.0 * delta * (2.0 * theta + n * (1.0 - theta)) / theta)) + 1;
}

EmbeddingParams derive_params(double epsilon, double theta, double delta, double C,
                              double diameter, int n_offset, Mode mode, double grid_step,
                              long long budget_cap, LogBase log_base,
                              const ParamOverrides& overrides) {
  check_ranges(epsilon, theta, delta, C);
  if (n_offset < 1) throw BadParameters("n must exceed n0", {{"n_offset", n_offset}});
  if (mode == Mode::strict &&
      (overrides.tau.has_value() || overrides.N_colors.has_value() || overrides.M.has_value())) {
    throw BadParameters("parameter overrides require practical mode");
  }

  EmbeddingParams p;
  p.epsilon = epsilon;
  p.theta = theta;
  p.delta = delta;
  p.C = C;
  p.mode = mode;
  p.diameter = diameter;
  p.grid_step = grid_step;
  p.budget_cap = budget_cap;
  p.log_base = log_base;

  if (overrides.tau.has_value()) {
    p.tau = *overrides.tau;
    if (!(p.tau > 0.0 && p.tau < 0.5)) {
      throw BadParameters("tau override must lie in (0, 1/2)", {{"tau", p.tau}});
    }
  } else {
    p.tau = solve_tau(epsilon, theta, delta, C, grid_step, log_base);
  }

  p.n0 = base_level(p.tau, diameter);
  p.n = p.n0 + n_offset;

  if (overrides.N_colors.has_value()) {
    p.N_colors = *overrides.N_colors;
    if (p.N_colors < 1) throw BadParameters("color override must be >= 1");
  } else {
    const auto budget = color_budget(theta, delta, C, p.tau, p.n, budget_cap);
    if (budget.overflow) {
      if (mode == Mode::strict) {
        throw BudgetOverflow("color budget exceeds the cap",
                             {{"log10_value", budget.log10_value},
                              {"cap", budget_cap},
                              {"n", p.n}});
      }
      p.colors_deferred = true;  // resolved to the observed greedy count at build time
      p.N_colors = 0;
    } else {
      p.N_colors = budget.value;
    }
  }

  p.M = overrides.M.has_value() ? *overrides.M : vector_dimension(theta, delta, p.n);
  if (p.M < 1) throw BadParameters("vector dimension must be >= 1", {{"M", p.M}});
  return p;
}

}  // namespace snowembed
