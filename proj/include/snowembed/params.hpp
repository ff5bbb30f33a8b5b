#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>

namespace snowembed {

enum class Mode { strict, practical };
enum class LogBase { natural, base10 };

const char* mode_name(Mode m);
Mode mode_from_name(const std::string& name);

/// Evaluates the five smallness conditions on tau for the given constants.
/// satisfied[i] corresponds to condition i in [0, 4].
struct TauCheck {
  bool ok = false;
  std::array<bool, 5> satisfied{};
};
TauCheck check_tau(double tau, double epsilon, double theta, double delta, double C,
                   LogBase log_base = LogBase::natural);

/// Largest tau on the grid {step, 2 step, ...} below 1/2 satisfying all five
/// conditions. Throws NoFeasibleTau with the closed-form caps when the grid
/// floor exceeds the feasible region (remedy: shrink the step).
double solve_tau(double epsilon, double theta, double delta, double C, double grid_step,
                 LogBase log_base = LogBase::natural);

/// Closed-form upper bounds on tau from the invertible conditions; their
/// minimum bounds the feasible region from above.
struct TauCaps {
  double cap0, cap1, cap3, cap4;
  double analytic_cap;
};
TauCaps tau_caps(double epsilon, double theta, double delta, double C,
                 LogBase log_base = LogBase::natural);

struct ScaleRadius {
  double value = 0.0;
  bool underflow = false;  // value fell below the smallest positive normal
};
/// r_k = tau^(2k), computed in log space to dodge pow underflow for large |k|.
ScaleRadius scale_radius(double tau, long long k);

/// Largest integer k with r_k >= diameter, verified by direct comparison.
int base_level(double tau, double diameter);

struct ColorBudget {
  long long value = 0;         // ceil(3^delta C r_n^(delta (theta-1))); -1 when too large to hold
  double log10_value = 0.0;
  bool overflow = false;       // exceeded the configured cap
};
ColorBudget color_budget(double theta, double delta, double C, double tau, int n,
                         long long cap = (1ll << 20));

/// ceil(6 delta (2 theta + n (1-theta)) / theta) + 1; independent of epsilon.
int vector_dimension(double theta, double delta, int n);

struct EmbeddingParams {
  double epsilon = 0.0;
  double theta = 0.0;
  double delta = 0.0;
  double C = 1.0;
  double tau = 0.0;
  int n0 = 0;
  int n = 0;
  long long N_colors = 0;       // 0 while deferred
  int M = 0;
  Mode mode = Mode::strict;
  double diameter = 0.5;
  double grid_step = 0.001;
  long long budget_cap = (1ll << 20);
  LogBase log_base = LogBase::natural;
  // Practical mode with a budget overflow defers N_colors to the greedy color
  // count observed when the hierarchy is built.
  bool colors_deferred = false;
};

struct ParamOverrides {
  std::optional<double> tau;
  std::optional<long long> N_colors;
  std::optional<int> M;
};

/// Resolves every scalar of the construction from (epsilon, theta, delta, C,
/// diameter, n-offset). Strict mode derives tau/N/M from the formulas and
/// aborts on BudgetOverflow; practical mode accepts overrides and defers an
/// overflowing color budget to the observed greedy count.
EmbeddingParams derive_params(double epsilon, double theta, double delta, double C,
                              double diameter, int n_offset, Mode mode, double grid_step = 0.001,
                              long long budget_cap = (1ll << 20),
                              LogBase log_base = LogBase::natural,
                              const ParamOverrides& overrides = {});

}  // namespace snowembed
