#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <vector>

namespace rua {

/// Inverse golden ratio and its complement. Computed from sqrt(5), not a
/// rational approximation; the bracket-shrink invariants are stated at
/// 1e-12 relative tolerance against these exact values.
inline const double kGssPhi1 = (std::sqrt(5.0) - 1.0) / 2.0;
inline const double kGssPhi2 = (3.0 - std::sqrt(5.0)) / 2.0;

/// Resumable golden-section bracket over a scalar maximization.
/// The caller owns evaluation: gss_init and gss_step name probe points, and
/// gss_supply feeds scores back in probe order.
struct GssState {
  double a = 0, b = 0;    // bracket endpoints
  double c = 0, d = 0;    // interior probes, a < c < d < b
  double y_c = 0, y_d = 0;
  bool have_c = false, have_d = false;
  double h = 0;           // tracked width, b - a
  int iteration = 0;
};

struct GssInit {
  GssState state;
  std::array<double, 2> probes;  // evaluate at probes[0] = c, probes[1] = d
};

/// c = a + phi2*(b-a), d = a + phi1*(b-a); both scores start pending.
/// Throws EmptyInterval if a >= b.
GssInit gss_init(double a, double b);

/// Fills the oldest pending probe score (c before d after init; after a step
/// exactly one probe is pending). Throws DomainError if nothing is pending.
void gss_supply(GssState& state, double y);

struct GssStepResult {
  GssState state;
  double next_probe;
};

/// One bracket shrink. If y_c > y_d the bracket keeps [a, d] and the next
/// probe is the new c; otherwise (ties included) it keeps [c, b] and the
/// next probe is the new d. Throws MissingScore if either score is pending.
GssStepResult gss_step(const GssState& state);

/// c if y_c > y_d, else d. Throws MissingScore if either score is pending.
double gss_result(const GssState& state);

struct Evaluation {
  double x = 0;
  double y = 0;
};

struct MaximizeResult {
  double best_x = 0;
  double best_y = 0;
  std::vector<Evaluation> evaluations;  // in evaluation order
};

/// Convenience driver: runs init, max_iter steps, and the final comparison,
/// evaluating f exactly max_iter + 2 times. For unimodal f the true argmax
/// lies within phi1^(max_iter+1) * (b - a) of the returned point.
MaximizeResult maximize(const std::function<double(double)>& f, double a, double b,
                        int max_iter = 4);

}  // namespace rua
