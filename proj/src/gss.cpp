#include "rua/gss.hpp"

#include "rua/errors.hpp"

namespace rua {

GssInit gss_init(double a, double b) {
  if (!(a < b)) throw EmptyInterval("search interval must satisfy a < b");
  GssState s;
  s.a = a;
  s.b = b;
  s.h = b - a;
  s.c = a + kGssPhi2 * s.h;
  s.d = a + kGssPhi1 * s.h;
  s.y_c = 0.0;
  s.y_d = 0.0;
  s.have_c = false;
  s.have_d = false;
  s.iteration = 0;
  return GssInit{s, {s.c, s.d}};
}

void gss_supply(GssState& state, double y) {
  if (!state.have_c) {
    state.y_c = y;
    state.have_c = true;
  } else if (!state.have_d) {
    state.y_d = y;
    state.have_d = true;
  } else {
    throw DomainError("no probe is awaiting a score");
  }
}

GssStepResult gss_step(const GssState& state) {
  if (!state.have_c || !state.have_d) {
    throw MissingScore("both probes need scores before stepping");
  }
  GssState s = state;
  // The width is tracked multiplicatively, not recomputed from the
  // endpoints; probe placement uses the tracked width.
  s.h = kGssPhi1 * s.h;
  if (s.y_c > s.y_d) {
    // Maximum lies in [a, d]; reuse c as the new d.
    s.b = s.d;
    s.d = s.c;
    s.y_d = s.y_c;
    s.c = s.a + kGssPhi2 * s.h;
    s.have_c = false;
  } else {
    // Ties fall here; maximum lies in [c, b]; reuse d as the new c.
    s.a = s.c;
    s.c = s.d;
    s.y_c = s.y_d;
    s.d = s.a + kGssPhi1 * s.h;
    s.have_d = false;
  }
  s.iteration = state.iteration + 1;
  return GssStepResult{s, s.have_c ? s.d : s.c};
}

double gss_result(const GssState& state) {
  if (!state.have_c || !state.have_d) {
    throw MissingScore("both probes need scores before reading the result");
  }
  return state.y_c > state.y_d ? state.c : state.d;
}

MaximizeResult maximize(const std::function<double(double)>& f, double a, double b,
                        int max_iter) {
  if (max_iter < 0) throw DomainError("max_iter must be non-negative");
  GssInit init = gss_init(a, b);
  GssState state = init.state;
  MaximizeResult result;
  result.evaluations.reserve(static_cast<std::size_t>(max_iter) + 2);
  for (double x : init.probes) {
    const double y = f(x);
    gss_supply(state, y);
    result.evaluations.push_back({x, y});
  }
  for (int i = 0; i < max_iter; ++i) {
    GssStepResult step = gss_step(state);
    state = step.state;
    const double y = f(step.next_probe);
    gss_supply(state, y);
    result.evaluations.push_back({step.next_probe, y});
  }
  result.best_x = gss_result(state);
  result.best_y = state.y_c > state.y_d ? state.y_c : state.y_d;
  return result;
}

}  // namespace rua
