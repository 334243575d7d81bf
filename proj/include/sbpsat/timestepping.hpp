#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "sbpsat/assemble.hpp"
#include "sbpsat/errors.hpp"

namespace sbpsat {

// Standing-wave reference solution: U = cos(5x+1)cos(5y+2)cos(5*sqrt(2)t+3),
// an exact solution of U_tt = U_xx + U_yy.
namespace manufactured {

inline double u(double x, double y, double t) {
  return std::cos(5 * x + 1) * std::cos(5 * y + 2) * std::cos(5 * std::sqrt(2.0) * t + 3);
}

inline double u_t(double x, double y, double t) {
  const double w = 5 * std::sqrt(2.0);
  return -w * std::cos(5 * x + 1) * std::cos(5 * y + 2) * std::sin(w * t + 3);
}

inline double u_tt(double x, double y, double t) { return -50.0 * u(x, y, t); }

constexpr double amplitude = 1.0;

}  // namespace manufactured

struct SimulationState {
  double t = 0;
  VectorXd z;
  VectorXd z_t;
};

// One classical RK4 step of (z, z_t)' = (z_t, Qz - data_op g(t)).
// g_field samples the boundary data over the full layout at a given time.
template <class RhsField>
inline SimulationState rk4_step(const SemidiscreteSystem& sys, const SimulationState& s,
                                double dt, const RhsField& g_field) {
  if (dt <= 0) throw NonpositiveInput("dt");
  const VectorXd g1 = g_field(s.t);
  const VectorXd g2 = g_field(s.t + 0.5 * dt);
  const VectorXd g4 = g_field(s.t + dt);
  const VectorXd& k1z = s.z_t;
  VectorXd k1v = sys.apply_rhs(s.z, g1);
  VectorXd k2z = s.z_t + 0.5 * dt * k1v;
  VectorXd k2v = sys.apply_rhs(s.z + 0.5 * dt * k1z, g2);
  VectorXd k3z = s.z_t + 0.5 * dt * k2v;
  VectorXd k3v = sys.apply_rhs(s.z + 0.5 * dt * k2z, g2);
  VectorXd k4z = s.z_t + dt * k3v;
  VectorXd k4v = sys.apply_rhs(s.z + dt * k3z, g4);
  SimulationState out;
  out.t = s.t + dt;
  out.z = s.z + dt / 6 * (k1z + 2 * k2z + 2 * k3z + k4z);
  out.z_t = s.z_t + dt / 6 * (k1v + 2 * k2v + 2 * k3v + k4v);
  return out;
}

struct Observer {
  int stride = 1;
  std::function<void(const SimulationState&)> fn;
};

struct SimulateOptions {
  double blowup_guard = 1e6;
  std::vector<Observer> observers;
};

// Default time-step factor of the convergence study: dt = c*h with h the
// smallest spacing over all blocks.
inline double dt_rule_factor(int order) {
  if (order == 8) return 0.025;
  if (order == 10) return 0.05;
  return 0.1;
}

inline double min_spacing(const SemidiscreteSystem& sys) {
  double h = sys.blocks[0].hx;
  for (auto& b : sys.blocks) h = std::min({h, b.hx, b.hy});
  return h;
}

template <class RhsField>
inline SimulationState simulate(const SemidiscreteSystem& sys, SimulationState state,
                                double t_f, double dt, const RhsField& g_field,
                                const SimulateOptions& opt = {}) {
  if (t_f <= state.t) throw ParameterOutOfRange("t_f");
  if (dt <= 0) throw NonpositiveInput("dt");
  long step = 0;
  for (auto& ob : opt.observers)
    if (ob.fn) ob.fn(state);
  while (state.t < t_f - 1e-12 * t_f) {
    double h = std::min(dt, t_f - state.t);  // shorten the last step
    state = rk4_step(sys, state, h, g_field);
    ++step;
    if (state.z.cwiseAbs().maxCoeff() > opt.blowup_guard) throw BlowupDetected(state.t);
    for (auto& ob : opt.observers)
      if (ob.fn && step % std::max(1, ob.stride) == 0) ob.fn(state);
  }
  return state;
}

// Convenience: manufactured-solution Dirichlet run on an assembled system.
inline SimulationState run_manufactured(const SemidiscreteSystem& sys, double t_f, double dt,
                                        const SimulateOptions& opt = {}) {
  auto g = [&](double t) {
    return sys.sample([t](double x, double y) { return manufactured::u(x, y, t); });
  };
  SimulationState s;
  s.t = 0;
  s.z = g(0.0);
  s.z_t = sys.sample([](double x, double y) { return manufactured::u_t(x, y, 0.0); });
  return simulate(sys, std::move(s), t_f, dt, g, opt);
}

}  // namespace sbpsat
