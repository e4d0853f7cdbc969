#pragma once

#include <string>

#include "vertframe/symobs.hpp"

namespace vertframe {

// Uniform-grid sample record of one integrated flow.
struct Trajectory {
  double dt = 0;
  std::string field_id;
  std::string integrator = "rk4";
  std::vector<double> times;
  std::vector<std::vector<double>> states;

  int samples() const { return int(times.size()); }
  int dim() const { return states.empty() ? 0 : int(states.front().size()); }
};

// RK4 over a frame-bundle field with blow-up and frame-invertibility guards
// at every recorded sample.
Trajectory record_frame_flow(const Chart& chart, const GenericField& field,
                             const FramePoint& start, double t_max, double dt,
                             std::string field_id);

// Momentum values tracked along per-slot flows. `series` holds J(t), `drift`
// holds J(t) - J(0); the correction block carries the analytic expectation
// when the scenario provides one.
struct DriftReport {
  std::vector<std::string> labels;  // one per value slot (plus extras)
  std::vector<double> times;
  std::vector<double> initial;
  std::vector<std::vector<double>> series;
  std::vector<std::vector<double>> drift;
  std::vector<double> max_abs_drift;
  bool invariant = false;  // the symbolic bracket with the energy vanished
  bool has_correction = false;
  std::vector<std::vector<double>> correction;
  double max_correction_mismatch = 0;
};

// Exact flow of the constant-metric transport field attached to value slot
// mu: base coordinates advance by t eta^{jl} pi^mu_l, fiber coordinates by
// t iota^{CB} pi^mu_B for fiber slots, frames stay put.
FramePoint closed_form_flow(const Chart& chart, const Mat<Rational>& eta,
                            const Mat<Rational>& iota, int mu, const FramePoint& start,
                            const Rational& t);

// Per-slot conservation monitor for the momentum components of xi along the
// Hamiltonian flows of the metric observable.
DriftReport conservation_run(const Chart& chart, const KKMetric& g, const VectorFieldY& xi,
                             const FramePoint& start, double t_max, double dt);

// Time axis plus k fiber dimensions, generator (rotation block, shift vector)
// in the semidirect-product algebra; the rotation block must be
// iota-antisymmetric.
struct AffineScenario {
  Mat<Rational> iota;
  Mat<Rational> rotation;
  std::vector<Rational> shift;
  FramePoint start;  // n = 1 frame
};

// Tracks each momentum component along its own flow; fiber slots carry the
// analytic correction lambda xdot^0 iota_AC ydot^C v^A, the time slot stays
// exactly zero.
DriftReport parallel_axis_analysis(const AffineScenario& sc, double lambda_max, double dt);

// Same comparison on the exact rational path at a single flow parameter.
bool parallel_axis_exact_check(const AffineScenario& sc, const Rational& lambda);

// Flow of the time-slot no-torsion field with finite-difference residual
// monitoring of the geodesic and frame-transport equations.
struct GeodesicReport {
  Trajectory trajectory;
  double max_geodesic_residual = 0;   // centered second differences vs symbols
  double max_transport_residual = 0;  // centered first differences vs symbols
  double max_energy_drift = 0;        // metric norm of the velocity
  bool no_torsion_exact = false;      // pairwise contractions vanish symbolically
};

GeodesicReport geodesic_transport_run(const Chart& chart, const KKMetric& g,
                                      const FramePoint& start, double t_max, double dt);

// Momentum of the reparametrization generator f(x^1) d/dx^1 along the
// time-slot flow, tracked both upstairs (frame components) and downstairs
// (phase-space momentum through the associated map at (B, lambda)).
DriftReport reparam_momentum_run(const Chart& chart, const KKMetric& g, const Expr& f,
                                 const Mat<Rational>& assoc_b, const Rational& assoc_lambda,
                                 const FramePoint& start, double t_max, double dt);

// Convergence-order estimate on the linear test problem: log2 error ratio
// between dt and dt/2 endpoints; 4 for a fourth-order scheme.
double rk4_order_slope(double dt_coarse);

}  // namespace vertframe
