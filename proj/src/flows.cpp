#include "vertframe/flows.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vertframe {

namespace {

constexpr double kFrameDetTolerance = 1e-9;

// Y coordinate at flat index rho (0..n-1 base, n..n+k-1 fiber).
CoordName y_coord_name(int n, int rho) {
  return rho < n ? CoordName::base_x(rho + 1) : CoordName::fiber_y(rho - n + 1);
}

bool frame_slot_exists(int n, int mu, int rho) { return mu >= n || rho < n; }

CoordName frame_coord(int n, int mu, int rho) {
  if (mu < n) return CoordName::frame_nn(mu + 1, rho + 1);
  if (rho < n) return CoordName::frame_kn(mu - n + 1, rho + 1);
  return CoordName::frame_kk(mu - n + 1, rho - n + 1);
}

std::string slot_label(int n, int mu) {
  return mu < n ? "r" + std::to_string(mu + 1) : "s" + std::to_string(mu - n + 1);
}

void require_grid(double t_max, double dt) {
  if (t_max <= 0 || dt <= 0) throw std::invalid_argument("time grid must be positive");
}

void require_constant_symmetric(const Mat<Rational>& m, const char* what) {
  if (m.rows() != m.cols()) throw std::invalid_argument(std::string(what) + " must be square");
  for (int r = 0; r < m.rows(); ++r)
    for (int c = r + 1; c < m.cols(); ++c)
      if (!(m.at(r, c) == m.at(c, r)))
        throw std::invalid_argument(std::string(what) + " must be symmetric");
}

// Guarded per-sample recorder shared by every flow in this module.
struct FrameGuard {
  CompiledExpr det_base;
  CompiledExpr det_fiber;

  explicit FrameGuard(const Chart& chart)
      : det_base(frame_nn_expr(chart).det(), chart.lvy),
        det_fiber(frame_kk_expr(chart).det(), chart.lvy) {}

  void check(int sample, const std::vector<double>& state) const {
    if (std::abs(det_base.eval(state)) < kFrameDetTolerance ||
        std::abs(det_fiber.eval(state)) < kFrameDetTolerance)
      throw std::runtime_error("frame degenerates along the flow at sample " +
                               std::to_string(sample));
  }
};

// Momentum component of each value slot as a compiled scalar.
std::vector<CompiledExpr> compile_momentum_slots(const Chart& chart, const VectorFieldY& xi) {
  VVForm jhat = momentum_observable_LVY(chart, xi);
  std::vector<CompiledExpr> out;
  for (int mu = 0; mu < chart.n + chart.k; ++mu)
    out.emplace_back(jhat.coefficient({}, {mu}), chart.lvy);
  return out;
}

bool all_zero(const Mat<Expr>& m) {
  for (int r = 0; r < m.rows(); ++r)
    for (int c = 0; c < m.cols(); ++c)
      if (!m.at(r, c).is_zero()) return false;
  return true;
}

}  // namespace

Trajectory record_frame_flow(const Chart& chart, const GenericField& field,
                             const FramePoint& start, double t_max, double dt,
                             std::string field_id) {
  require_grid(t_max, dt);
  if (field.system().coords != chart.lvy.coords)
    throw std::invalid_argument("field does not live on the frame-bundle chart");

  Trajectory out;
  out.dt = dt;
  out.field_id = std::move(field_id);

  FrameGuard guard(chart);
  CompiledField compiled(field.comps(), chart.lvy);
  int steps = int(std::llround(t_max / dt));
  auto watch = [&](int sample, double t, const std::vector<double>& state) {
    guard.check(sample, state);
    out.times.push_back(t);
    out.states.push_back(state);
  };
  integrate_rk4(compiled, frame_state(chart, start), 0.0, dt, steps, watch);
  return out;
}

FramePoint closed_form_flow(const Chart& chart, const Mat<Rational>& eta,
                            const Mat<Rational>& iota, int mu, const FramePoint& start,
                            const Rational& t) {
  if (start.n != chart.n || start.k != chart.k)
    throw std::invalid_argument("frame point chart mismatch");
  if (eta.rows() != chart.n || iota.rows() != chart.k)
    throw std::invalid_argument("metric block dimensions do not match the chart");
  if (mu < 0 || mu >= chart.n + chart.k) throw std::invalid_argument("value slot out of range");
  require_constant_symmetric(eta, "base metric");
  require_constant_symmetric(iota, "fiber metric");
  if (iota.det() == 0) throw std::domain_error("singular fiber metric");

  Mat<Rational> eta_up = eta.inverse();
  auto pi_mu = [&](int j) {
    return mu < chart.n ? start.pi_nn.at(mu, j) : start.pi_kn.at(mu - chart.n, j);
  };

  FramePoint out = start;
  for (int kk = 0; kk < chart.n; ++kk) {
    Rational rate = 0;
    for (int j = 0; j < chart.n; ++j) rate += eta_up.at(j, kk) * pi_mu(j);
    out.x[size_t(kk)] += t * rate;
  }
  if (mu >= chart.n) {
    Mat<Rational> iota_up = iota.inverse();
    int a = mu - chart.n;
    for (int cc = 0; cc < chart.k; ++cc) {
      Rational rate = 0;
      for (int b = 0; b < chart.k; ++b) rate += iota_up.at(cc, b) * start.pi_kk.at(a, b);
      out.y[size_t(cc)] += t * rate;
    }
  }
  return out;
}

DriftReport conservation_run(const Chart& chart, const KKMetric& g, const VectorFieldY& xi,
                             const FramePoint& start, double t_max, double dt) {
  require_grid(t_max, dt);
  ST2Observable obs = st2_from_metric(g);
  HamiltonianFamily family = hamiltonian_family_solve(chart, obs);
  std::vector<CompiledExpr> momenta = compile_momentum_slots(chart, xi);
  FrameGuard guard(chart);
  std::vector<double> state0 = frame_state(chart, start);
  int steps = int(std::llround(t_max / dt));

  DriftReport report;
  report.invariant = all_zero(poisson_T1_ST2(chart, xi, obs));
  for (int mu = 0; mu < chart.n + chart.k; ++mu) {
    CompiledField field(family.rep[size_t(mu)].comps(), chart.lvy);
    std::vector<double> values;
    auto watch = [&](int sample, double t, const std::vector<double>& state) {
      guard.check(sample, state);
      if (mu == 0) report.times.push_back(t);  // grid is shared across slots
      values.push_back(momenta[size_t(mu)].eval(state));
    };
    integrate_rk4(field, state0, 0.0, dt, steps, watch);

    report.labels.push_back(slot_label(chart.n, mu));
    report.initial.push_back(values.front());
    std::vector<double> drift;
    for (double v : values) drift.push_back(v - values.front());
    double worst = 0;
    for (double d : drift) worst = std::max(worst, std::abs(d));
    report.max_abs_drift.push_back(worst);
    report.series.push_back(std::move(values));
    report.drift.push_back(std::move(drift));
  }
  return report;
}

DriftReport parallel_axis_analysis(const AffineScenario& sc, double lambda_max, double dt) {
  require_grid(lambda_max, dt);
  int k = sc.iota.rows();
  if (sc.start.n != 1 || sc.start.k != k)
    throw std::invalid_argument("scenario frame must live over a one-dimensional base");
  require_constant_symmetric(sc.iota, "fiber metric");
  if (sc.rotation.rows() != k || sc.rotation.cols() != k || int(sc.shift.size()) != k)
    throw std::invalid_argument("generator blocks do not match the fiber dimension");
  Mat<Rational> skew = sc.iota * sc.rotation;
  if (!(skew.transpose() == -skew))
    throw std::invalid_argument("rotation block must be antisymmetric for the fiber metric");

  Chart chart = make_chart(1, k);
  VectorFieldY xi(1, k);
  for (int a = 1; a <= k; ++a) {
    Expr comp = Expr(sc.shift[size_t(a - 1)]) * Expr(CoordName::base_x(1));
    for (int b = 1; b <= k; ++b)
      comp = comp + Expr(sc.rotation.at(a - 1, b - 1)) * Expr(CoordName::fiber_y(b));
    xi.set_y_comp(a, comp);
  }

  KKMetric metric(Mat<Rational>::identity(1), sc.iota, Mat<Expr>(k, 1));
  DriftReport report = conservation_run(chart, metric, xi, sc.start, lambda_max, dt);

  // Expected drift: zero on the time slot, lambda xdot^0 iota_AC ydot^C v^A on
  // fiber slot B, with the velocities read off the starting coframe.
  Mat<Rational> iota_up = sc.iota.inverse();
  report.has_correction = true;
  for (int mu = 0; mu <= k; ++mu) {
    Rational rate = 0;
    if (mu >= 1) {
      int b_row = mu - 1;
      Rational xdot = sc.start.pi_kn.at(b_row, 0);
      for (int a = 0; a < k; ++a)
        for (int c = 0; c < k; ++c) {
          Rational ydot_c = 0;
          for (int e = 0; e < k; ++e) ydot_c += iota_up.at(e, c) * sc.start.pi_kk.at(b_row, e);
          rate += xdot * sc.iota.at(a, c) * ydot_c * sc.shift[size_t(a)];
        }
    }
    double slope = rational_to_double(rate);
    std::vector<double> expected;
    for (double t : report.times) expected.push_back(slope * t);
    for (size_t i = 0; i < expected.size(); ++i)
      report.max_correction_mismatch = std::max(
          report.max_correction_mismatch, std::abs(report.drift[size_t(mu)][i] - expected[i]));
    report.correction.push_back(std::move(expected));
  }
  return report;
}

bool parallel_axis_exact_check(const AffineScenario& sc, const Rational& lambda) {
  int k = sc.iota.rows();
  Chart chart = make_chart(1, k);
  VectorFieldY xi(1, k);
  for (int a = 1; a <= k; ++a) {
    Expr comp = Expr(sc.shift[size_t(a - 1)]) * Expr(CoordName::base_x(1));
    for (int b = 1; b <= k; ++b)
      comp = comp + Expr(sc.rotation.at(a - 1, b - 1)) * Expr(CoordName::fiber_y(b));
    xi.set_y_comp(a, comp);
  }
  VVForm jhat = momentum_observable_LVY(chart, xi);
  Mat<Rational> iota_up = sc.iota.inverse();

  for (int mu = 0; mu <= k; ++mu) {
    FramePoint moved =
        closed_form_flow(chart, Mat<Rational>::identity(1), sc.iota, mu, sc.start, lambda);
    Expr component = jhat.coefficient({}, {mu});
    Rational before = component.evaluate(sc.start.as_map());
    Rational after = component.evaluate(moved.as_map());

    Rational rate = 0;
    if (mu >= 1) {
      int b_row = mu - 1;
      Rational xdot = sc.start.pi_kn.at(b_row, 0);
      for (int a = 0; a < k; ++a)
        for (int c = 0; c < k; ++c) {
          Rational ydot_c = 0;
          for (int e = 0; e < k; ++e) ydot_c += iota_up.at(e, c) * sc.start.pi_kk.at(b_row, e);
          rate += xdot * sc.iota.at(a, c) * ydot_c * sc.shift[size_t(a)];
        }
    }
    if (!(after == before + lambda * rate)) return false;
  }
  return true;
}

GeodesicReport geodesic_transport_run(const Chart& chart, const KKMetric& g,
                                      const FramePoint& start, double t_max, double dt) {
  require_grid(t_max, dt);
  HamiltonianFamily family = hamiltonian_family_solve(chart, st2_from_metric(g));
  std::vector<GenericField> fields = no_torsion_select(chart, family, g);

  GeodesicReport report;
  report.no_torsion_exact = no_torsion_residual_zero(chart, fields);
  report.trajectory =
      record_frame_flow(chart, fields[0], start, t_max, dt, "time-slot no-torsion field");

  int nv = chart.n + chart.k;
  std::vector<Mat<Expr>> gamma = christoffel_symbols(chart, g);
  std::vector<std::vector<CompiledExpr>> gamma_c;
  for (int nu = 0; nu < nv; ++nu) {
    std::vector<CompiledExpr> row;
    for (int sg = 0; sg < nv; ++sg)
      for (int rho = 0; rho < nv; ++rho) row.emplace_back(gamma[size_t(nu)].at(sg, rho), chart.lvy);
    gamma_c.push_back(std::move(row));
  }
  auto gamma_at = [&](int nu, int sg, int rho, const std::vector<double>& s) {
    return gamma_c[size_t(nu)][size_t(sg * nv + rho)].eval(s);
  };

  Mat<Expr> cov = g.metric_matrix();
  std::vector<CompiledExpr> cov_c;
  for (int mu = 0; mu < nv; ++mu)
    for (int nu = 0; nu < nv; ++nu) cov_c.emplace_back(cov.at(mu, nu), chart.lvy);
  std::vector<CompiledExpr> vel;
  for (int idx = 0; idx < nv; ++idx) vel.emplace_back(fields[0].comp(idx), chart.lvy);

  const auto& st = report.trajectory.states;
  int last = int(st.size()) - 1;

  // Energy of the analytic velocity against the covariant metric.
  double energy0 = 0;
  for (int i = 0; i <= last; ++i) {
    double e = 0;
    std::vector<double> v(size_t(nv), 0.0);
    for (int a = 0; a < nv; ++a) v[size_t(a)] = vel[size_t(a)].eval(st[size_t(i)]);
    for (int mu = 0; mu < nv; ++mu)
      for (int nu = 0; nu < nv; ++nu)
        e += cov_c[size_t(mu * nv + nu)].eval(st[size_t(i)]) * v[size_t(mu)] * v[size_t(nu)];
    if (i == 0) energy0 = e;
    report.max_energy_drift = std::max(report.max_energy_drift, std::abs(e - energy0));
  }

  // Centered finite differences at interior samples.
  for (int i = 1; i < last; ++i) {
    const auto& prev = st[size_t(i - 1)];
    const auto& here = st[size_t(i)];
    const auto& next = st[size_t(i + 1)];
    std::vector<double> yd(size_t(nv), 0.0);
    for (int rho = 0; rho < nv; ++rho)
      yd[size_t(rho)] = (next[size_t(rho)] - prev[size_t(rho)]) / (2 * dt);

    for (int lam = 0; lam < nv; ++lam) {
      double ydd =
          (next[size_t(lam)] - 2 * here[size_t(lam)] + prev[size_t(lam)]) / (dt * dt);
      double res = ydd;
      for (int rho = 0; rho < nv; ++rho)
        for (int mu = 0; mu < nv; ++mu)
          res += gamma_at(lam, rho, mu, here) * yd[size_t(rho)] * yd[size_t(mu)];
      report.max_geodesic_residual = std::max(report.max_geodesic_residual, std::abs(res));
    }

    for (int lam = 0; lam < nv; ++lam)
      for (int sg = 0; sg < nv; ++sg) {
        if (!frame_slot_exists(chart.n, lam, sg)) continue;
        int idx = chart.lvy.require(frame_coord(chart.n, lam, sg));
        double pidot = (next[size_t(idx)] - prev[size_t(idx)]) / (2 * dt);
        double expect = 0;
        for (int nu = 0; nu < nv; ++nu) {
          if (!frame_slot_exists(chart.n, lam, nu)) continue;
          double pi_lam_nu = here[size_t(chart.lvy.require(frame_coord(chart.n, lam, nu)))];
          for (int rho = 0; rho < nv; ++rho)
            expect += gamma_at(nu, sg, rho, here) * yd[size_t(rho)] * pi_lam_nu;
        }
        report.max_transport_residual =
            std::max(report.max_transport_residual, std::abs(pidot - expect));
      }
  }
  return report;
}

DriftReport reparam_momentum_run(const Chart& chart, const KKMetric& g, const Expr& f,
                                 const Mat<Rational>& assoc_b, const Rational& assoc_lambda,
                                 const FramePoint& start, double t_max, double dt) {
  require_grid(t_max, dt);
  if (chart.n != 1 || g.n() != 1)
    throw std::invalid_argument("reparametrization requires a one-dimensional base");
  for (const CoordName& v : f.variables())
    if (!(v == CoordName::base_x(1)))
      throw std::invalid_argument("reparametrization profile must depend on x1 only");

  ST2Observable obs = st2_from_metric(g);
  std::vector<GenericField> fields =
      no_torsion_select(chart, hamiltonian_family_solve(chart, obs), g);
  VectorFieldY xi(1, chart.k);
  xi.set_x_comp(1, f);

  std::vector<CompiledExpr> momenta = compile_momentum_slots(chart, xi);
  std::vector<std::string> labels;
  for (int mu = 0; mu < 1 + chart.k; ++mu) labels.push_back(slot_label(1, mu));

  // Phase-space momentum seen through the associated map at (B, lambda).
  auto relations = rho_relations(chart, assoc_b, assoc_lambda);
  std::map<CoordName, Expr> subs(relations.begin(), relations.end());
  Expr downstairs = momentum_observable_Z(chart, xi).coefficient({}).substitute(subs);
  momenta.emplace_back(downstairs, chart.lvy);
  labels.push_back("p");

  FrameGuard guard(chart);
  CompiledField field(fields[0].comps(), chart.lvy);
  int steps = int(std::llround(t_max / dt));

  DriftReport report;
  report.labels = std::move(labels);
  report.invariant = all_zero(poisson_T1_ST2(chart, xi, obs));
  std::vector<std::vector<double>> values(momenta.size());
  auto watch = [&](int sample, double t, const std::vector<double>& state) {
    guard.check(sample, state);
    report.times.push_back(t);
    for (size_t j = 0; j < momenta.size(); ++j) values[j].push_back(momenta[j].eval(state));
  };
  integrate_rk4(field, frame_state(chart, start), 0.0, dt, steps, watch);

  for (auto& series : values) {
    report.initial.push_back(series.front());
    std::vector<double> drift;
    for (double v : series) drift.push_back(v - series.front());
    double worst = 0;
    for (double d : drift) worst = std::max(worst, std::abs(d));
    report.max_abs_drift.push_back(worst);
    report.series.push_back(std::move(series));
    report.drift.push_back(std::move(drift));
  }

  // With a flat connection the flow is an exact base translation, so the
  // expected momenta come from evaluating each observable on the shifted state.
  bool flat = true;
  for (const Mat<Expr>& block : christoffel_symbols(chart, g))
    if (!all_zero(block)) flat = false;
  if (flat) {
    report.has_correction = true;
    std::vector<double> state0 = frame_state(chart, start);
    Mat<Rational> eta_up = g.eta.inverse();
    double xdot = rational_to_double(eta_up.at(0, 0) *
                                     start.pi_nn.at(0, 0));
    int x_idx = chart.lvy.require(CoordName::base_x(1));
    for (size_t j = 0; j < momenta.size(); ++j) {
      std::vector<double> expected;
      std::vector<double> state = state0;
      for (double t : report.times) {
        state[size_t(x_idx)] = state0[size_t(x_idx)] + t * xdot;
        expected.push_back(momenta[j].eval(state) - report.initial[j]);
      }
      for (size_t i = 0; i < expected.size(); ++i)
        report.max_correction_mismatch =
            std::max(report.max_correction_mismatch, std::abs(report.drift[j][i] - expected[i]));
      report.correction.push_back(std::move(expected));
    }
  }
  return report;
}

double rk4_order_slope(double dt_coarse) {
  if (dt_coarse <= 0 || dt_coarse >= 1) throw std::invalid_argument("step must lie in (0, 1)");
  CoordSystem line;
  line.coords.push_back(CoordName::parameter("u"));
  CompiledField growth({Expr(CoordName::parameter("u"))}, line);
  auto endpoint_error = [&](double dt) {
    int steps = int(std::llround(1.0 / dt));
    std::vector<double> end = integrate_rk4(growth, {1.0}, 0.0, dt, steps);
    return std::abs(end[0] - std::exp(1.0));
  };
  return std::log2(endpoint_error(dt_coarse) / endpoint_error(dt_coarse / 2));
}

}  // namespace vertframe
