#include "vertframe/symobs.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vertframe {

namespace {

constexpr double kFrameDetTolerance = 1e-9;

Mat<Expr> to_expr(const Mat<Rational>& m) {
  Mat<Expr> out(m.rows(), m.cols());
  for (int r = 0; r < m.rows(); ++r)
    for (int c = 0; c < m.cols(); ++c) out.at(r, c) = Expr(m.at(r, c));
  return out;
}

// Y coordinate at flat index rho (0..n-1 base, n..n+k-1 fiber).
CoordName y_coord_name(int n, int rho) {
  return rho < n ? CoordName::base_x(rho + 1) : CoordName::fiber_y(rho - n + 1);
}

// Does the coframe row of value slot mu have an entry over Y coordinate rho?
bool frame_slot_exists(int n, int mu, int rho) { return mu >= n || rho < n; }

CoordName frame_coord(int n, int mu, int rho) {
  if (mu < n) return CoordName::frame_nn(mu + 1, rho + 1);
  if (rho < n) return CoordName::frame_kn(mu - n + 1, rho + 1);
  return CoordName::frame_kk(mu - n + 1, rho - n + 1);
}

// Coframe components as a matrix: row = value slot, column = Y coordinate.
Mat<Expr> coframe_matrix(const Chart& chart) {
  int nv = chart.n + chart.k;
  Mat<Expr> out(nv, nv);
  for (int mu = 0; mu < nv; ++mu)
    for (int rho = 0; rho < nv; ++rho)
      if (frame_slot_exists(chart.n, mu, rho))
        out.at(mu, rho) = Expr(frame_coord(chart.n, mu, rho));
  return out;
}

void require_symmetric(const Mat<Expr>& m, const char* what) {
  for (int r = 0; r < m.rows(); ++r)
    for (int c = r + 1; c < m.cols(); ++c)
      if (!(m.at(r, c) == m.at(c, r)))
        throw std::invalid_argument(std::string(what) + " block must be symmetric");
}

void require_variables(const Mat<Expr>& m, int n, int k, bool allow_fiber, const char* what) {
  for (int r = 0; r < m.rows(); ++r)
    for (int c = 0; c < m.cols(); ++c)
      for (const CoordName& v : m.at(r, c).variables()) {
        bool ok = (v.kind == CoordKind::BaseX && v.i <= n) || v.kind == CoordKind::Param ||
                  (allow_fiber && v.kind == CoordKind::FiberY && v.i <= k);
        if (!ok)
          throw std::invalid_argument(std::string(what) + " depends on disallowed coordinate " +
                                      v.str());
      }
}

std::vector<Expr> generator_components(const VectorFieldY& xi) {
  std::vector<Expr> out;
  for (int i = 1; i <= xi.n(); ++i) out.push_back(xi.x_comp(i));
  for (int a = 1; a <= xi.k(); ++a) out.push_back(xi.y_comp(a));
  return out;
}

void require_chart_match(const Chart& chart, int n, int k, const char* what) {
  if (chart.n != n || chart.k != k)
    throw std::invalid_argument(std::string(what) + " does not match the chart dimensions");
}

}  // namespace

// ---------------------------------------------------------------------------
// Observable and metric types

ST2Observable::ST2Observable(int n, int k, Mat<Expr> base_block, Mat<Expr> mixed_block,
                             Mat<Expr> fiber_block)
    : n_(n), k_(k), base_(std::move(base_block)), mixed_(std::move(mixed_block)),
      fiber_(std::move(fiber_block)) {
  if (n < 1 || k < 1) throw std::invalid_argument("chart dimensions must be >= 1");
  if (base_.rows() != n || base_.cols() != n || mixed_.rows() != n || mixed_.cols() != k ||
      fiber_.rows() != k || fiber_.cols() != k)
    throw std::invalid_argument("observable block shape mismatch");
  require_symmetric(base_, "base");
  require_symmetric(fiber_, "fiber");
  require_variables(base_, n, k, false, "base block");
  require_variables(mixed_, n, k, true, "mixed block");
  require_variables(fiber_, n, k, true, "fiber block");
}

Mat<Expr> ST2Observable::full_matrix() const {
  Mat<Expr> out(n_ + k_, n_ + k_);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) out.at(i, j) = base_.at(i, j);
  for (int i = 0; i < n_; ++i)
    for (int a = 0; a < k_; ++a) {
      out.at(i, n_ + a) = mixed_.at(i, a);
      out.at(n_ + a, i) = mixed_.at(i, a);
    }
  for (int a = 0; a < k_; ++a)
    for (int b = 0; b < k_; ++b) out.at(n_ + a, n_ + b) = fiber_.at(a, b);
  return out;
}

KKMetric::KKMetric(Mat<Rational> eta_in, Mat<Rational> iota_in, Mat<Expr> gamma_in)
    : eta(std::move(eta_in)), iota(std::move(iota_in)), gamma(std::move(gamma_in)) {
  if (eta.rows() != eta.cols() || iota.rows() != iota.cols())
    throw std::invalid_argument("metric blocks must be square");
  if (eta.rows() < 1 || iota.rows() < 1)
    throw std::invalid_argument("chart dimensions must be >= 1");
  if (gamma.rows() != k() || gamma.cols() != n())
    throw std::invalid_argument("connection block shape mismatch");
  if (!(eta == eta.transpose()) || !(iota == iota.transpose()))
    throw std::invalid_argument("metric blocks must be symmetric");
  if (eta.det() == 0) throw std::domain_error("singular base metric");
  if (iota.det() == 0) throw std::domain_error("singular fiber metric");
  require_variables(gamma, n(), k(), true, "connection");
}

Mat<Expr> KKMetric::metric_matrix() const {
  Mat<Expr> et = to_expr(eta);
  Mat<Expr> io = to_expr(iota);
  Mat<Expr> gt = gamma.transpose();
  Mat<Expr> base = et + gt * io * gamma;
  Mat<Expr> mixed = -(gt * io);

  int nv = n() + k();
  Mat<Expr> out(nv, nv);
  for (int i = 0; i < n(); ++i)
    for (int j = 0; j < n(); ++j) out.at(i, j) = base.at(i, j);
  for (int i = 0; i < n(); ++i)
    for (int a = 0; a < k(); ++a) {
      out.at(i, n() + a) = mixed.at(i, a);
      out.at(n() + a, i) = mixed.at(i, a);
    }
  for (int a = 0; a < k(); ++a)
    for (int b = 0; b < k(); ++b) out.at(n() + a, n() + b) = io.at(a, b);
  return out;
}

Mat<Expr> KKMetric::inverse_metric_matrix() const {
  Mat<Expr> etinv = to_expr(eta.inverse());
  Mat<Expr> ioinv = to_expr(iota.inverse());
  Mat<Expr> mixed = etinv * gamma.transpose();
  Mat<Expr> fiber = ioinv + gamma * etinv * gamma.transpose();

  int nv = n() + k();
  Mat<Expr> out(nv, nv);
  for (int i = 0; i < n(); ++i)
    for (int j = 0; j < n(); ++j) out.at(i, j) = etinv.at(i, j);
  for (int i = 0; i < n(); ++i)
    for (int a = 0; a < k(); ++a) {
      out.at(i, n() + a) = mixed.at(i, a);
      out.at(n() + a, i) = mixed.at(i, a);
    }
  for (int a = 0; a < k(); ++a)
    for (int b = 0; b < k(); ++b) out.at(n() + a, n() + b) = fiber.at(a, b);
  return out;
}

ST2Observable st2_from_metric(const KKMetric& g) {
  Mat<Expr> inv = g.inverse_metric_matrix();
  int n = g.n(), k = g.k();
  Mat<Expr> base(n, n), mixed(n, k), fiber(k, k);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) base.at(i, j) = inv.at(i, j);
  for (int i = 0; i < n; ++i)
    for (int a = 0; a < k; ++a) mixed.at(i, a) = inv.at(i, n + a);
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b) fiber.at(a, b) = inv.at(n + a, n + b);
  return ST2Observable(n, k, std::move(base), std::move(mixed), std::move(fiber));
}

Mat<Expr> st2_hat_matrix(const Chart& chart, const ST2Observable& g) {
  require_chart_match(chart, g.n(), g.k(), "observable");
  Mat<Expr> coframe = coframe_matrix(chart);
  return coframe * g.full_matrix() * coframe.transpose();
}

// ---------------------------------------------------------------------------
// Hamiltonian families

HamiltonianFamily hamiltonian_family_solve(const Chart& chart, const ST2Observable& g) {
  require_chart_match(chart, g.n(), g.k(), "observable");
  const int n = chart.n, nv = chart.n + chart.k;
  Mat<Expr> coframe = coframe_matrix(chart);
  Mat<Expr> comp = g.full_matrix();
  Mat<Expr> ghat = coframe * comp * coframe.transpose();

  std::vector<GenericField> fields(size_t(nv), GenericField(chart.lvy));

  // transport part: the tensor applied to the coframe row
  for (int mu = 0; mu < nv; ++mu)
    for (int lam = 0; lam < nv; ++lam) {
      Expr c;
      for (int beta = 0; beta < nv; ++beta) c += comp.at(lam, beta) * coframe.at(mu, beta);
      fields[size_t(mu)].set_comp(y_coord_name(n, lam), c);
    }

  // frame part: split the Y derivatives of ghat across the available slots
  for (int mu = 0; mu < nv; ++mu)
    for (int nu = mu; nu < nv; ++nu)
      for (int rho = 0; rho < nv; ++rho) {
        Expr s = -ghat.at(mu, nu).derivative(y_coord_name(n, rho));
        bool in_mu = frame_slot_exists(n, nu, rho);
        bool in_nu = frame_slot_exists(n, mu, rho);
        if (in_mu && in_nu) {
          Expr half = s * Expr(Rational(1, 2));
          fields[size_t(mu)].set_comp(frame_coord(n, nu, rho), half);
          if (mu != nu) fields[size_t(nu)].set_comp(frame_coord(n, mu, rho), half);
        } else if (in_mu) {
          fields[size_t(mu)].set_comp(frame_coord(n, nu, rho), s);
        } else if (in_nu) {
          fields[size_t(nu)].set_comp(frame_coord(n, mu, rho), s);
        } else if (!s.is_zero()) {
          throw std::domain_error("not solvable in ansatz");
        }
      }
  return HamiltonianFamily{std::move(fields)};
}

Form structure_residual(const Chart& chart, const ST2Observable& g,
                        const std::vector<GenericField>& fields, int mu, int nu) {
  if (fields.size() != size_t(chart.n + chart.k))
    throw std::invalid_argument("one field per value slot required");
  Mat<Expr> ghat = st2_hat_matrix(chart, g);
  VVForm dtheta = soldering_structure(chart);
  Form lhs = exterior_derivative(Form::function(chart.lvy, ghat.at(mu, nu)));
  return lhs + interior_product(fields[size_t(mu)], dtheta.value_component({nu})) +
         interior_product(fields[size_t(nu)], dtheta.value_component({mu}));
}

bool structure_equation_holds(const Chart& chart, const ST2Observable& g,
                              const std::vector<GenericField>& fields) {
  int nv = chart.n + chart.k;
  for (int mu = 0; mu < nv; ++mu)
    for (int nu = mu; nu < nv; ++nu)
      if (!structure_residual(chart, g, fields, mu, nu).is_zero()) return false;
  return true;
}

bool vertical_ambiguity_check(const Chart& chart, const std::vector<GenericField>& a,
                              const std::vector<GenericField>& b) {
  int nv = chart.n + chart.k;
  if (a.size() != size_t(nv) || b.size() != size_t(nv))
    throw std::invalid_argument("one field per value slot required");

  std::vector<GenericField> diff(size_t(nv), GenericField(chart.lvy));
  for (int mu = 0; mu < nv; ++mu)
    for (int idx = 0; idx < chart.lvy.dim(); ++idx)
      diff[size_t(mu)].set_comp(idx, a[size_t(mu)].comp(idx) - b[size_t(mu)].comp(idx));

  // vertical: no transport components
  for (int mu = 0; mu < nv; ++mu)
    for (int rho = 0; rho < nv; ++rho)
      if (!diff[size_t(mu)].comp(y_coord_name(chart.n, rho)).is_zero()) return false;

  // the symmetrized contraction drops out
  VVForm dtheta = soldering_structure(chart);
  for (int mu = 0; mu < nv; ++mu)
    for (int nu = mu; nu < nv; ++nu) {
      Form r = interior_product(diff[size_t(mu)], dtheta.value_component({nu})) +
               interior_product(diff[size_t(nu)], dtheta.value_component({mu}));
      if (!r.is_zero()) return false;
    }
  return true;
}

std::vector<GenericField> random_vertical_ambiguity(std::mt19937_64& rng, const Chart& chart) {
  int nv = chart.n + chart.k;
  std::vector<GenericField> out(size_t(nv), GenericField(chart.lvy));
  std::uniform_int_distribution<int> coin(0, 1);
  std::uniform_int_distribution<int> pick(0, chart.lvy.dim() - 1);
  for (int mu = 0; mu < nv; ++mu)
    for (int nu = mu + 1; nu < nv; ++nu)
      for (int rho = 0; rho < nv; ++rho) {
        // a slot is admissible only when both paired coframe rows carry it
        if (!frame_slot_exists(chart.n, nu, rho) || !frame_slot_exists(chart.n, mu, rho))
          continue;
        if (coin(rng) == 0) continue;
        Expr w = Expr(random_small_rational_nonzero(rng, 3, 2));
        if (coin(rng) == 1) w = w * Expr(chart.lvy.at(pick(rng)));
        out[size_t(mu)].set_comp(frame_coord(chart.n, nu, rho), w);
        out[size_t(nu)].set_comp(frame_coord(chart.n, mu, rho), -w);
      }
  return out;
}

// ---------------------------------------------------------------------------
// Levi-Civita structure and the no-torsion representative

std::vector<Mat<Expr>> christoffel_symbols(const Chart& chart, const KKMetric& g) {
  require_chart_match(chart, g.n(), g.k(), "metric");
  const int nv = chart.n + chart.k;
  Mat<Expr> cov = g.metric_matrix();
  Mat<Expr> inv = g.inverse_metric_matrix();
  Expr half(Rational(1, 2));

  std::vector<Mat<Expr>> out;
  for (int mu = 0; mu < nv; ++mu) {
    Mat<Expr> m(nv, nv);
    for (int nu = 0; nu < nv; ++nu)
      for (int lam = 0; lam < nv; ++lam) {
        Expr acc;
        for (int sigma = 0; sigma < nv; ++sigma) {
          Expr inner = cov.at(sigma, lam).derivative(y_coord_name(chart.n, nu)) +
                       cov.at(sigma, nu).derivative(y_coord_name(chart.n, lam)) -
                       cov.at(nu, lam).derivative(y_coord_name(chart.n, sigma));
          acc += inv.at(mu, sigma) * inner;
        }
        m.at(nu, lam) = acc * half;
      }
    out.push_back(std::move(m));
  }
  return out;
}

std::vector<GenericField> no_torsion_select(const Chart& chart, const HamiltonianFamily& family,
                                            const KKMetric& g) {
  require_chart_match(chart, g.n(), g.k(), "metric");
  const int n = chart.n, nv = chart.n + chart.k;
  Mat<Expr> coframe = coframe_matrix(chart);
  Mat<Expr> inv = g.inverse_metric_matrix();
  std::vector<Mat<Expr>> gamma = christoffel_symbols(chart, g);

  std::vector<GenericField> fields(size_t(nv), GenericField(chart.lvy));
  for (int mu = 0; mu < nv; ++mu) {
    for (int lam = 0; lam < nv; ++lam) {
      Expr c;
      for (int nu = 0; nu < nv; ++nu) c += inv.at(nu, lam) * coframe.at(mu, nu);
      fields[size_t(mu)].set_comp(y_coord_name(n, lam), c);
    }
    for (int lam = 0; lam < nv; ++lam)
      for (int sigma = 0; sigma < nv; ++sigma) {
        Expr t;
        for (int nu = 0; nu < nv; ++nu)
          for (int rho = 0; rho < nv; ++rho)
            for (int kap = 0; kap < nv; ++kap)
              t += gamma[size_t(nu)].at(sigma, rho) * inv.at(kap, rho) * coframe.at(mu, kap) *
                   coframe.at(lam, nu);
        if (frame_slot_exists(n, lam, sigma)) {
          fields[size_t(mu)].set_comp(frame_coord(n, lam, sigma), t);
        } else if (!t.is_zero()) {
          throw std::domain_error("no-torsion representative leaves the vertically adapted chart");
        }
      }
  }

  if (!vertical_ambiguity_check(chart, fields, family.rep))
    throw std::invalid_argument("family does not belong to the metric observable");
  return fields;
}

bool no_torsion_residual_zero(const Chart& chart, const std::vector<GenericField>& fields) {
  int nv = chart.n + chart.k;
  if (fields.size() != size_t(nv))
    throw std::invalid_argument("one field per value slot required");
  VVForm dtheta = soldering_structure(chart);
  for (int mu = 0; mu < nv; ++mu)
    for (int nu = 0; nu < nv; ++nu)
      for (int lam = 0; lam < nv; ++lam) {
        Form once = interior_product(fields[size_t(nu)], dtheta.value_component({lam}));
        if (!interior_product(fields[size_t(mu)], once).is_zero()) return false;
      }
  return true;
}

// ---------------------------------------------------------------------------
// Symmetry diagnostics

Mat<Expr> killing_residual(const Chart& chart, const VectorFieldY& xi, const KKMetric& g) {
  require_chart_match(chart, g.n(), g.k(), "metric");
  if (xi.n() != chart.n || xi.k() != chart.k)
    throw std::invalid_argument("vector field chart mismatch");
  const int nv = chart.n + chart.k;
  Mat<Expr> cov = g.metric_matrix();
  std::vector<Expr> comp = generator_components(xi);

  Mat<Expr> res(nv, nv);
  for (int mu = 0; mu < nv; ++mu)
    for (int kap = 0; kap < nv; ++kap) {
      Expr acc;
      for (int lam = 0; lam < nv; ++lam) {
        acc += comp[size_t(lam)] * cov.at(mu, kap).derivative(y_coord_name(chart.n, lam));
        acc += cov.at(lam, kap) * comp[size_t(lam)].derivative(y_coord_name(chart.n, mu));
        acc += cov.at(mu, lam) * comp[size_t(lam)].derivative(y_coord_name(chart.n, kap));
      }
      res.at(mu, kap) = acc;
    }
  return res;
}

bool invariance_check(const Chart& chart, const ST2Observable& g, const VectorFieldY& xi) {
  GenericField lift = lift_to_LVY(chart, xi);
  Mat<Expr> ghat = st2_hat_matrix(chart, g);
  for (int mu = 0; mu < ghat.rows(); ++mu)
    for (int nu = mu; nu < ghat.cols(); ++nu)
      if (!lift.apply(ghat.at(mu, nu)).is_zero()) return false;
  return true;
}

std::vector<VectorFieldY> orthogonal_generators(const Mat<Rational>& eta,
                                                const Mat<Rational>& iota) {
  int n = eta.rows(), k = iota.rows();
  Mat<Rational> etainv = eta.inverse();
  Mat<Rational> iotainv = iota.inverse();

  std::vector<VectorFieldY> out;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      Mat<Rational> a(n, n);
      a.at(i, j) = 1;
      a.at(j, i) = -1;
      Mat<Rational> m = etainv * a;
      VectorFieldY xi(n, k);
      for (int r = 0; r < n; ++r) {
        Expr comp;
        for (int c = 0; c < n; ++c)
          comp += Expr(m.at(r, c)) * Expr(CoordName::base_x(c + 1));
        xi.set_x_comp(r + 1, comp);
      }
      out.push_back(std::move(xi));
    }
  for (int a = 0; a < k; ++a)
    for (int b = a + 1; b < k; ++b) {
      Mat<Rational> m0(k, k);
      m0.at(a, b) = 1;
      m0.at(b, a) = -1;
      Mat<Rational> m = iotainv * m0;
      VectorFieldY xi(n, k);
      for (int r = 0; r < k; ++r) {
        Expr comp;
        for (int c = 0; c < k; ++c)
          comp += Expr(m.at(r, c)) * Expr(CoordName::fiber_y(c + 1));
        xi.set_y_comp(r + 1, comp);
      }
      out.push_back(std::move(xi));
    }
  return out;
}

Mat<Expr> poisson_T1_ST2(const Chart& chart, const VectorFieldY& xi, const ST2Observable& g) {
  GenericField lift = lift_to_LVY(chart, xi);
  Mat<Expr> ghat = st2_hat_matrix(chart, g);
  Mat<Expr> out(ghat.rows(), ghat.cols());
  for (int mu = 0; mu < ghat.rows(); ++mu)
    for (int nu = 0; nu < ghat.cols(); ++nu) out.at(mu, nu) = -lift.apply(ghat.at(mu, nu));
  return out;
}

Mat<Expr> poisson_ST2_T1(const Chart& chart, const ST2Observable& g,
                         const std::vector<GenericField>& rep, const VectorFieldY& xi) {
  require_chart_match(chart, g.n(), g.k(), "observable");
  int nv = chart.n + chart.k;
  if (rep.size() != size_t(nv))
    throw std::invalid_argument("one field per value slot required");
  VVForm jhat = momentum_observable_LVY(chart, xi);
  std::vector<Expr> f;
  for (int mu = 0; mu < nv; ++mu) f.push_back(jhat.coefficient({}, {mu}));

  Mat<Expr> out(nv, nv);
  for (int mu = 0; mu < nv; ++mu)
    for (int nu = 0; nu < nv; ++nu)
      out.at(mu, nu) =
          -(rep[size_t(mu)].apply(f[size_t(nu)]) + rep[size_t(nu)].apply(f[size_t(mu)]));
  return out;
}

// ---------------------------------------------------------------------------
// Flow-level conservation probe

std::vector<double> frame_state(const Chart& chart, const FramePoint& w) {
  if (w.n != chart.n || w.k != chart.k)
    throw std::invalid_argument("frame point chart mismatch");
  auto values = w.as_map();
  std::vector<double> out;
  for (int idx = 0; idx < chart.lvy.dim(); ++idx)
    out.push_back(rational_to_double(values.at(chart.lvy.at(idx))));
  return out;
}

ConservedQuantityReport conserved_quantity_check(const Chart& chart, const VectorFieldY& xi,
                                                 const ST2Observable& g, const FramePoint& w0,
                                                 double t_max, double dt) {
  if (t_max <= 0 || dt <= 0) throw std::invalid_argument("time grid must be positive");
  ConservedQuantityReport report;

  Mat<Expr> bracket = poisson_T1_ST2(chart, xi, g);
  report.invariant = true;
  for (int mu = 0; mu < bracket.rows() && report.invariant; ++mu)
    for (int nu = 0; nu < bracket.cols(); ++nu)
      if (!bracket.at(mu, nu).is_zero()) {
        report.invariant = false;
        break;
      }

  HamiltonianFamily family = hamiltonian_family_solve(chart, g);
  VVForm jhat = momentum_observable_LVY(chart, xi);
  CompiledExpr det_base(frame_nn_expr(chart).det(), chart.lvy);
  CompiledExpr det_fiber(frame_kk_expr(chart).det(), chart.lvy);
  std::vector<double> start = frame_state(chart, w0);
  int steps = int(std::llround(t_max / dt));

  int nv = chart.n + chart.k;
  for (int mu = 0; mu < nv; ++mu) {
    CompiledField field(family.rep[size_t(mu)].comps(), chart.lvy);
    CompiledExpr observable(jhat.coefficient({}, {mu}), chart.lvy);

    double initial = 0.0;
    std::vector<double> series;
    auto watch = [&](int step, double, const std::vector<double>& state) {
      if (std::abs(det_base.eval(state)) < kFrameDetTolerance ||
          std::abs(det_fiber.eval(state)) < kFrameDetTolerance)
        throw std::runtime_error("frame degenerates along the flow");
      double value = observable.eval(state);
      if (step == 0) initial = value;
      series.push_back(std::abs(value - initial));
    };
    integrate_rk4(field, start, 0.0, dt, steps, watch);

    report.max_drift.push_back(*std::max_element(series.begin(), series.end()));
    report.drift_series.push_back(std::move(series));
  }
  return report;
}

}  // namespace vertframe
