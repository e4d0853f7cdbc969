#include "vertframe/vframe.hpp"

#include <stdexcept>

namespace vertframe {

namespace {

Mat<Expr> to_expr(const Mat<Rational>& m) {
  Mat<Expr> out(m.rows(), m.cols());
  for (int r = 0; r < m.rows(); ++r)
    for (int c = 0; c < m.cols(); ++c) out.at(r, c) = Expr(m.at(r, c));
  return out;
}

void require_invertible(const Mat<Rational>& m, const char* what) {
  if (m.det() == 0) throw std::domain_error(std::string("singular ") + what);
}

int value_slot_r(int i) { return i - 1; }          // base direction r_i
int value_slot_s(const Chart& chart, int a) { return chart.n + a - 1; }  // fiber s_A

}  // namespace

// ---------------------------------------------------------------------------
// FramePoint / GAElement / T1Observable

FramePoint::FramePoint(int n, int k)
    : n(n),
      k(k),
      x(size_t(n)),
      y(size_t(k)),
      pi_nn(Mat<Rational>::identity(n)),
      pi_kk(Mat<Rational>::identity(k)),
      pi_kn(k, n) {
  if (n < 1 || k < 1) throw std::invalid_argument("chart dimensions must be >= 1");
}

FramePoint::FramePoint(int n, int k, std::vector<Rational> x, std::vector<Rational> y,
                       Mat<Rational> nn, Mat<Rational> kk, Mat<Rational> kn)
    : n(n), k(k), x(std::move(x)), y(std::move(y)), pi_nn(std::move(nn)),
      pi_kk(std::move(kk)), pi_kn(std::move(kn)) {
  if (n < 1 || k < 1) throw std::invalid_argument("chart dimensions must be >= 1");
  if (this->x.size() != size_t(n) || this->y.size() != size_t(k))
    throw std::invalid_argument("position dimension mismatch");
  if (pi_nn.rows() != n || pi_nn.cols() != n || pi_kk.rows() != k || pi_kk.cols() != k ||
      pi_kn.rows() != k || pi_kn.cols() != n)
    throw std::invalid_argument("frame block shape mismatch");
  require_invertible(pi_nn, "base coframe block");
  require_invertible(pi_kk, "fiber coframe block");
}

std::map<CoordName, Rational> FramePoint::as_map() const {
  std::map<CoordName, Rational> out;
  for (int i = 1; i <= n; ++i) out[CoordName::base_x(i)] = x[size_t(i - 1)];
  for (int a = 1; a <= k; ++a) out[CoordName::fiber_y(a)] = y[size_t(a - 1)];
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= n; ++j) out[CoordName::frame_nn(i, j)] = pi_nn.at(i - 1, j - 1);
  for (int a = 1; a <= k; ++a)
    for (int b = 1; b <= k; ++b) out[CoordName::frame_kk(a, b)] = pi_kk.at(a - 1, b - 1);
  for (int a = 1; a <= k; ++a)
    for (int i = 1; i <= n; ++i) out[CoordName::frame_kn(a, i)] = pi_kn.at(a - 1, i - 1);
  return out;
}

GAElement::GAElement(Mat<Rational> n_blk, Mat<Rational> k_blk, Mat<Rational> a_blk)
    : N(std::move(n_blk)), K(std::move(k_blk)), A(std::move(a_blk)) {
  if (N.rows() != N.cols() || K.rows() != K.cols())
    throw std::invalid_argument("group blocks must be square");
  if (A.rows() != K.rows() || A.cols() != N.rows())
    throw std::invalid_argument("mixed block shape mismatch");
  require_invertible(N, "group block N");
  require_invertible(K, "group block K");
}

GAElement GAElement::identity(int n, int k) {
  return GAElement(Mat<Rational>::identity(n), Mat<Rational>::identity(k),
                   Mat<Rational>(k, n));
}

GAElement GAElement::operator*(const GAElement& other) const {
  // block product of [[N,0],[A,K]] matrices
  return GAElement(N * other.N, K * other.K, A * other.N + K * other.A);
}

GAElement GAElement::inverse() const {
  Mat<Rational> ninv = N.inverse();
  Mat<Rational> kinv = K.inverse();
  return GAElement(ninv, kinv, -(kinv * A * ninv));
}

Mat<Rational> GAElement::block_matrix() const {
  int n = N.rows(), k = K.rows();
  Mat<Rational> out(n + k, n + k);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) out.at(r, c) = N.at(r, c);
  for (int r = 0; r < k; ++r)
    for (int c = 0; c < n; ++c) out.at(n + r, c) = A.at(r, c);
  for (int r = 0; r < k; ++r)
    for (int c = 0; c < k; ++c) out.at(n + r, n + c) = K.at(r, c);
  return out;
}

bool GAElement::is_identity() const {
  return N == Mat<Rational>::identity(N.rows()) && K == Mat<Rational>::identity(K.rows()) &&
         A == Mat<Rational>(K.rows(), N.rows());
}

T1Observable::T1Observable(VectorFieldY f) : field(std::move(f)) {
  if (!is_projectable(field))
    throw std::invalid_argument(
        "not a tensorial observable: base components depend on fiber coordinates");
}

// ---------------------------------------------------------------------------
// Coordinate block matrices

Mat<Expr> frame_nn_expr(const Chart& chart) {
  Mat<Expr> out(chart.n, chart.n);
  for (int i = 1; i <= chart.n; ++i)
    for (int j = 1; j <= chart.n; ++j) out.at(i - 1, j - 1) = Expr(CoordName::frame_nn(i, j));
  return out;
}

Mat<Expr> frame_kk_expr(const Chart& chart) {
  Mat<Expr> out(chart.k, chart.k);
  for (int a = 1; a <= chart.k; ++a)
    for (int b = 1; b <= chart.k; ++b) out.at(a - 1, b - 1) = Expr(CoordName::frame_kk(a, b));
  return out;
}

Mat<Expr> frame_kn_expr(const Chart& chart) {
  Mat<Expr> out(chart.k, chart.n);
  for (int a = 1; a <= chart.k; ++a)
    for (int i = 1; i <= chart.n; ++i) out.at(a - 1, i - 1) = Expr(CoordName::frame_kn(a, i));
  return out;
}

// ---------------------------------------------------------------------------
// Soldering form and observables

VVForm soldering_form(const Chart& chart) {
  const CoordSystem& sys = chart.lvy;
  VVForm theta(sys, chart.n + chart.k, 1, 1);
  for (int i = 1; i <= chart.n; ++i)
    for (int j = 1; j <= chart.n; ++j)
      theta.add_term({sys.require(CoordName::base_x(j))}, {value_slot_r(i)},
                     Expr(CoordName::frame_nn(i, j)));
  for (int a = 1; a <= chart.k; ++a) {
    for (int i = 1; i <= chart.n; ++i)
      theta.add_term({sys.require(CoordName::base_x(i))}, {value_slot_s(chart, a)},
                     Expr(CoordName::frame_kn(a, i)));
    for (int b = 1; b <= chart.k; ++b)
      theta.add_term({sys.require(CoordName::fiber_y(b))}, {value_slot_s(chart, a)},
                     Expr(CoordName::frame_kk(a, b)));
  }
  return theta;
}

VVForm soldering_structure(const Chart& chart) {
  return vv_exterior_derivative(soldering_form(chart));
}

FramePoint ga_act_frame(const FramePoint& w, const GAElement& g) {
  if (g.N.rows() != w.n || g.K.rows() != w.k)
    throw std::invalid_argument("group element dimension mismatch");
  Mat<Rational> ninv = g.N.inverse();
  Mat<Rational> kinv = g.K.inverse();
  return FramePoint(w.n, w.k, w.x, w.y, ninv * w.pi_nn, kinv * w.pi_kk,
                    kinv * w.pi_kn - kinv * g.A * ninv * w.pi_nn);
}

VVForm momentum_observable_LVY(const Chart& chart, const VectorFieldY& xi) {
  if (xi.n() != chart.n || xi.k() != chart.k)
    throw std::invalid_argument("vector field chart mismatch");
  if (!is_projectable(xi)) throw std::invalid_argument("vector field is not projectable");
  VVForm out(chart.lvy, chart.n + chart.k, 0, 1);
  for (int j = 1; j <= chart.n; ++j) {
    Expr comp;
    for (int i = 1; i <= chart.n; ++i)
      comp += xi.x_comp(i) * Expr(CoordName::frame_nn(j, i));
    out.add_term({}, {value_slot_r(j)}, comp);
  }
  for (int b = 1; b <= chart.k; ++b) {
    Expr comp;
    for (int a = 1; a <= chart.k; ++a)
      comp += xi.y_comp(a) * Expr(CoordName::frame_kk(b, a));
    for (int i = 1; i <= chart.n; ++i)
      comp += xi.x_comp(i) * Expr(CoordName::frame_kn(b, i));
    out.add_term({}, {value_slot_s(chart, b)}, comp);
  }
  return out;
}

GenericField hamiltonian_solve_T1(const Chart& chart, const T1Observable& f) {
  const VectorFieldY& v = f.field;
  if (v.n() != chart.n || v.k() != chart.k)
    throw std::invalid_argument("observable chart mismatch");
  GenericField out(chart.lvy);
  for (int i = 1; i <= chart.n; ++i) out.set_comp(CoordName::base_x(i), v.x_comp(i));
  for (int a = 1; a <= chart.k; ++a) out.set_comp(CoordName::fiber_y(a), v.y_comp(a));

  // base frame block: -(df^m/dx^j) pi^i_m on d/dpi^i_j
  for (int i = 1; i <= chart.n; ++i)
    for (int j = 1; j <= chart.n; ++j) {
      Expr comp;
      for (int m = 1; m <= chart.n; ++m)
        comp -= v.x_comp(m).derivative(CoordName::base_x(j)) *
                Expr(CoordName::frame_nn(i, m));
      out.set_comp(CoordName::frame_nn(i, j), comp);
    }

  // fiber frame block: -(df^C/dy^B) pi^A_C on d/dpi^A_B
  for (int a = 1; a <= chart.k; ++a)
    for (int b = 1; b <= chart.k; ++b) {
      Expr comp;
      for (int c = 1; c <= chart.k; ++c)
        comp -= v.y_comp(c).derivative(CoordName::fiber_y(b)) *
                Expr(CoordName::frame_kk(a, c));
      out.set_comp(CoordName::frame_kk(a, b), comp);
    }

  // mixed block: -(df^j/dx^i pi^A_j + df^B/dx^i pi^A_B) on d/dpi^A_i
  for (int a = 1; a <= chart.k; ++a)
    for (int i = 1; i <= chart.n; ++i) {
      Expr comp;
      for (int j = 1; j <= chart.n; ++j)
        comp -= v.x_comp(j).derivative(CoordName::base_x(i)) *
                Expr(CoordName::frame_kn(a, j));
      for (int b = 1; b <= chart.k; ++b)
        comp -= v.y_comp(b).derivative(CoordName::base_x(i)) *
                Expr(CoordName::frame_kk(a, b));
      out.set_comp(CoordName::frame_kn(a, i), comp);
    }
  return out;
}

GenericField lift_to_LVY(const Chart& chart, const VectorFieldY& xi) {
  return hamiltonian_solve_T1(chart, T1Observable(xi));
}

VVForm poisson_LVY(const Chart& chart, const VectorFieldY& xi, const VectorFieldY& zeta) {
  VVForm dtheta = soldering_structure(chart);
  GenericField xl = lift_to_LVY(chart, xi);
  GenericField zl = lift_to_LVY(chart, zeta);
  return -vv_interior_product(xl, vv_interior_product(zl, dtheta));
}

bool tensoriality_check(const Chart& chart, const VectorFieldY& xi, const FramePoint& w,
                        const GAElement& g) {
  auto evaluate_at = [&chart, &xi](const FramePoint& pt) {
    VVForm obs = momentum_observable_LVY(chart, xi);
    auto coords = pt.as_map();
    Mat<Rational> out(chart.n + chart.k, 1);
    for (int mu = 0; mu < chart.n + chart.k; ++mu)
      out.at(mu, 0) = obs.coefficient({}, {mu}).evaluate(coords);
    return out;
  };
  Mat<Rational> translated = evaluate_at(ga_act_frame(w, g));
  Mat<Rational> reference = g.inverse().block_matrix() * evaluate_at(w);
  return translated == reference;
}

// ---------------------------------------------------------------------------
// Associated-bundle structure

std::pair<Mat<Rational>, Rational> ga_act_pair(const GAElement& g, const Mat<Rational>& B,
                                               const Rational& lambda) {
  Rational dn = g.N.det();
  Mat<Rational> bprime = (g.N * B * g.K.inverse()).scaled(Rational(1) / dn);
  Rational lprime = (lambda - (B * g.K.inverse() * g.A).trace()) / dn;
  return {std::move(bprime), std::move(lprime)};
}

std::map<CoordName, Expr> rho_relations(const Chart& chart, const Mat<Rational>& B,
                                        const Rational& lambda) {
  if (B.rows() != chart.n || B.cols() != chart.k)
    throw std::invalid_argument("associated coordinate B has wrong shape");
  Mat<Expr> adj = frame_nn_expr(chart).adjugate();
  Mat<Expr> bm = to_expr(B);
  Mat<Expr> momenta = adj * bm * frame_kk_expr(chart);

  std::map<CoordName, Expr> out;
  for (int i = 1; i <= chart.n; ++i)
    for (int a = 1; a <= chart.k; ++a)
      out[CoordName::mom_p(i, a)] = momenta.at(i - 1, a - 1);

  Expr p = (bm * frame_kn_expr(chart) * adj).trace() +
           Expr(lambda) * frame_nn_expr(chart).det();
  out[CoordName::mom_scalar()] = p;
  return out;
}

ZPoint rho_hat(const FramePoint& w, const Mat<Rational>& B, const Rational& lambda) {
  Chart chart = make_chart(w.n, w.k);
  auto relations = rho_relations(chart, B, lambda);
  auto coords = w.as_map();
  ZPoint out(w.n, w.k);
  for (int i = 1; i <= w.n; ++i) out.x(i) = w.x[size_t(i - 1)];
  for (int a = 1; a <= w.k; ++a) out.y(a) = w.y[size_t(a - 1)];
  for (int i = 1; i <= w.n; ++i)
    for (int a = 1; a <= w.k; ++a)
      out.p(i, a) = relations.at(CoordName::mom_p(i, a)).evaluate(coords);
  out.p_scalar() = relations.at(CoordName::mom_scalar()).evaluate(coords);
  return out;
}

bool phi_pushforward_check(const Chart& chart, const VectorFieldY& xi, const Mat<Rational>& B,
                           const Rational& lambda) {
  GenericField lifted = lift_to_LVY(chart, xi);
  GenericField z_lift = lift_to_Z(chart, xi);
  auto relations = rho_relations(chart, B, lambda);
  for (int idx = 0; idx < chart.z.dim(); ++idx) {
    const CoordName& c = chart.z.at(idx);
    auto it = relations.find(c);
    Expr relation = (it != relations.end()) ? it->second : Expr(c);
    Expr pushed = lifted.apply(relation);
    Expr target = z_lift.comp(idx).substitute(relations);
    if (!(pushed == target)) return false;
  }
  return true;
}

std::map<std::vector<int>, Expr> v_map(const Chart& chart, const Mat<Rational>& B,
                                       const Rational& lambda) {
  if (B.rows() != chart.n || B.cols() != chart.k)
    throw std::invalid_argument("associated coordinate B has wrong shape");
  const int n = chart.n;
  Rational nfact(1);
  for (int i = 2; i <= n; ++i) nfact *= i;

  std::map<std::vector<int>, Expr> out;
  // pure base slots
  std::vector<int> base;
  for (int i = 0; i < n; ++i) base.push_back(i);
  if (lambda != 0) out[base] = Expr(lambda / nfact);

  // one fiber slot: drop base direction j, append fiber direction a
  for (int j = 1; j <= n; ++j)
    for (int a = 1; a <= chart.k; ++a) {
      if (B.at(j - 1, a - 1) == 0) continue;
      std::vector<int> key;
      for (int i = 0; i < n; ++i)
        if (i != j - 1) key.push_back(i);
      key.push_back(n + a - 1);
      // parity of moving the fiber slot from the front past n-1 base slots,
      // times the parity of restoring j to the front of the remaining bases
      int sign = ((n - 1) % 2 == 0 ? 1 : -1) * ((j - 1) % 2 == 0 ? 1 : -1);
      out[key] = Expr(B.at(j - 1, a - 1) * sign / nfact);
    }
  return out;
}

bool pairing_check_canonical(const Chart& chart, const Mat<Rational>& B,
                             const Rational& lambda) {
  Form lhs = vv_pair(vv_power(soldering_form(chart), chart.n), v_map(chart, B, lambda));
  Form rhs = pullback(chart.lvy, rho_relations(chart, B, lambda), theta_Z(chart));
  return lhs == rhs;
}

bool pullback_check_momentum(const Chart& chart, const VectorFieldY& xi,
                             const Mat<Rational>& B, const Rational& lambda) {
  Form lhs = pullback(chart.lvy, rho_relations(chart, B, lambda),
                      momentum_observable_Z(chart, xi));
  VVForm wedge_rep = vv_wedge(momentum_observable_LVY(chart, xi),
                              vv_power(soldering_form(chart), chart.n - 1));
  auto dual = v_map(chart, B, lambda);
  for (auto& [key, c] : dual) c = c * Expr(long(chart.n));
  Form rhs = vv_pair(wedge_rep, dual);
  return lhs == rhs;
}

bool bracket_wedge_rep_check(const Chart& chart, const VectorFieldY& xi,
                             const VectorFieldY& zeta, int m) {
  if (m < 0 || m > chart.n) throw std::invalid_argument("wedge power out of range");
  VVForm theta = soldering_form(chart);
  GenericField xl = lift_to_LVY(chart, xi);
  GenericField zl = lift_to_LVY(chart, zeta);

  VVForm lhs = -vv_interior_product(
      xl, vv_interior_product(zl, vv_wedge(soldering_structure(chart), vv_power(theta, m))));

  VVForm rhs = vv_wedge(poisson_LVY(chart, xi, zeta), vv_power(theta, m));
  if (m >= 1) {
    VVForm pair = vv_wedge(momentum_observable_LVY(chart, xi),
                           momentum_observable_LVY(chart, zeta));
    VVForm inner = vv_wedge(pair, vv_power(theta, m - 1));
    rhs = rhs + vv_exterior_derivative(inner).scaled(Expr(long(m)));
  }
  return lhs == rhs;
}

bool linear_lift_invariance_check(const Chart& chart, const Mat<Rational>& M,
                                  const Mat<Rational>& V, const Mat<Rational>& S) {
  if (M.rows() != chart.n || M.cols() != chart.n || V.rows() != chart.k ||
      V.cols() != chart.k || S.rows() != chart.k || S.cols() != chart.n)
    throw std::invalid_argument("automorphism block shape mismatch");
  require_invertible(M, "automorphism base block");
  require_invertible(V, "automorphism fiber block");

  Mat<Rational> minv = M.inverse();
  Mat<Rational> vinv = V.inverse();
  Mat<Expr> nn = frame_nn_expr(chart) * to_expr(minv);
  Mat<Expr> kk = frame_kk_expr(chart) * to_expr(vinv);
  Mat<Expr> kn = frame_kn_expr(chart) * to_expr(minv) - kk * to_expr(S * minv);

  std::map<CoordName, Expr> map;
  for (int i = 1; i <= chart.n; ++i) {
    Expr comp;
    for (int j = 1; j <= chart.n; ++j)
      comp += Expr(M.at(i - 1, j - 1)) * Expr(CoordName::base_x(j));
    map[CoordName::base_x(i)] = comp;
  }
  for (int a = 1; a <= chart.k; ++a) {
    Expr comp;
    for (int b = 1; b <= chart.k; ++b)
      comp += Expr(V.at(a - 1, b - 1)) * Expr(CoordName::fiber_y(b));
    for (int j = 1; j <= chart.n; ++j)
      comp += Expr(S.at(a - 1, j - 1)) * Expr(CoordName::base_x(j));
    map[CoordName::fiber_y(a)] = comp;
  }
  for (int i = 1; i <= chart.n; ++i)
    for (int j = 1; j <= chart.n; ++j)
      map[CoordName::frame_nn(i, j)] = nn.at(i - 1, j - 1);
  for (int a = 1; a <= chart.k; ++a)
    for (int b = 1; b <= chart.k; ++b)
      map[CoordName::frame_kk(a, b)] = kk.at(a - 1, b - 1);
  for (int a = 1; a <= chart.k; ++a)
    for (int i = 1; i <= chart.n; ++i)
      map[CoordName::frame_kn(a, i)] = kn.at(a - 1, i - 1);

  VVForm theta = soldering_form(chart);
  for (int mu = 0; mu < chart.n + chart.k; ++mu) {
    Form component = theta.value_component({mu});
    if (!(pullback(chart.lvy, map, component) == component)) return false;
  }
  return true;
}

}  // namespace vertframe
