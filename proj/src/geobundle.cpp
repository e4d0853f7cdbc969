#include "vertframe/geobundle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "vertframe/matrix.hpp"
#include "vertframe/numeric.hpp"

namespace vertframe {

namespace {

void require_same_chart(const VectorFieldY& v, const VectorFieldY& w) {
  if (v.n() != w.n() || v.k() != w.k())
    throw std::invalid_argument("vector fields live on different charts");
}

bool allowed_variable(const CoordName& c, int n, int k) {
  switch (c.kind) {
    case CoordKind::BaseX:
      return c.i <= n;
    case CoordKind::FiberY:
      return c.i <= k;
    case CoordKind::Param:
      return true;
    default:
      return false;
  }
}

}  // namespace

VectorFieldY::VectorFieldY(int n, int k)
    : n_(n), k_(k), comp_x_(size_t(n)), comp_y_(size_t(k)) {
  validate();
}

VectorFieldY::VectorFieldY(int n, int k, std::vector<Expr> comp_x, std::vector<Expr> comp_y)
    : n_(n), k_(k), comp_x_(std::move(comp_x)), comp_y_(std::move(comp_y)) {
  validate();
}

void VectorFieldY::validate() const {
  if (n_ < 1 || k_ < 1) throw std::invalid_argument("chart dimensions must be >= 1");
  if (comp_x_.size() != size_t(n_) || comp_y_.size() != size_t(k_))
    throw std::invalid_argument("component count does not match chart");
  for (const std::vector<Expr>* group : {&comp_x_, &comp_y_})
    for (const Expr& e : *group)
      for (const CoordName& c : e.variables())
        if (!allowed_variable(c, n_, k_))
          throw std::invalid_argument("component depends on non-bundle coordinate " + c.str());
}

void VectorFieldY::set_x_comp(int i, Expr e) {
  comp_x_.at(size_t(i - 1)) = std::move(e);
  validate();
}

void VectorFieldY::set_y_comp(int a, Expr e) {
  comp_y_.at(size_t(a - 1)) = std::move(e);
  validate();
}

bool VectorFieldY::is_zero() const {
  auto zero = [](const Expr& e) { return e.is_zero(); };
  return std::all_of(comp_x_.begin(), comp_x_.end(), zero) &&
         std::all_of(comp_y_.begin(), comp_y_.end(), zero);
}

bool operator==(const VectorFieldY& v, const VectorFieldY& w) {
  return v.n_ == w.n_ && v.k_ == w.k_ && v.comp_x_ == w.comp_x_ && v.comp_y_ == w.comp_y_;
}

Expr VectorFieldY::apply(const Expr& f) const {
  Expr out;
  for (int i = 1; i <= n_; ++i) out += x_comp(i) * f.derivative(CoordName::base_x(i));
  for (int a = 1; a <= k_; ++a) out += y_comp(a) * f.derivative(CoordName::fiber_y(a));
  return out;
}

std::string VectorFieldY::str() const {
  std::string out;
  auto append = [&out](const Expr& e, const std::string& dir) {
    if (e.is_zero()) return;
    if (!out.empty()) out += " + ";
    out += "(" + e.str() + ")*d/d" + dir;
  };
  for (int i = 1; i <= n_; ++i) append(x_comp(i), CoordName::base_x(i).str());
  for (int a = 1; a <= k_; ++a) append(y_comp(a), CoordName::fiber_y(a).str());
  return out.empty() ? "0" : out;
}

VectorFieldY lie_bracket(const VectorFieldY& v, const VectorFieldY& w) {
  require_same_chart(v, w);
  VectorFieldY out(v.n(), v.k());
  for (int i = 1; i <= v.n(); ++i)
    out.set_x_comp(i, v.apply(w.x_comp(i)) - w.apply(v.x_comp(i)));
  for (int a = 1; a <= v.k(); ++a)
    out.set_y_comp(a, v.apply(w.y_comp(a)) - w.apply(v.y_comp(a)));
  return out;
}

bool is_projectable(const VectorFieldY& v) {
  for (int i = 1; i <= v.n(); ++i)
    for (int a = 1; a <= v.k(); ++a)
      if (!v.x_comp(i).derivative(CoordName::fiber_y(a)).is_zero()) return false;
  return true;
}

VectorFieldY base_pushforward(const VectorFieldY& v) {
  if (!is_projectable(v)) throw std::invalid_argument("vector field is not projectable");
  VectorFieldY out(v.n(), v.k());
  for (int i = 1; i <= v.n(); ++i) out.set_x_comp(i, v.x_comp(i));
  return out;
}

bool verticality_preservation_check(const Chart& chart, const std::vector<Expr>& map_x,
                                    const std::vector<Expr>& map_y) {
  if (map_x.size() != size_t(chart.n) || map_y.size() != size_t(chart.k))
    throw std::invalid_argument("map component count does not match chart");

  // Jacobian of the full map in block order (x rows, y rows).
  int dim = chart.n + chart.k;
  Mat<Expr> jac(dim, dim);
  for (int r = 0; r < dim; ++r) {
    const Expr& comp = r < chart.n ? map_x[size_t(r)] : map_y[size_t(r - chart.n)];
    for (int c = 0; c < dim; ++c) jac.at(r, c) = comp.derivative(chart.base.at(c));
  }

  Expr det = jac.det();
  if (det.is_zero()) throw std::domain_error("map has identically singular Jacobian");
  if (!det.is_constant()) {
    std::mt19937_64 rng(1234u);
    bool regular_somewhere = false;
    for (int attempt = 0; attempt < 64 && !regular_somewhere; ++attempt) {
      std::map<CoordName, Rational> pt;
      for (int c = 0; c < dim; ++c) pt[chart.base.at(c)] = random_small_rational(rng, 9, 4);
      try {
        regular_somewhere = det.evaluate(pt) != 0;
      } catch (const std::domain_error&) {
      }
    }
    if (!regular_somewhere)
      throw std::domain_error("map Jacobian is singular at all sampled points");
  }

  // d(eta^i)/dy^A == 0 means vertical directions push forward to vertical ones.
  for (int i = 0; i < chart.n; ++i)
    for (int a = 1; a <= chart.k; ++a)
      if (!map_x[size_t(i)].derivative(CoordName::fiber_y(a)).is_zero()) return false;
  return true;
}

double flow_commute_check(const VectorFieldY& v, const std::vector<double>& pt, double t_max,
                          double dt) {
  if (!is_projectable(v)) throw std::invalid_argument("vector field is not projectable");
  Chart chart = make_chart(v.n(), v.k());
  if (pt.size() != size_t(chart.base.dim()))
    throw std::invalid_argument("point dimension does not match chart");

  std::vector<Expr> full;
  for (int i = 1; i <= v.n(); ++i) full.push_back(v.x_comp(i));
  for (int a = 1; a <= v.k(); ++a) full.push_back(v.y_comp(a));
  CompiledField field_y(full, chart.base);

  // Base system reuses the x components over the x coordinates only.
  CoordSystem base_only;
  for (int i = 1; i <= v.n(); ++i) base_only.coords.push_back(CoordName::base_x(i));
  std::vector<Expr> base_comps;
  for (int i = 1; i <= v.n(); ++i) base_comps.push_back(v.x_comp(i));
  CompiledField field_x(base_comps, base_only);

  int steps = static_cast<int>(std::llround(t_max / dt));
  std::vector<std::vector<double>> projected;
  integrate_rk4(field_y, pt, 0.0, dt, steps,
                [&projected, n = v.n()](int, double, const std::vector<double>& s) {
                  projected.emplace_back(s.begin(), s.begin() + n);
                });

  double defect = 0.0;
  std::vector<double> base_pt(pt.begin(), pt.begin() + v.n());
  integrate_rk4(field_x, base_pt, 0.0, dt, steps,
                [&projected, &defect](int step, double, const std::vector<double>& s) {
                  const auto& proj = projected.at(size_t(step));
                  for (size_t i = 0; i < s.size(); ++i)
                    defect = std::max(defect, std::abs(s[i] - proj[i]));
                });
  return defect;
}

VectorFieldY coordinate_field_x(int n, int k, int i) {
  VectorFieldY out(n, k);
  out.set_x_comp(i, Expr(1));
  return out;
}

VectorFieldY coordinate_field_y(int n, int k, int a) {
  VectorFieldY out(n, k);
  out.set_y_comp(a, Expr(1));
  return out;
}

VectorFieldY random_polynomial_field(std::mt19937_64& rng, int n, int k, int max_degree,
                                     bool projectable) {
  Chart chart = make_chart(n, k);
  std::uniform_int_distribution<int> coin(0, 2);

  auto random_poly = [&](bool base_only) {
    Poly p;
    // sparse: a handful of random monomials of degree <= max_degree
    std::uniform_int_distribution<int> deg(0, max_degree);
    std::uniform_int_distribution<int> nterms(1, 3);
    int terms = nterms(rng);
    for (int t = 0; t < terms; ++t) {
      Monomial m;
      int d = deg(rng);
      for (int step = 0; step < d; ++step) {
        int limit = base_only ? n : n + k;
        std::uniform_int_distribution<int> pick(0, limit - 1);
        m = m.times(Monomial::variable(chart.base.at(pick(rng))));
      }
      p.add_term(m, random_small_rational(rng, 3, 2));
    }
    return Expr::from_poly(p);
  };

  VectorFieldY out(n, k);
  for (int i = 1; i <= n; ++i)
    if (coin(rng) > 0) out.set_x_comp(i, random_poly(projectable));
  for (int a = 1; a <= k; ++a)
    if (coin(rng) > 0) out.set_y_comp(a, random_poly(false));
  return out;
}

}  // namespace vertframe
