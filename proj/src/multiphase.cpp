#include "vertframe/multiphase.hpp"

#include <stdexcept>

#include "vertframe/matrix.hpp"

namespace vertframe {

namespace {

GenericField coordinate_field(const CoordSystem& sys, const CoordName& c) {
  GenericField out(sys);
  out.set_comp(c, Expr(1));
  return out;
}

}  // namespace

ZPoint::ZPoint(int n, int k) : n(n), k(k), coords(size_t(n + k + n * k + 1)) {
  if (n < 1 || k < 1) throw std::invalid_argument("chart dimensions must be >= 1");
}

ZPoint::ZPoint(int n, int k, std::vector<Rational> values) : ZPoint(n, k) {
  if (values.size() != coords.size())
    throw std::invalid_argument("coordinate count does not match chart");
  coords = std::move(values);
}

Rational& ZPoint::x(int i) { return coords.at(size_t(i - 1)); }
Rational& ZPoint::y(int a) { return coords.at(size_t(n + a - 1)); }
Rational& ZPoint::p(int i, int a) {
  return coords.at(size_t(n + k + (i - 1) * k + (a - 1)));
}
Rational& ZPoint::p_scalar() { return coords.back(); }
const Rational& ZPoint::x(int i) const { return const_cast<ZPoint*>(this)->x(i); }
const Rational& ZPoint::y(int a) const { return const_cast<ZPoint*>(this)->y(a); }
const Rational& ZPoint::p(int i, int a) const { return const_cast<ZPoint*>(this)->p(i, a); }
const Rational& ZPoint::p_scalar() const { return const_cast<ZPoint*>(this)->p_scalar(); }

std::map<CoordName, Rational> ZPoint::as_map() const {
  Chart chart = make_chart(n, k);
  std::map<CoordName, Rational> out;
  for (int idx = 0; idx < chart.z.dim(); ++idx) out[chart.z.at(idx)] = coords[size_t(idx)];
  return out;
}

Form volume_form_x(const CoordSystem& sys, int n) {
  Form dnx = Form::function(sys, Expr(1));
  for (int i = 1; i <= n; ++i) dnx = wedge(dnx, Form::differential(sys, CoordName::base_x(i)));
  return dnx;
}

Form dx_contracted(const CoordSystem& sys, int n, int i) {
  return interior_product(coordinate_field(sys, CoordName::base_x(i)), volume_form_x(sys, n));
}

Form dx_contracted2(const CoordSystem& sys, int n, int i, int j) {
  return interior_product(coordinate_field(sys, CoordName::base_x(j)),
                          interior_product(coordinate_field(sys, CoordName::base_x(i)),
                                           volume_form_x(sys, n)));
}

Form theta_Z(const Chart& chart, bool flip_sign) {
  const CoordSystem& sys = chart.z;
  Form theta(sys, chart.n);
  for (int i = 1; i <= chart.n; ++i)
    for (int a = 1; a <= chart.k; ++a) {
      Form dy = Form::differential(sys, CoordName::fiber_y(a));
      Form piece = wedge(dy, dx_contracted(sys, chart.n, i));
      theta = theta + piece.scaled(Expr(CoordName::mom_p(i, a)));
    }
  Expr p(CoordName::mom_scalar());
  theta = theta + volume_form_x(sys, chart.n).scaled(flip_sign ? -p : p);
  return theta;
}

GenericField lift_to_Z(const Chart& chart, const VectorFieldY& xi) {
  if (xi.n() != chart.n || xi.k() != chart.k)
    throw std::invalid_argument("vector field chart mismatch");
  if (!is_projectable(xi)) throw std::invalid_argument("vector field is not projectable");

  GenericField out(chart.z);
  for (int i = 1; i <= chart.n; ++i) out.set_comp(CoordName::base_x(i), xi.x_comp(i));
  for (int a = 1; a <= chart.k; ++a) out.set_comp(CoordName::fiber_y(a), xi.y_comp(a));

  // divergence of the base part
  Expr div;
  for (int j = 1; j <= chart.n; ++j)
    div += xi.x_comp(j).derivative(CoordName::base_x(j));

  for (int i = 1; i <= chart.n; ++i)
    for (int a = 1; a <= chart.k; ++a) {
      Expr comp;
      for (int j = 1; j <= chart.n; ++j)
        comp += Expr(CoordName::mom_p(j, a)) * xi.x_comp(i).derivative(CoordName::base_x(j));
      comp -= Expr(CoordName::mom_p(i, a)) * div;
      for (int b = 1; b <= chart.k; ++b)
        comp -= Expr(CoordName::mom_p(i, b)) * xi.y_comp(b).derivative(CoordName::fiber_y(a));
      out.set_comp(CoordName::mom_p(i, a), comp);
    }

  Expr pcomp = Expr(CoordName::mom_scalar()) * div;
  for (int i = 1; i <= chart.n; ++i)
    for (int a = 1; a <= chart.k; ++a)
      pcomp += Expr(CoordName::mom_p(i, a)) * xi.y_comp(a).derivative(CoordName::base_x(i));
  out.set_comp(CoordName::mom_scalar(), -pcomp);
  return out;
}

Form momentum_observable_Z(const Chart& chart, const VectorFieldY& xi) {
  return interior_product(lift_to_Z(chart, xi), theta_Z(chart));
}

Form poisson_Z(const Chart& chart, const VectorFieldY& xi, const VectorFieldY& zeta) {
  Form dtheta = exterior_derivative(theta_Z(chart));
  return -interior_product(lift_to_Z(chart, xi),
                           interior_product(lift_to_Z(chart, zeta), dtheta));
}

Form bracket_defect_Z(const Chart& chart, const VectorFieldY& xi, const VectorFieldY& zeta) {
  return poisson_Z(chart, xi, zeta) - momentum_observable_Z(chart, lie_bracket(xi, zeta));
}

Form bracket_exact_term_Z(const Chart& chart, const VectorFieldY& xi,
                          const VectorFieldY& zeta) {
  if (chart.n < 2) {
    // the double contraction of an n-form vanishes identically for n = 1
    return Form(chart.z, chart.n - 1);
  }
  Form inner = interior_product(lift_to_Z(chart, xi),
                                interior_product(lift_to_Z(chart, zeta), theta_Z(chart)));
  return -exterior_derivative(inner);
}

bool theta_nondegenerate_at(const Chart& chart, const ZPoint& pt) {
  Form dtheta = exterior_derivative(theta_Z(chart));
  auto point = pt.as_map();

  // Row per coordinate direction: the contracted n-form evaluated at pt,
  // with one column per increasing n-tuple present anywhere.
  std::vector<std::map<std::vector<int>, Rational>> rows;
  std::map<std::vector<int>, int> columns;
  for (int idx = 0; idx < chart.z.dim(); ++idx) {
    Form contracted = interior_product(coordinate_field(chart.z, chart.z.at(idx)), dtheta);
    std::map<std::vector<int>, Rational> row;
    for (const auto& [key, coeff] : contracted.terms()) {
      Rational v = coeff.evaluate(point);
      if (v == 0) continue;
      row[key] = v;
      columns.emplace(key, 0);
    }
    rows.push_back(std::move(row));
  }
  int col = 0;
  for (auto& [key, id] : columns) id = col++;

  Mat<Rational> m(chart.z.dim(), col);
  for (int r = 0; r < chart.z.dim(); ++r)
    for (const auto& [key, v] : rows[size_t(r)]) m.at(r, columns.at(key)) = v;
  return rank_of(m) == chart.z.dim();
}

}  // namespace vertframe
