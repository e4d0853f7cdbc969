#pragma once

#include "vertframe/forms.hpp"
#include "vertframe/geobundle.hpp"

namespace vertframe {

// Point of the extended momentum phase space, ordered like chart.z
// (x^1..x^n, y^1..y^k, p^i_A row-major, p).
struct ZPoint {
  int n = 0, k = 0;
  std::vector<Rational> coords;

  ZPoint(int n, int k);
  ZPoint(int n, int k, std::vector<Rational> coords);

  Rational& x(int i);
  Rational& y(int a);
  Rational& p(int i, int a);
  Rational& p_scalar();
  const Rational& x(int i) const;
  const Rational& y(int a) const;
  const Rational& p(int i, int a) const;
  const Rational& p_scalar() const;

  std::map<CoordName, Rational> as_map() const;
  friend bool operator==(const ZPoint&, const ZPoint&) = default;
};

// Oriented base volume dx^1 ^ ... ^ dx^n and its coordinate contractions, over
// any system that contains the base coordinates.
Form volume_form_x(const CoordSystem& sys, int n);
Form dx_contracted(const CoordSystem& sys, int n, int i);         // d/dx^i into d^n x
Form dx_contracted2(const CoordSystem& sys, int n, int i, int j);  // d/dx^i first, then d/dx^j

// Canonical n-form on Z: p^i_A dy^A ^ (d/dx^i into d^n x) + p d^n x.
// flip_sign negates the p d^n x term; it exists only so self-checks can
// demonstrate that a wrong canonical form is caught.
Form theta_Z(const Chart& chart, bool flip_sign = false);

// Lift of a projectable field on Y to Z, including the momentum components.
GenericField lift_to_Z(const Chart& chart, const VectorFieldY& xi);

// (n-1)-form observable: lift contracted into the canonical form.
Form momentum_observable_Z(const Chart& chart, const VectorFieldY& xi);

// Bracket of two momentum observables: minus the double contraction of the
// lifts into d(theta).
Form poisson_Z(const Chart& chart, const VectorFieldY& xi, const VectorFieldY& zeta);

// poisson_Z(xi,zeta) - observable([xi,zeta]); always an exact form.
Form bracket_defect_Z(const Chart& chart, const VectorFieldY& xi, const VectorFieldY& zeta);

// The matching exact form -d(lift(xi) into lift(zeta) into theta).
Form bracket_exact_term_Z(const Chart& chart, const VectorFieldY& xi,
                          const VectorFieldY& zeta);

// d(theta) has trivial kernel on coordinate fields at the given point.
bool theta_nondegenerate_at(const Chart& chart, const ZPoint& pt);

}  // namespace vertframe
