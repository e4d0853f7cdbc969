#pragma once

#include <vector>

#include "vertframe/coord.hpp"
#include "vertframe/expr.hpp"

namespace vertframe {

// Vector field on the configuration bundle Y in adapted coordinates:
// xi = comp_x[i] d/dx^(i+1) + comp_y[a] d/dy^(a+1). Components may depend on
// base and fiber coordinates and free parameters only.
class VectorFieldY {
 public:
  VectorFieldY(int n, int k);  // zero field
  VectorFieldY(int n, int k, std::vector<Expr> comp_x, std::vector<Expr> comp_y);

  int n() const { return n_; }
  int k() const { return k_; }
  const Expr& x_comp(int i) const { return comp_x_.at(size_t(i - 1)); }  // 1-based
  const Expr& y_comp(int a) const { return comp_y_.at(size_t(a - 1)); }
  void set_x_comp(int i, Expr e);
  void set_y_comp(int a, Expr e);

  bool is_zero() const;
  friend bool operator==(const VectorFieldY& v, const VectorFieldY& w);

  // Apply as a derivation to a scalar expression.
  Expr apply(const Expr& f) const;

  std::string str() const;

 private:
  void validate() const;

  int n_, k_;
  std::vector<Expr> comp_x_, comp_y_;
};

// Standard coordinate bracket [v,w]^mu = v^nu d_nu w^mu - w^nu d_nu v^mu.
VectorFieldY lie_bracket(const VectorFieldY& v, const VectorFieldY& w);

// True iff every base component is independent of the fiber coordinates.
bool is_projectable(const VectorFieldY& v);

// The field on X covered by a projectable v (fiber components dropped).
VectorFieldY base_pushforward(const VectorFieldY& v);

// Fiber-preserving diffeomorphism test for a map of Y given componentwise:
// true iff the pushforward of every vertical direction stays vertical.
// Requires an invertible Jacobian at some sampled rational point.
bool verticality_preservation_check(const Chart& chart, const std::vector<Expr>& map_x,
                                    const std::vector<Expr>& map_y);

// Integrates the flow of v on Y and of its base pushforward on X from pt and
// returns the max over steps of the base-projection mismatch.
double flow_commute_check(const VectorFieldY& v, const std::vector<double>& pt, double t_max,
                          double dt);

// Convenience builders.
VectorFieldY coordinate_field_x(int n, int k, int i);  // d/dx^i
VectorFieldY coordinate_field_y(int n, int k, int a);  // d/dy^a

// Random polynomial vector field of total degree <= max_degree with small
// rational coefficients; projectable by construction when projectable=true.
VectorFieldY random_polynomial_field(std::mt19937_64& rng, int n, int k, int max_degree,
                                     bool projectable);

}  // namespace vertframe
