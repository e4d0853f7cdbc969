#pragma once

#include "vertframe/forms.hpp"
#include "vertframe/geobundle.hpp"
#include "vertframe/matrix.hpp"
#include "vertframe/multiphase.hpp"

namespace vertframe {

// Point of the vertically adapted frame bundle in coframe coordinates:
// pi_nn[i][j] = e^i(d/dx^j), pi_kk[A][B] = eps^A(d/dy^B),
// pi_kn[A][j] = eps^A(d/dx^j). Both square blocks must be invertible.
struct FramePoint {
  int n = 0, k = 0;
  std::vector<Rational> x, y;
  Mat<Rational> pi_nn, pi_kk, pi_kn;

  FramePoint(int n, int k);  // identity coframe at the origin
  FramePoint(int n, int k, std::vector<Rational> x, std::vector<Rational> y,
             Mat<Rational> pi_nn, Mat<Rational> pi_kk, Mat<Rational> pi_kn);

  std::map<CoordName, Rational> as_map() const;
  friend bool operator==(const FramePoint&, const FramePoint&) = default;
};

// Element (N, K, A) of the adapted linear group, block lower-triangular as
// [[N, 0], [A, K]] on R^(n+k).
struct GAElement {
  Mat<Rational> N, K, A;

  GAElement(Mat<Rational> N, Mat<Rational> K, Mat<Rational> A);
  static GAElement identity(int n, int k);

  GAElement operator*(const GAElement& other) const;
  GAElement inverse() const;
  Mat<Rational> block_matrix() const;
  bool is_identity() const;
  friend bool operator==(const GAElement&, const GAElement&) = default;
};

// Observable of tensorial type: base components depend on x only.
struct T1Observable {
  VectorFieldY field;
  explicit T1Observable(VectorFieldY f);
};

// Vertically adapted soldering form: pi^i_j dx^j r_i + (pi^A_i dx^i +
// pi^A_B dy^B) s_A, and its exterior derivative.
VVForm soldering_form(const Chart& chart);
VVForm soldering_structure(const Chart& chart);  // d of the above

// Right action on coframes; throws on singular blocks.
FramePoint ga_act_frame(const FramePoint& w, const GAElement& g);

// Momentum observable as an R^(n+k)-valued function (form degree 0):
// xi^i pi^j_i on r_j and xi^A pi^B_A + xi^i pi^B_i on s_B.
VVForm momentum_observable_LVY(const Chart& chart, const VectorFieldY& xi);

// Hamiltonian vector field of a tensorial observable; satisfies
// d(f hat) = -(X into d soldering) exactly.
GenericField hamiltonian_solve_T1(const Chart& chart, const T1Observable& f);

// Lift of a projectable field, defined through its tensorial observable.
GenericField lift_to_LVY(const Chart& chart, const VectorFieldY& xi);

// Componentwise bracket of momentum observables; closes exactly on the
// observable of the field bracket.
VVForm poisson_LVY(const Chart& chart, const VectorFieldY& xi, const VectorFieldY& zeta);

// Equivariance of the momentum observable: value at the translated frame
// equals the inverse block matrix applied to the value at w.
bool tensoriality_check(const Chart& chart, const VectorFieldY& xi, const FramePoint& w,
                        const GAElement& g);

// Left action on the associated pair:
// (N,K,A).(B,l) = det(N^-1) (N B K^-1, l - tr(B K^-1 A)).
std::pair<Mat<Rational>, Rational> ga_act_pair(const GAElement& g, const Mat<Rational>& B,
                                               const Rational& lambda);

// Coordinate relations of the associated-bundle map into Z, symbolic over the
// frame coordinates with (B, lambda) fixed: momenta are polynomial
// (adjugate-based), so no denominators appear.
std::map<CoordName, Expr> rho_relations(const Chart& chart, const Mat<Rational>& B,
                                        const Rational& lambda);

// Pointwise evaluation of the same relations.
ZPoint rho_hat(const FramePoint& w, const Mat<Rational>& B, const Rational& lambda);

// Pushforward intertwining: the image of the frame-bundle lift under the
// associated map equals the Z lift, checked symbolically.
bool phi_pushforward_check(const Chart& chart, const VectorFieldY& xi, const Mat<Rational>& B,
                           const Rational& lambda);

// Dual pairing element representing (B, lambda) against value n-vectors.
std::map<std::vector<int>, Expr> v_map(const Chart& chart, const Mat<Rational>& B,
                                       const Rational& lambda);

// Pairing <wedge^n soldering, V(B,l)> equals the pullback of the canonical
// n-form through the associated map.
bool pairing_check_canonical(const Chart& chart, const Mat<Rational>& B,
                             const Rational& lambda);

// Pullback of the Z momentum observable equals
// <J(xi) wedge (soldering)^(n-1), n V(B,l)>.
bool pullback_check_momentum(const Chart& chart, const VectorFieldY& xi,
                             const Mat<Rational>& B, const Rational& lambda);

// Wedge-power representation of the bracket:
// -xi (zeta (dtheta wedge theta^m)) = poisson wedge theta^m
//   + m d(J(xi) wedge J(zeta) wedge theta^(m-1)).
bool bracket_wedge_rep_check(const Chart& chart, const VectorFieldY& xi,
                             const VectorFieldY& zeta, int m);

// Soldering-form invariance under the lifted fiber-preserving linear map
// x' = M x, y' = V y + S x.
bool linear_lift_invariance_check(const Chart& chart, const Mat<Rational>& M,
                                  const Mat<Rational>& V, const Mat<Rational>& S);

// Frame coordinate blocks as symbolic matrices.
Mat<Expr> frame_nn_expr(const Chart& chart);
Mat<Expr> frame_kk_expr(const Chart& chart);
Mat<Expr> frame_kn_expr(const Chart& chart);

}  // namespace vertframe
