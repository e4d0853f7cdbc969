#pragma once

#include <random>

#include "vertframe/numeric.hpp"
#include "vertframe/vframe.hpp"

namespace vertframe {

// Projectable symmetric degree-2 contravariant tensor on Y, stored blockwise:
// the base block depends on x only, the mixed and fiber blocks on x and y.
class ST2Observable {
 public:
  ST2Observable(int n, int k, Mat<Expr> base_block, Mat<Expr> mixed_block,
                Mat<Expr> fiber_block);

  int n() const { return n_; }
  int k() const { return k_; }
  const Mat<Expr>& base_block() const { return base_; }    // g^ij(x)
  const Mat<Expr>& mixed_block() const { return mixed_; }  // g^iA(x,y)
  const Mat<Expr>& fiber_block() const { return fiber_; }  // g^AB(x,y)

  // Assembled symmetric (n+k) x (n+k) component matrix over Y coordinates.
  Mat<Expr> full_matrix() const;

 private:
  int n_, k_;
  Mat<Expr> base_, mixed_, fiber_;
};

// Kaluza-Klein metric data: constant nondegenerate blocks on base and fiber
// plus connection components gamma^A_i(x,y), with the convention that the
// vertical projection of v is (v^A - v^i gamma^A_i) d/dy^A.
struct KKMetric {
  Mat<Rational> eta;   // n x n
  Mat<Rational> iota;  // k x k
  Mat<Expr> gamma;     // k x n

  KKMetric(Mat<Rational> eta, Mat<Rational> iota, Mat<Expr> gamma);

  int n() const { return eta.rows(); }
  int k() const { return iota.rows(); }

  // Covariant components over Y coordinates:
  // [[eta + gamma^T iota gamma, -gamma^T iota], [-iota gamma, iota]].
  Mat<Expr> metric_matrix() const;
  // Closed-form inverse:
  // [[eta^-1, eta^-1 gamma^T], [gamma eta^-1, iota^-1 + gamma eta^-1 gamma^T]].
  Mat<Expr> inverse_metric_matrix() const;
};

// Degree-2 observable of a metric: the contravariant (inverse) components.
ST2Observable st2_from_metric(const KKMetric& g);

// Frame-contracted components g-hat^(mu nu) over the frame bundle: the
// coframe matrix applied to both slots of the contravariant tensor.
Mat<Expr> st2_hat_matrix(const Chart& chart, const ST2Observable& g);

// One Hamiltonian vector field per value slot, solving
// d(g-hat^(mu nu)) = -(X^mu into dtheta^nu + X^nu into dtheta^mu).
struct HamiltonianFamily {
  std::vector<GenericField> rep;
};

// Diagonal representative: base/fiber transport components from the tensor,
// frame components from the symmetrized derivative split. Throws
// "not solvable in ansatz" when a derivative has no frame slot to absorb it.
HamiltonianFamily hamiltonian_family_solve(const Chart& chart, const ST2Observable& g);

// Residual 1-form of the defining equation for one value pair; the family
// solves the equation iff every residual vanishes.
Form structure_residual(const Chart& chart, const ST2Observable& g,
                        const std::vector<GenericField>& fields, int mu, int nu);
bool structure_equation_holds(const Chart& chart, const ST2Observable& g,
                              const std::vector<GenericField>& fields);

// Two families represent the same observable iff their difference is purely
// vertical and drops out of the symmetrized contraction.
bool vertical_ambiguity_check(const Chart& chart, const std::vector<GenericField>& a,
                              const std::vector<GenericField>& b);
// Random admissible difference: antisymmetric frame-direction components over
// slots present in both paired coframe rows.
std::vector<GenericField> random_vertical_ambiguity(std::mt19937_64& rng, const Chart& chart);

// Levi-Civita Christoffel symbols of the metric over Y coordinates,
// indexed [upper](lower, lower).
std::vector<Mat<Expr>> christoffel_symbols(const Chart& chart, const KKMetric& g);

// The unique representative with vanishing pairwise contractions
// X^mu into X^nu into dtheta: transport plus Christoffel frame terms. Throws
// when a frame term would leave the vertically adapted chart.
std::vector<GenericField> no_torsion_select(const Chart& chart, const HamiltonianFamily& family,
                                            const KKMetric& g);
bool no_torsion_residual_zero(const Chart& chart, const std::vector<GenericField>& fields);

// Full Lie derivative of the covariant metric along the generator on Y;
// zero exactly when the field is Killing.
Mat<Expr> killing_residual(const Chart& chart, const VectorFieldY& xi, const KKMetric& g);

// Invariance of the frame-contracted observable under the lifted field.
bool invariance_check(const Chart& chart, const ST2Observable& g, const VectorFieldY& xi);

// Basis of linear generators whose base matrix is eta-antisymmetric and whose
// fiber matrix is iota-antisymmetric.
std::vector<VectorFieldY> orthogonal_generators(const Mat<Rational>& eta,
                                                const Mat<Rational>& iota);

// Mixed brackets of a degree-1 and a degree-2 observable. The first form
// differentiates g-hat along the lift of xi; the second symmetrizes the
// family applied to the momentum components. They are mutual negatives.
Mat<Expr> poisson_T1_ST2(const Chart& chart, const VectorFieldY& xi, const ST2Observable& g);
Mat<Expr> poisson_ST2_T1(const Chart& chart, const ST2Observable& g,
                         const std::vector<GenericField>& rep, const VectorFieldY& xi);

// Per-slot conservation probe: integrate the flow of each family member and
// track the matching momentum component.
struct ConservedQuantityReport {
  bool invariant = false;             // mixed bracket vanished symbolically
  std::vector<double> max_drift;      // one entry per value slot
  std::vector<std::vector<double>> drift_series;  // per slot, per step
};

ConservedQuantityReport conserved_quantity_check(const Chart& chart, const VectorFieldY& xi,
                                                 const ST2Observable& g, const FramePoint& w0,
                                                 double t_max, double dt);

// Frame point flattened to chart.lvy coordinate order for integration.
std::vector<double> frame_state(const Chart& chart, const FramePoint& w);

}  // namespace vertframe
