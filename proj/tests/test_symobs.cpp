#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "vertframe/symobs.hpp"

using namespace vertframe;

namespace {

Expr E(const std::string& s) { return parse_expr(s); }

Mat<Rational> rational_diag(std::vector<Rational> entries) {
  Mat<Rational> m(int(entries.size()), int(entries.size()));
  for (size_t i = 0; i < entries.size(); ++i) m.at(int(i), int(i)) = entries[i];
  return m;
}

KKMetric flat_metric(int n, int k) {
  return KKMetric(Mat<Rational>::identity(n), Mat<Rational>::identity(k), Mat<Expr>(k, n));
}

// time axis with one fiber dimension and connection component x1
KKMetric sheared_metric() {
  Mat<Expr> gamma(1, 1);
  gamma.at(0, 0) = E("x1");
  return KKMetric(Mat<Rational>::identity(1), Mat<Rational>::identity(1), std::move(gamma));
}

bool all_zero(const Mat<Expr>& m) {
  for (int r = 0; r < m.rows(); ++r)
    for (int c = 0; c < m.cols(); ++c)
      if (!m.at(r, c).is_zero()) return false;
  return true;
}

FramePoint random_frame(std::mt19937_64& rng, int n, int k) {
  for (;;) {
    std::vector<Rational> x, y;
    for (int i = 0; i < n; ++i) x.push_back(random_small_rational(rng, 3, 2));
    for (int a = 0; a < k; ++a) y.push_back(random_small_rational(rng, 3, 2));
    Mat<Rational> nn(n, n), kk(k, k), kn(k, n);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) nn.at(r, c) = random_small_rational(rng, 3, 2);
    for (int r = 0; r < k; ++r)
      for (int c = 0; c < k; ++c) kk.at(r, c) = random_small_rational(rng, 3, 2);
    for (int r = 0; r < k; ++r)
      for (int c = 0; c < n; ++c) kn.at(r, c) = random_small_rational(rng, 3, 2);
    if (nn.det() == 0 || kk.det() == 0) continue;
    return FramePoint(n, k, std::move(x), std::move(y), std::move(nn), std::move(kk),
                      std::move(kn));
  }
}

}  // namespace

TEST_CASE("degree-2 observable validation and assembly") {
  Mat<Expr> base = Mat<Expr>::identity(2);
  Mat<Expr> mixed(2, 2);
  Mat<Expr> fiber = Mat<Expr>::identity(2);
  ST2Observable g(2, 2, base, mixed, fiber);
  CHECK(g.full_matrix() == Mat<Expr>::identity(4));

  Mat<Expr> bad_base = base;
  bad_base.at(0, 0) = E("y1");  // base block must project to the base
  CHECK_THROWS_AS(ST2Observable(2, 2, bad_base, mixed, fiber), std::invalid_argument);

  Mat<Expr> asym = fiber;
  asym.at(0, 1) = E("x1");
  CHECK_THROWS_AS(ST2Observable(2, 2, base, mixed, asym), std::invalid_argument);

  Mat<Expr> frame_dep = mixed;
  frame_dep.at(0, 0) = E("pi_1_1");
  CHECK_THROWS_AS(ST2Observable(2, 2, base, frame_dep, fiber), std::invalid_argument);
}

TEST_CASE("metric assembly with and without connection") {
  KKMetric flat = flat_metric(2, 2);
  CHECK(flat.metric_matrix() == Mat<Expr>::identity(4));
  CHECK(flat.inverse_metric_matrix() == Mat<Expr>::identity(4));

  KKMetric shear = sheared_metric();
  Mat<Expr> cov = shear.metric_matrix();
  CHECK(cov.at(0, 0) == E("1 + x1^2"));
  CHECK(cov.at(0, 1) == E("-x1"));
  CHECK(cov.at(1, 0) == E("-x1"));
  CHECK(cov.at(1, 1) == E("1"));
  CHECK(cov * shear.inverse_metric_matrix() == Mat<Expr>::identity(2));

  // Lorentz base with a nontrivial connection still inverts in closed form
  Mat<Expr> gamma(2, 2);
  gamma.at(0, 0) = E("x1*y2");
  gamma.at(1, 1) = E("y1");
  KKMetric lorentz(rational_diag({-1, 1}), Mat<Rational>::identity(2), gamma);
  CHECK(lorentz.metric_matrix() * lorentz.inverse_metric_matrix() == Mat<Expr>::identity(4));

  CHECK_THROWS_AS(KKMetric(Mat<Rational>(2, 2), Mat<Rational>::identity(2), Mat<Expr>(2, 2)),
                  std::domain_error);
  Mat<Rational> asym(2, 2);
  asym.at(0, 1) = 1;
  asym.at(1, 0) = -1;
  asym.at(0, 0) = asym.at(1, 1) = 1;
  CHECK_THROWS_AS(KKMetric(asym, Mat<Rational>::identity(2), Mat<Expr>(2, 2)),
                  std::invalid_argument);
}

TEST_CASE("observable of a metric uses the contravariant components") {
  ST2Observable flat = st2_from_metric(flat_metric(2, 2));
  CHECK(flat.base_block() == Mat<Expr>::identity(2));
  CHECK(flat.mixed_block() == Mat<Expr>(2, 2));
  CHECK(flat.fiber_block() == Mat<Expr>::identity(2));

  ST2Observable lorentz =
      st2_from_metric(KKMetric(rational_diag({-1, 1}), Mat<Rational>::identity(2),
                               Mat<Expr>(2, 2)));
  CHECK(lorentz.base_block().at(0, 0) == E("-1"));
  CHECK(lorentz.base_block().at(1, 1) == E("1"));

  ST2Observable shear = st2_from_metric(sheared_metric());
  CHECK(shear.base_block().at(0, 0) == E("1"));
  CHECK(shear.mixed_block().at(0, 0) == E("x1"));
  CHECK(shear.fiber_block().at(0, 0) == E("1 + x1^2"));
}

TEST_CASE("frame contraction of the observable") {
  Chart c11 = make_chart(1, 1);
  Mat<Expr> ghat = st2_hat_matrix(c11, st2_from_metric(flat_metric(1, 1)));
  CHECK(ghat.at(0, 0) == E("pi_1_1^2"));
  CHECK(ghat.at(0, 1) == E("pi_1_1*piA_1_x1"));
  CHECK(ghat.at(1, 0) == ghat.at(0, 1));
  CHECK(ghat.at(1, 1) == E("piA_1_x1^2 + piA_1_1^2"));
}

TEST_CASE("family solve reproduces the constant-metric transport fields") {
  Chart c22 = make_chart(2, 2);
  HamiltonianFamily fam = hamiltonian_family_solve(c22, st2_from_metric(flat_metric(2, 2)));
  REQUIRE(fam.rep.size() == 4);

  for (int i = 1; i <= 2; ++i) {
    const GenericField& f = fam.rep[size_t(i - 1)];
    for (int j = 1; j <= 2; ++j)
      CHECK(f.comp(CoordName::base_x(j)) == Expr(CoordName::frame_nn(i, j)));
    for (int a = 1; a <= 2; ++a) CHECK(f.comp(CoordName::fiber_y(a)).is_zero());
    for (int idx = 4; idx < c22.lvy.dim(); ++idx) CHECK(f.comp(idx).is_zero());
  }
  for (int a = 1; a <= 2; ++a) {
    const GenericField& f = fam.rep[size_t(1 + a)];
    for (int j = 1; j <= 2; ++j)
      CHECK(f.comp(CoordName::base_x(j)) == Expr(CoordName::frame_kn(a, j)));
    for (int b = 1; b <= 2; ++b)
      CHECK(f.comp(CoordName::fiber_y(b)) == Expr(CoordName::frame_kk(a, b)));
    for (int idx = 4; idx < c22.lvy.dim(); ++idx) CHECK(f.comp(idx).is_zero());
  }

  // signs of the base metric propagate through the transport components
  HamiltonianFamily lor = hamiltonian_family_solve(
      c22, st2_from_metric(KKMetric(rational_diag({-1, 1}), Mat<Rational>::identity(2),
                                    Mat<Expr>(2, 2))));
  CHECK(lor.rep[0].comp(CoordName::base_x(1)) == E("-pi_1_1"));
  CHECK(lor.rep[0].comp(CoordName::base_x(2)) == E("pi_1_2"));
}

TEST_CASE("family solve satisfies the structure equation") {
  Chart c22 = make_chart(2, 2);

  ST2Observable flat = st2_from_metric(flat_metric(2, 2));
  CHECK(structure_equation_holds(c22, flat, hamiltonian_family_solve(c22, flat).rep));

  Chart c11 = make_chart(1, 1);
  ST2Observable shear = st2_from_metric(sheared_metric());
  CHECK(structure_equation_holds(c11, shear, hamiltonian_family_solve(c11, shear).rep));

  // zero observable admits the zero family
  ST2Observable zero(2, 2, Mat<Expr>(2, 2), Mat<Expr>(2, 2), Mat<Expr>(2, 2));
  HamiltonianFamily zf = hamiltonian_family_solve(c22, zero);
  for (const GenericField& f : zf.rep) CHECK(f.is_zero());
  CHECK(structure_equation_holds(c22, zero, zf.rep));

  // a non-metric observable with position-dependent blocks
  Chart c12 = make_chart(1, 2);
  Mat<Expr> base(1, 1), mixed(1, 2), fiber(2, 2);
  base.at(0, 0) = E("1 + x1^2");
  mixed.at(0, 1) = E("x1*y1");
  fiber.at(0, 0) = E("1 + y2^2");
  fiber.at(0, 1) = fiber.at(1, 0) = E("y1*y2");
  fiber.at(1, 1) = E("2");
  ST2Observable bumpy(1, 2, base, mixed, fiber);
  CHECK(structure_equation_holds(c12, bumpy, hamiltonian_family_solve(c12, bumpy).rep));
}

TEST_CASE("vertical ambiguity preserves the structure equation") {
  std::mt19937_64 rng(501);
  Chart c22 = make_chart(2, 2);
  ST2Observable flat = st2_from_metric(flat_metric(2, 2));
  HamiltonianFamily fam = hamiltonian_family_solve(c22, flat);

  for (int trial = 0; trial < 5; ++trial) {
    std::vector<GenericField> shifted = fam.rep;
    std::vector<GenericField> noise = random_vertical_ambiguity(rng, c22);
    for (size_t mu = 0; mu < shifted.size(); ++mu)
      for (int idx = 0; idx < c22.lvy.dim(); ++idx)
        shifted[mu].set_comp(idx, shifted[mu].comp(idx) + noise[mu].comp(idx));

    CHECK(vertical_ambiguity_check(c22, fam.rep, shifted));
    CHECK(structure_equation_holds(c22, flat, shifted));
  }

  // transport components in the difference are rejected
  std::vector<GenericField> moved = fam.rep;
  moved[0].set_comp(CoordName::base_x(1), moved[0].comp(CoordName::base_x(1)) + E("1"));
  CHECK_FALSE(vertical_ambiguity_check(c22, fam.rep, moved));

  // a symmetric (rather than antisymmetric) frame shift is rejected too
  std::vector<GenericField> skew = fam.rep;
  skew[0].set_comp(CoordName::frame_nn(2, 1), skew[0].comp(CoordName::frame_nn(2, 1)) + E("1"));
  skew[1].set_comp(CoordName::frame_nn(1, 1), skew[1].comp(CoordName::frame_nn(1, 1)) + E("1"));
  CHECK_FALSE(vertical_ambiguity_check(c22, fam.rep, skew));
}

TEST_CASE("christoffel symbols of the sheared metric") {
  Chart c11 = make_chart(1, 1);

  auto flat = christoffel_symbols(c11, flat_metric(1, 1));
  for (const Mat<Expr>& m : flat) CHECK(all_zero(m));

  auto shear = christoffel_symbols(c11, sheared_metric());
  CHECK(shear[1].at(0, 0) == E("-1"));  // fiber symbol from the x1 shear
  CHECK(shear[0].at(0, 0).is_zero());
  CHECK(shear[0].at(0, 1).is_zero());
  CHECK(shear[0].at(1, 0).is_zero());
  CHECK(shear[0].at(1, 1).is_zero());
  CHECK(shear[1].at(0, 1).is_zero());
  CHECK(shear[1].at(1, 0).is_zero());
  CHECK(shear[1].at(1, 1).is_zero());
}

TEST_CASE("no-torsion representative") {
  Chart c22 = make_chart(2, 2);
  KKMetric flat = flat_metric(2, 2);
  ST2Observable flat_obs = st2_from_metric(flat);
  HamiltonianFamily fam = hamiltonian_family_solve(c22, flat_obs);

  std::vector<GenericField> chosen = no_torsion_select(c22, fam, flat);
  for (size_t mu = 0; mu < chosen.size(); ++mu) CHECK(chosen[mu] == fam.rep[mu]);
  CHECK(no_torsion_residual_zero(c22, chosen));

  Chart c11 = make_chart(1, 1);
  KKMetric shear = sheared_metric();
  ST2Observable shear_obs = st2_from_metric(shear);
  HamiltonianFamily sfam = hamiltonian_family_solve(c11, shear_obs);
  std::vector<GenericField> unique = no_torsion_select(c11, sfam, shear);

  CHECK(structure_equation_holds(c11, shear_obs, unique));
  CHECK(no_torsion_residual_zero(c11, unique));
  CHECK(vertical_ambiguity_check(c11, unique, sfam.rep));
  CHECK(unique[0].comp(CoordName::frame_kn(1, 1)) == E("-pi_1_1*piA_1_1"));

  // the diagonal representative has torsion here, so selection matters
  CHECK_FALSE(no_torsion_residual_zero(c11, sfam.rep));

  // a family from a different observable is rejected
  HamiltonianFamily wrong = hamiltonian_family_solve(c11, st2_from_metric(flat_metric(1, 1)));
  CHECK_THROWS_AS(no_torsion_select(c11, wrong, shear), std::invalid_argument);
}

TEST_CASE("killing residuals") {
  Chart c22 = make_chart(2, 2);
  KKMetric flat = flat_metric(2, 2);

  CHECK(all_zero(killing_residual(c22, coordinate_field_x(2, 2, 1), flat)));

  for (const VectorFieldY& xi :
       orthogonal_generators(Mat<Rational>::identity(2), Mat<Rational>::identity(2)))
    CHECK(all_zero(killing_residual(c22, xi, flat)));

  KKMetric lorentz(rational_diag({-1, 1}), Mat<Rational>::identity(2), Mat<Expr>(2, 2));
  for (const VectorFieldY& xi :
       orthogonal_generators(rational_diag({-1, 1}), Mat<Rational>::identity(2)))
    CHECK(all_zero(killing_residual(c22, xi, lorentz)));

  VectorFieldY dilation(2, 2);
  dilation.set_x_comp(1, E("x1"));
  Mat<Expr> res = killing_residual(c22, dilation, flat);
  CHECK(res.at(0, 0) == E("2"));
  res.at(0, 0) = Expr();
  CHECK(all_zero(res));
}

TEST_CASE("invariance of the contracted observable matches the killing test") {
  Chart c22 = make_chart(2, 2);
  KKMetric flat = flat_metric(2, 2);
  ST2Observable flat_obs = st2_from_metric(flat);

  auto gens = orthogonal_generators(Mat<Rational>::identity(2), Mat<Rational>::identity(2));
  for (const VectorFieldY& xi : gens) CHECK(invariance_check(c22, flat_obs, xi));
  CHECK(invariance_check(c22, flat_obs, coordinate_field_x(2, 2, 1)));

  VectorFieldY dilation(2, 2);
  dilation.set_x_comp(1, E("x1"));
  CHECK_FALSE(invariance_check(c22, flat_obs, dilation));

  // position-dependent metric: vertical translation stays a symmetry,
  // base translation does not
  Chart c11 = make_chart(1, 1);
  KKMetric shear = sheared_metric();
  ST2Observable shear_obs = st2_from_metric(shear);
  VectorFieldY dy = coordinate_field_y(1, 1, 1);
  VectorFieldY dx = coordinate_field_x(1, 1, 1);
  CHECK(all_zero(killing_residual(c11, dy, shear)));
  CHECK(invariance_check(c11, shear_obs, dy));
  CHECK_FALSE(all_zero(killing_residual(c11, dx, shear)));
  CHECK_FALSE(invariance_check(c11, shear_obs, dx));
}

TEST_CASE("mixed brackets of degree-1 and degree-2 observables") {
  Chart c22 = make_chart(2, 2);
  ST2Observable flat_obs = st2_from_metric(flat_metric(2, 2));
  HamiltonianFamily fam = hamiltonian_family_solve(c22, flat_obs);

  CHECK(all_zero(poisson_T1_ST2(c22, coordinate_field_x(2, 2, 1), flat_obs)));
  CHECK(all_zero(poisson_ST2_T1(c22, flat_obs, fam.rep, coordinate_field_x(2, 2, 1))));

  auto gens = orthogonal_generators(Mat<Rational>::identity(2), Mat<Rational>::identity(2));
  for (const VectorFieldY& xi : gens) CHECK(all_zero(poisson_T1_ST2(c22, xi, flat_obs)));

  VectorFieldY dilation(2, 2);
  dilation.set_x_comp(1, E("x1"));
  Mat<Expr> fg = poisson_T1_ST2(c22, dilation, flat_obs);
  Mat<Expr> gf = poisson_ST2_T1(c22, flat_obs, fam.rep, dilation);
  CHECK_FALSE(all_zero(fg));
  CHECK(fg == -gf);

  // antisymmetry for random generators as well
  std::mt19937_64 rng(502);
  for (int trial = 0; trial < 10; ++trial) {
    VectorFieldY xi = random_polynomial_field(rng, 2, 2, 2, true);
    CHECK(poisson_T1_ST2(c22, xi, flat_obs) == -poisson_ST2_T1(c22, flat_obs, fam.rep, xi));
  }

  // the symmetrized bracket ignores the representative choice
  std::vector<GenericField> shifted = fam.rep;
  std::vector<GenericField> noise = random_vertical_ambiguity(rng, c22);
  for (size_t mu = 0; mu < shifted.size(); ++mu)
    for (int idx = 0; idx < c22.lvy.dim(); ++idx)
      shifted[mu].set_comp(idx, shifted[mu].comp(idx) + noise[mu].comp(idx));
  CHECK(poisson_ST2_T1(c22, flat_obs, shifted, dilation) == gf);
}

TEST_CASE("momentum components are conserved along the matching flows") {
  Chart c22 = make_chart(2, 2);
  ST2Observable flat_obs = st2_from_metric(flat_metric(2, 2));
  std::mt19937_64 rng(503);
  FramePoint w0 = random_frame(rng, 2, 2);

  auto gens = orthogonal_generators(Mat<Rational>::identity(2), Mat<Rational>::identity(2));
  ConservedQuantityReport rot = conserved_quantity_check(c22, gens[0], flat_obs, w0, 10.0, 1e-3);
  CHECK(rot.invariant);
  REQUIRE(rot.max_drift.size() == 4);
  for (double d : rot.max_drift) CHECK(d <= 1e-9);
  CHECK(rot.drift_series[0].size() == 10001);

  ConservedQuantityReport trans =
      conserved_quantity_check(c22, coordinate_field_x(2, 2, 1), flat_obs, w0, 10.0, 1e-3);
  CHECK(trans.invariant);
  for (double d : trans.max_drift) CHECK(d <= 1e-12);

  VectorFieldY dilation(2, 2);
  dilation.set_x_comp(1, E("x1"));
  ConservedQuantityReport bad = conserved_quantity_check(c22, dilation, flat_obs, w0, 0.5, 1e-3);
  CHECK_FALSE(bad.invariant);
}

TEST_CASE("transport flow matches its closed form") {
  Chart c22 = make_chart(2, 2);
  ST2Observable flat_obs = st2_from_metric(flat_metric(2, 2));
  HamiltonianFamily fam = hamiltonian_family_solve(c22, flat_obs);
  std::mt19937_64 rng(504);
  FramePoint w0 = random_frame(rng, 2, 2);

  // base-slot flow: x^k advances by t pi^1_k, everything else frozen
  CompiledField field(fam.rep[0].comps(), c22.lvy);
  std::vector<double> state = frame_state(c22, w0);
  std::vector<double> end = integrate_rk4(field, state, 0.0, 1e-3, 10000);
  double t = 10.0;
  for (int idx = 0; idx < c22.lvy.dim(); ++idx) {
    double expect = state[size_t(idx)];
    if (idx == 0) expect += t * rational_to_double(w0.pi_nn.at(0, 0));
    if (idx == 1) expect += t * rational_to_double(w0.pi_nn.at(0, 1));
    CHECK(std::abs(end[size_t(idx)] - expect) <= 1e-9);
  }
}

TEST_CASE("flow guard rejects degenerate frames") {
  Chart c11 = make_chart(1, 1);
  ST2Observable flat_obs = st2_from_metric(flat_metric(1, 1));
  FramePoint w0(1, 1, {0}, {0}, rational_diag({Rational(1, 100000000000)}),
                rational_diag({1}), Mat<Rational>(1, 1));
  CHECK_THROWS_AS(conserved_quantity_check(c11, coordinate_field_x(1, 1, 1), flat_obs, w0,
                                           1.0, 1e-2),
                  std::runtime_error);
}
