#include "vertframe/app.hpp"

#include <charconv>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <random>
#include <sstream>

#include "vertframe/multiphase.hpp"

namespace vertframe {

namespace {

using nlohmann::json;
using ordered = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Strict JSON helpers

void require_keys(const json& obj, const std::string& where,
                  std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* a : allowed)
      if (it.key() == a) known = true;
    if (!known) throw ConfigError("unknown key \"" + it.key() + "\" in " + where);
  }
}

int int_field(const json& v, const std::string& where) {
  if (!v.is_number_integer()) throw ConfigError(where + " must be an integer");
  return v.get<int>();
}

double number_field(const json& v, const std::string& where) {
  if (!v.is_number()) throw ConfigError(where + " must be a number");
  return v.get<double>();
}

bool bool_field(const json& v, const std::string& where) {
  if (!v.is_boolean()) throw ConfigError(where + " must be a boolean");
  return v.get<bool>();
}

std::string string_field(const json& v, const std::string& where) {
  if (!v.is_string()) throw ConfigError(where + " must be a string");
  return v.get<std::string>();
}

Rational rational_field(const json& v, const std::string& where) {
  if (!v.is_string())
    throw ConfigError(where + " must be a rational written as a string like \"3/4\"");
  try {
    return rational_from_string(v.get<std::string>());
  } catch (const std::exception& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

Expr expr_field(const json& v, const std::string& where) {
  if (!v.is_string()) throw ConfigError(where + " must be an expression string");
  try {
    return parse_expr(v.get<std::string>());
  } catch (const std::exception& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

Mat<Rational> rational_matrix(const json& v, int rows, int cols, const std::string& where) {
  if (!v.is_array() || int(v.size()) != rows)
    throw ConfigError(where + " must be an array of " + std::to_string(rows) + " rows");
  Mat<Rational> m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    const json& row = v[size_t(r)];
    if (!row.is_array() || int(row.size()) != cols)
      throw ConfigError(where + " row " + std::to_string(r + 1) + " must have " +
                        std::to_string(cols) + " entries");
    for (int c = 0; c < cols; ++c)
      m.at(r, c) = rational_field(row[size_t(c)], where + "[" + std::to_string(r + 1) + "][" +
                                                      std::to_string(c + 1) + "]");
  }
  return m;
}

Mat<Expr> expr_matrix(const json& v, int rows, int cols, const std::string& where) {
  if (!v.is_array() || int(v.size()) != rows)
    throw ConfigError(where + " must be an array of " + std::to_string(rows) + " rows");
  Mat<Expr> m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    const json& row = v[size_t(r)];
    if (!row.is_array() || int(row.size()) != cols)
      throw ConfigError(where + " row " + std::to_string(r + 1) + " must have " +
                        std::to_string(cols) + " entries");
    for (int c = 0; c < cols; ++c)
      m.at(r, c) = expr_field(row[size_t(c)], where + "[" + std::to_string(r + 1) + "][" +
                                                  std::to_string(c + 1) + "]");
  }
  return m;
}

void require_symmetric_invertible(const Mat<Rational>& m, const std::string& where) {
  for (int r = 0; r < m.rows(); ++r)
    for (int c = r + 1; c < m.cols(); ++c)
      if (!(m.at(r, c) == m.at(c, r))) throw ConfigError(where + " must be symmetric");
  if (m.det() == 0) throw ConfigError(where + " must be invertible");
}

bool valid_name(const std::string& s) {
  if (s.empty()) return false;
  for (char ch : s)
    if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '_' && ch != '-') return false;
  return true;
}

VectorFieldY parse_generator_components(const json& obj, int n, int k, const std::string& where) {
  VectorFieldY field(n, k);
  if (obj.contains("x")) {
    const json& xs = obj["x"];
    if (!xs.is_array() || int(xs.size()) != n)
      throw ConfigError(where + ".x must list " + std::to_string(n) + " components");
    for (int i = 1; i <= n; ++i)
      field.set_x_comp(i, expr_field(xs[size_t(i - 1)], where + ".x[" + std::to_string(i) + "]"));
  }
  if (obj.contains("y")) {
    const json& ys = obj["y"];
    if (!ys.is_array() || int(ys.size()) != k)
      throw ConfigError(where + ".y must list " + std::to_string(k) + " components");
    for (int a = 1; a <= k; ++a)
      field.set_y_comp(a, expr_field(ys[size_t(a - 1)], where + ".y[" + std::to_string(a) + "]"));
  }
  for (int i = 1; i <= n; ++i)
    for (const CoordName& v : field.x_comp(i).variables())
      if (v.kind == CoordKind::FiberY)
        throw ConfigError(where + " is not projectable: base component " + std::to_string(i) +
                          " depends on " + v.str());
  return field;
}

FramePoint frame_from_bindings(const Chart& chart, const json& obj) {
  std::map<CoordName, Rational> values = FramePoint(chart.n, chart.k).as_map();
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool found = false;
    for (const CoordName& c : chart.lvy.coords)
      if (c.str() == it.key()) {
        values[c] = rational_field(it.value(), "initial." + it.key());
        found = true;
        break;
      }
    if (!found)
      throw ConfigError("initial binds unknown coordinate \"" + it.key() + "\" for this chart");
  }
  std::vector<Rational> x, y;
  for (int i = 1; i <= chart.n; ++i) x.push_back(values.at(CoordName::base_x(i)));
  for (int a = 1; a <= chart.k; ++a) y.push_back(values.at(CoordName::fiber_y(a)));
  Mat<Rational> nn(chart.n, chart.n), kk(chart.k, chart.k), kn(chart.k, chart.n);
  for (int i = 0; i < chart.n; ++i)
    for (int j = 0; j < chart.n; ++j) nn.at(i, j) = values.at(CoordName::frame_nn(i + 1, j + 1));
  for (int a = 0; a < chart.k; ++a)
    for (int b = 0; b < chart.k; ++b) kk.at(a, b) = values.at(CoordName::frame_kk(a + 1, b + 1));
  for (int a = 0; a < chart.k; ++a)
    for (int i = 0; i < chart.n; ++i) kn.at(a, i) = values.at(CoordName::frame_kn(a + 1, i + 1));
  try {
    return FramePoint(chart.n, chart.k, std::move(x), std::move(y), std::move(nn), std::move(kk),
                      std::move(kn));
  } catch (const std::exception& e) {
    throw ConfigError(std::string("initial frame: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Shared randomness: every check derives its own stream from the seed and its
// name, so subset selection does not reshuffle the draws of other checks.

std::uint64_t fnv1a(std::uint64_t seed, const char* text) {
  std::uint64_t h = 1469598103934665603ULL ^ seed;
  for (const char* p = text; *p; ++p) {
    h ^= std::uint64_t(static_cast<unsigned char>(*p));
    h *= 1099511628211ULL;
  }
  return h;
}

Mat<Rational> random_matrix(std::mt19937_64& rng, int rows, int cols) {
  Mat<Rational> m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m.at(r, c) = random_small_rational(rng, 3, 2);
  return m;
}

Mat<Rational> random_invertible(std::mt19937_64& rng, int n) {
  for (;;) {
    Mat<Rational> m = random_matrix(rng, n, n);
    if (m.det() != 0) return m;
  }
}

FramePoint random_frame(std::mt19937_64& rng, int n, int k) {
  std::vector<Rational> x, y;
  for (int i = 0; i < n; ++i) x.push_back(random_small_rational(rng, 3, 2));
  for (int a = 0; a < k; ++a) y.push_back(random_small_rational(rng, 3, 2));
  return FramePoint(n, k, std::move(x), std::move(y), random_invertible(rng, n),
                    random_invertible(rng, k), random_matrix(rng, k, n));
}

GAElement random_group_element(std::mt19937_64& rng, int n, int k) {
  return GAElement(random_invertible(rng, n), random_invertible(rng, k),
                   random_matrix(rng, k, n));
}

// ---------------------------------------------------------------------------
// Verification checks

struct CheckContext {
  const ScenarioConfig& cfg;
  std::uint64_t seed;

  std::mt19937_64 rng(const char* check_name) const {
    return std::mt19937_64(fnv1a(seed, check_name));
  }
};

std::string clip(const std::string& s) {
  constexpr size_t kMax = 160;
  return s.size() <= kMax ? s : s.substr(0, kMax) + "...";
}

CheckResult pass(std::string name, std::string detail) {
  return CheckResult{std::move(name), true, std::move(detail), 0};
}

CheckResult fail(std::string name, std::string detail) {
  return CheckResult{std::move(name), false, std::move(detail), 0};
}

// Anchors the configured canonical form: contracting d(theta) with the
// momentum coordinate fields must reproduce the base volume and its
// dy-wedge contractions, and d(theta) must be nondegenerate.
CheckResult check_theta_canonical(const CheckContext& ctx) {
  const char* name = "theta-canonical";
  std::vector<std::pair<int, int>> dims = {{1, 1}};
  if (ctx.cfg.n != 1 || ctx.cfg.k != 1) dims.push_back({ctx.cfg.n, ctx.cfg.k});

  for (auto [n, k] : dims) {
    Chart chart = make_chart(n, k);
    Form dtheta = exterior_derivative(theta_Z(chart, ctx.cfg.theta_flip));

    GenericField dp(chart.z);
    dp.set_comp(CoordName::mom_scalar(), Expr(1L));
    Form res = interior_product(dp, dtheta) - volume_form_x(chart.z, n);
    if (!res.is_zero())
      return fail(name, "scalar-momentum contraction residual = " + clip(res.str()));

    for (int i = 1; i <= n; ++i)
      for (int a = 1; a <= k; ++a) {
        GenericField dpia(chart.z);
        dpia.set_comp(CoordName::mom_p(i, a), Expr(1L));
        Form want = wedge(Form::differential(chart.z, CoordName::fiber_y(a)),
                          dx_contracted(chart.z, n, i));
        Form got = interior_product(dpia, dtheta);
        if (!(got == want))
          return fail(name, "momentum contraction (" + std::to_string(i) + "," +
                                std::to_string(a) + ") residual = " + clip((got - want).str()));
      }

    if (!theta_nondegenerate_at(chart, ZPoint(n, k)))
      return fail(name, "structure form degenerate at the origin");
  }
  return pass(name, "canonical contractions and nondegeneracy at " +
                        std::to_string(dims.size()) + " chart sizes");
}

std::vector<VectorFieldY> coordinate_fields(int n, int k) {
  std::vector<VectorFieldY> out;
  for (int i = 1; i <= n; ++i) out.push_back(coordinate_field_x(n, k, i));
  for (int a = 1; a <= k; ++a) out.push_back(coordinate_field_y(n, k, a));
  return out;
}

// d(J(xi)) = -(lift into d theta) on multiphase space, with J built from the
// configured structure form.
CheckResult check_z_defining(const CheckContext& ctx) {
  const char* name = "z-defining";
  auto rng = ctx.rng(name);

  auto residual_for = [&](const Chart& chart, const VectorFieldY& xi) {
    Form theta = theta_Z(chart, ctx.cfg.theta_flip);
    GenericField lift = lift_to_Z(chart, xi);
    Form j = interior_product(lift, theta);
    return exterior_derivative(j) + interior_product(lift, exterior_derivative(theta));
  };

  Chart small = make_chart(1, 1);
  std::vector<VectorFieldY> witnesses = coordinate_fields(1, 1);
  VectorFieldY mixed(1, 1);
  mixed.set_y_comp(1, Expr(CoordName::base_x(1)));
  witnesses.push_back(mixed);
  VectorFieldY stretch(1, 1);
  stretch.set_x_comp(1, Expr(CoordName::base_x(1)));
  witnesses.push_back(stretch);
  for (const VectorFieldY& xi : witnesses) {
    Form res = residual_for(small, xi);
    if (!res.is_zero()) return fail(name, "residual at n=k=1 = " + clip(res.str()));
  }

  Chart chart = make_chart(ctx.cfg.n, ctx.cfg.k);
  std::vector<VectorFieldY> fields = coordinate_fields(ctx.cfg.n, ctx.cfg.k);
  for (int t = 0; t < 10; ++t)
    fields.push_back(random_polynomial_field(rng, ctx.cfg.n, ctx.cfg.k, 2, true));
  for (const VectorFieldY& xi : fields) {
    Form res = residual_for(chart, xi);
    if (!res.is_zero()) return fail(name, "residual = " + clip(res.str()));
  }
  return pass(name, std::to_string(witnesses.size() + fields.size()) + " generators, exact");
}

// d(J(xi)) = -(lift into d soldering) on the frame bundle.
CheckResult check_lvy_defining(const CheckContext& ctx) {
  const char* name = "lvy-defining";
  auto rng = ctx.rng(name);
  Chart chart = make_chart(ctx.cfg.n, ctx.cfg.k);
  VVForm dtheta = soldering_structure(chart);

  std::vector<VectorFieldY> fields = coordinate_fields(ctx.cfg.n, ctx.cfg.k);
  for (int t = 0; t < 10; ++t)
    fields.push_back(random_polynomial_field(rng, ctx.cfg.n, ctx.cfg.k, 2, true));
  for (const VectorFieldY& xi : fields) {
    VVForm res = vv_exterior_derivative(momentum_observable_LVY(chart, xi)) +
                 vv_interior_product(lift_to_LVY(chart, xi), dtheta);
    if (!res.is_zero()) return fail(name, "residual = " + clip(res.str()));
  }
  return pass(name, std::to_string(fields.size()) + " generators, exact");
}

// Bracket of momentum observables equals the observable of the field bracket.
CheckResult check_lvy_closure(const CheckContext& ctx) {
  const char* name = "lvy-closure";
  auto rng = ctx.rng(name);
  Chart chart = make_chart(ctx.cfg.n, ctx.cfg.k);
  for (int t = 0; t < 50; ++t) {
    VectorFieldY xi = random_polynomial_field(rng, ctx.cfg.n, ctx.cfg.k, 2, true);
    VectorFieldY zeta = random_polynomial_field(rng, ctx.cfg.n, ctx.cfg.k, 2, true);
    VVForm res = poisson_LVY(chart, xi, zeta) -
                 momentum_observable_LVY(chart, lie_bracket(xi, zeta));
    if (!res.is_zero())
      return fail(name, "pair " + std::to_string(t + 1) + " residual = " + clip(res.str()));
  }
  return pass(name, "50 random pairs, exact");
}

// Bracket defect on multiphase space equals minus the exact term of the
// configured structure form, and at least one pair has a nonzero defect.
CheckResult check_z_defect(const CheckContext& ctx) {
  const char* name = "z-defect";
  auto rng = ctx.rng(name);
  Chart chart = make_chart(ctx.cfg.n, ctx.cfg.k);
  Form theta = theta_Z(chart, ctx.cfg.theta_flip);

  std::vector<std::pair<VectorFieldY, VectorFieldY>> pairs;
  std::vector<VectorFieldY> coords = coordinate_fields(ctx.cfg.n, ctx.cfg.k);
  for (size_t a = 0; a < coords.size(); ++a)
    for (size_t b = a + 1; b < coords.size(); ++b) pairs.emplace_back(coords[a], coords[b]);
  while (pairs.size() < 50)
    pairs.emplace_back(random_polynomial_field(rng, ctx.cfg.n, ctx.cfg.k, 2, true),
                       random_polynomial_field(rng, ctx.cfg.n, ctx.cfg.k, 2, true));

  int nonzero = 0;
  for (size_t t = 0; t < pairs.size(); ++t) {
    const auto& [xi, zeta] = pairs[t];
    Form defect = bracket_defect_Z(chart, xi, zeta);
    if (!defect.is_zero()) ++nonzero;
    Form res = defect;
    // over a 1-dimensional base the structure form is a 1-form, so the double
    // contraction vanishes and the defect itself must be zero
    if (ctx.cfg.n >= 2) {
      Form inner = interior_product(lift_to_Z(chart, xi),
                                    interior_product(lift_to_Z(chart, zeta), theta));
      res = defect + exterior_derivative(inner);
    }
    if (!res.is_zero())
      return fail(name, "pair " + std::to_string(t + 1) + " residual = " + clip(res.str()));
  }
  if (ctx.cfg.n == 1)
    return pass(name, std::to_string(pairs.size()) + " pairs, all defects vanish identically");
  if (nonzero == 0) return fail(name, "no pair witnessed a nonzero defect");
  return pass(name, std::to_string(pairs.size()) + " pairs, exact; " + std::to_string(nonzero) +
                        " nonzero defects");
}

// Wedge-power pairing against the associated dual element reproduces the
// pulled-back canonical form.
CheckResult check_pairing(const CheckContext& ctx) {
  const char* name = "pairing";
  auto rng = ctx.rng(name);
  for (auto [n, k] : {std::pair{1, 1}, std::pair{2, 2}}) {
    Chart chart = make_chart(n, k);
    if (!pairing_check_canonical(chart, Mat<Rational>(n, k), Rational(1)) ||
        !pairing_check_canonical(chart, Mat<Rational>(n, k), Rational(0)))
      return fail(name, "failed at the distinguished pairs, n=" + std::to_string(n));
    for (int t = 0; t < 20; ++t) {
      Mat<Rational> b = random_matrix(rng, n, k);
      Rational lambda = random_small_rational(rng, 3, 2);
      if (!pairing_check_canonical(chart, b, lambda))
        return fail(name, "failed at random draw " + std::to_string(t + 1) +
                              ", n=" + std::to_string(n));
    }
  }
  return pass(name, "both chart sizes, 20 random draws each, exact");
}

// Pullback of the multiphase momentum observable through the associated map
// matches the frame-bundle observable paired against the dual element.
CheckResult check_pullback(const CheckContext& ctx) {
  const char* name = "pullback";
  auto rng = ctx.rng(name);
  for (auto [n, k] : {std::pair{1, 1}, std::pair{2, 2}}) {
    Chart chart = make_chart(n, k);
    for (int t = 0; t < 20; ++t) {
      VectorFieldY xi = random_polynomial_field(rng, n, k, 1, true);
      Mat<Rational> b = random_matrix(rng, n, k);
      Rational lambda = random_small_rational(rng, 3, 2);
      if (!pullback_check_momentum(chart, xi, b, lambda))
        return fail(name, "failed at random draw " + std::to_string(t + 1) +
                              ", n=" + std::to_string(n));
    }
  }
  return pass(name, "both chart sizes, 20 random draws each, exact");
}

// Structure of the adapted linear group: action law, freeness, linear left
// action, orbit invariance of the associated map, rank invariance.
CheckResult check_group_action(const CheckContext& ctx) {
  const char* name = "group-action";
  auto rng = ctx.rng(name);
  int n = ctx.cfg.n, k = ctx.cfg.k;
  for (int t = 0; t < 20; ++t) {
    FramePoint w = random_frame(rng, n, k);
    GAElement g = random_group_element(rng, n, k);
    GAElement h = random_group_element(rng, n, k);
    Mat<Rational> b1 = random_matrix(rng, n, k);
    Mat<Rational> b2 = random_matrix(rng, n, k);
    Rational l1 = random_small_rational(rng, 3, 2);
    Rational l2 = random_small_rational(rng, 3, 2);

    if (!(ga_act_frame(ga_act_frame(w, g), h) == ga_act_frame(w, g * h)))
      return fail(name, "right-action law failed at draw " + std::to_string(t + 1));
    if (!g.is_identity() && ga_act_frame(w, g) == w)
      return fail(name, "action not free at draw " + std::to_string(t + 1));

    auto p1 = ga_act_pair(g, b1, l1);
    auto p2 = ga_act_pair(g, b2, l2);
    auto sum = ga_act_pair(g, b1 + b2, l1 + l2);
    if (!(sum.first == p1.first + p2.first) || !(sum.second == p1.second + p2.second))
      return fail(name, "left action not additive at draw " + std::to_string(t + 1));
    Rational c = random_small_rational(rng, 3, 2);
    auto scaled = ga_act_pair(g, b1.scaled(c), l1 * c);
    if (!(scaled.first == p1.first.scaled(c)) || !(scaled.second == p1.second * c))
      return fail(name, "left action not homogeneous at draw " + std::to_string(t + 1));

    auto moved = ga_act_pair(g.inverse(), b1, l1);
    if (!(rho_hat(ga_act_frame(w, g), moved.first, moved.second) == rho_hat(w, b1, l1)))
      return fail(name, "orbit invariance failed at draw " + std::to_string(t + 1));
    if (rank_of(p1.first) != rank_of(b1))
      return fail(name, "rank changed under the left action at draw " + std::to_string(t + 1));
  }
  return pass(name, "20 random instances, exact");
}

// Orthogonal-algebra generators are Killing for both signatures; the dilation
// is the non-example.
CheckResult check_killing(const CheckContext&) {
  const char* name = "killing";
  Chart chart = make_chart(2, 2);
  Mat<Rational> lorentz(2, 2);
  lorentz.at(0, 0) = 1;
  lorentz.at(1, 1) = -1;

  int verified = 0;
  for (const Mat<Rational>& eta : {Mat<Rational>::identity(2), lorentz}) {
    KKMetric metric(eta, Mat<Rational>::identity(2), Mat<Expr>(2, 2));
    for (const VectorFieldY& xi : orthogonal_generators(eta, Mat<Rational>::identity(2))) {
      Mat<Expr> res = killing_residual(chart, xi, metric);
      for (int r = 0; r < res.rows(); ++r)
        for (int c = 0; c < res.cols(); ++c)
          if (!res.at(r, c).is_zero())
            return fail(name, "generator residual[" + std::to_string(r + 1) + "][" +
                                  std::to_string(c + 1) + "] = " + clip(res.at(r, c).str()));
      ++verified;
    }
  }

  VectorFieldY dilation(2, 2);
  dilation.set_x_comp(1, Expr(CoordName::base_x(1)));
  Mat<Expr> res =
      killing_residual(chart, dilation, KKMetric(Mat<Rational>::identity(2),
                                                 Mat<Rational>::identity(2), Mat<Expr>(2, 2)));
  bool nonzero = false;
  for (int r = 0; r < res.rows(); ++r)
    for (int c = 0; c < res.cols(); ++c)
      if (!res.at(r, c).is_zero()) nonzero = true;
  if (!nonzero) return fail(name, "dilation counterexample reported as Killing");
  return pass(name, std::to_string(verified) + " generators Killing, dilation rejected");
}

struct CheckEntry {
  const char* name;
  CheckResult (*fn)(const CheckContext&);
};

constexpr CheckEntry kChecks[] = {
    {"theta-canonical", check_theta_canonical},
    {"z-defining", check_z_defining},
    {"lvy-defining", check_lvy_defining},
    {"lvy-closure", check_lvy_closure},
    {"z-defect", check_z_defect},
    {"pairing", check_pairing},
    {"pullback", check_pullback},
    {"group-action", check_group_action},
    {"killing", check_killing},
};

// ---------------------------------------------------------------------------
// CSV / JSON emission

std::string csv_row(const std::vector<std::string>& cells) {
  std::string line;
  for (size_t i = 0; i < cells.size(); ++i) {
    if (i) line += ',';
    line += cells[i];
  }
  line += '\n';
  return line;
}

ordered base_summary(const std::string& scenario, const ScenarioConfig& cfg) {
  ordered doc;
  doc["version"] = 1;
  doc["scenario"] = scenario;
  doc["n"] = cfg.n;
  doc["k"] = cfg.k;
  doc["t_max"] = cfg.t_max;
  doc["dt"] = cfg.dt;
  return doc;
}

ordered label_map(const std::vector<std::string>& labels, const std::vector<double>& values) {
  ordered out;
  for (size_t i = 0; i < labels.size(); ++i) out[labels[i]] = values[i];
  return out;
}

KKMetric metric_from(const ScenarioConfig& cfg) {
  return KKMetric(cfg.eta, cfg.iota, cfg.gamma);
}

constexpr double kConservedTolerance = 1e-9;

bool all_within(const std::vector<double>& values, double bound) {
  for (double v : values)
    if (v > bound) return false;
  return true;
}

// Shared CSV layout for drift reports: one time column, then per generator
// the momentum values, drifts, and (when present) the analytic expectation.
RunArtifacts drift_artifacts(const std::string& scenario, const ScenarioConfig& cfg,
                             const std::string& time_label,
                             const std::vector<std::string>& names,
                             const std::vector<DriftReport>& reports, ordered summary) {
  RunArtifacts out;
  out.csv_name = scenario + ".csv";
  out.json_name = scenario + ".json";

  std::vector<std::string> header = {time_label};
  for (size_t g = 0; g < reports.size(); ++g) {
    std::string tag = names.empty() ? "" : "_" + names[g];
    for (const std::string& label : reports[g].labels) header.push_back("J" + tag + "_" + label);
  }
  for (size_t g = 0; g < reports.size(); ++g) {
    std::string tag = names.empty() ? "" : "_" + names[g];
    for (const std::string& label : reports[g].labels)
      header.push_back("drift" + tag + "_" + label);
  }
  for (size_t g = 0; g < reports.size(); ++g) {
    if (!reports[g].has_correction) continue;
    std::string tag = names.empty() ? "" : "_" + names[g];
    for (const std::string& label : reports[g].labels)
      header.push_back("expected" + tag + "_" + label);
  }
  out.csv_text = csv_row(header);

  size_t samples = reports.front().times.size();
  for (const DriftReport& r : reports)
    if (r.times.size() != samples) throw std::logic_error("mismatched report grids");
  for (size_t i = 0; i < samples; ++i) {
    std::vector<std::string> cells = {csv_number(reports.front().times[i])};
    for (const DriftReport& r : reports)
      for (const auto& series : r.series) cells.push_back(csv_number(series[i]));
    for (const DriftReport& r : reports)
      for (const auto& series : r.drift) cells.push_back(csv_number(series[i]));
    for (const DriftReport& r : reports) {
      if (!r.has_correction) continue;
      for (const auto& series : r.correction) cells.push_back(csv_number(series[i]));
    }
    out.csv_text += csv_row(cells);
  }

  summary["samples"] = samples;
  summary["csv"] = out.csv_name;
  out.json_text = summary.dump(2) + "\n";
  out.conserved = summary.contains("conserved") && summary["conserved"].is_boolean() &&
                  summary["conserved"].get<bool>();
  return out;
}

RunArtifacts run_momentum_scenario(const std::string& scenario, const ScenarioConfig& cfg,
                                   bool angular) {
  Chart chart = make_chart(cfg.n, cfg.k);
  KKMetric metric = metric_from(cfg);

  std::vector<GeneratorSpec> gens = cfg.generators;
  if (gens.empty()) {
    if (angular) {
      int count = 0;
      for (VectorFieldY& xi : orthogonal_generators(cfg.eta, cfg.iota))
        gens.push_back({"rot" + std::to_string(++count), std::move(xi)});
      if (gens.empty()) throw ConfigError("no rotation generators exist for this chart");
    } else {
      for (int i = 1; i <= cfg.n; ++i)
        gens.push_back({"dx" + std::to_string(i), coordinate_field_x(cfg.n, cfg.k, i)});
      for (int a = 1; a <= cfg.k; ++a)
        gens.push_back({"dy" + std::to_string(a), coordinate_field_y(cfg.n, cfg.k, a)});
    }
  }

  std::vector<std::string> names;
  std::vector<DriftReport> reports;
  bool conserved = true;
  ordered gen_summaries = ordered::array();
  for (const GeneratorSpec& gen : gens) {
    DriftReport r = conservation_run(chart, metric, gen.field, cfg.start, cfg.t_max, cfg.dt);
    conserved = conserved && r.invariant && all_within(r.max_abs_drift, kConservedTolerance);
    ordered s;
    s["name"] = gen.name;
    s["invariant"] = r.invariant;
    s["initial"] = label_map(r.labels, r.initial);
    s["max_abs_drift"] = label_map(r.labels, r.max_abs_drift);
    gen_summaries.push_back(std::move(s));
    names.push_back(gen.name);
    reports.push_back(std::move(r));
  }

  ordered summary = base_summary(scenario, cfg);
  summary["generators"] = std::move(gen_summaries);
  summary["conserved"] = conserved;
  return drift_artifacts(scenario, cfg, "t", names, reports, std::move(summary));
}

RunArtifacts run_affine_scenario(const ScenarioConfig& cfg) {
  if (cfg.n != 1) throw ConfigError("affine scenario requires n = 1");
  if (!cfg.affine_rotation)
    throw ConfigError("affine scenario requires an \"affine\" block");
  AffineScenario sc{cfg.iota, *cfg.affine_rotation, cfg.affine_shift, cfg.start};
  DriftReport r = parallel_axis_analysis(sc, cfg.t_max, cfg.dt);
  bool exact = parallel_axis_exact_check(sc, cfg.exact_lambda);

  ordered summary = base_summary("affine", cfg);
  summary["labels"] = r.labels;
  summary["invariant"] = r.invariant;
  summary["initial"] = label_map(r.labels, r.initial);
  summary["max_abs_drift"] = label_map(r.labels, r.max_abs_drift);
  summary["max_correction_mismatch"] = r.max_correction_mismatch;
  summary["correction_matches"] = r.max_correction_mismatch <= 1e-12;
  summary["exact_path"] = exact;
  summary["conserved"] = r.invariant && all_within(r.max_abs_drift, kConservedTolerance);

  std::vector<DriftReport> reports;
  reports.push_back(std::move(r));
  return drift_artifacts("affine", cfg, "lambda", {}, reports, std::move(summary));
}

RunArtifacts run_reparam_scenario(const ScenarioConfig& cfg) {
  if (cfg.n != 1) throw ConfigError("reparam scenario requires n = 1");
  Chart chart = make_chart(1, cfg.k);
  DriftReport r = reparam_momentum_run(chart, metric_from(cfg), cfg.reparam_profile, cfg.assoc_b,
                                       cfg.assoc_lambda, cfg.start, cfg.t_max, cfg.dt);

  ordered summary = base_summary("reparam", cfg);
  summary["profile"] = cfg.reparam_profile.str();
  summary["labels"] = r.labels;
  summary["invariant"] = r.invariant;
  summary["initial"] = label_map(r.labels, r.initial);
  summary["max_abs_drift"] = label_map(r.labels, r.max_abs_drift);
  summary["has_correction"] = r.has_correction;
  if (r.has_correction) summary["max_correction_mismatch"] = r.max_correction_mismatch;
  summary["conserved"] = r.invariant && all_within(r.max_abs_drift, kConservedTolerance);

  std::vector<DriftReport> reports;
  reports.push_back(std::move(r));
  return drift_artifacts("reparam", cfg, "t", {}, reports, std::move(summary));
}

RunArtifacts run_geodesic_scenario(const ScenarioConfig& cfg) {
  Chart chart = make_chart(cfg.n, cfg.k);
  GeodesicReport r = geodesic_transport_run(chart, metric_from(cfg), cfg.start, cfg.t_max, cfg.dt);

  RunArtifacts out;
  out.csv_name = "geodesic.csv";
  out.json_name = "geodesic.json";

  std::vector<std::string> header = {"t"};
  for (const CoordName& c : chart.lvy.coords) header.push_back(c.str());
  out.csv_text = csv_row(header);
  for (int i = 0; i < r.trajectory.samples(); ++i) {
    std::vector<std::string> cells = {csv_number(r.trajectory.times[size_t(i)])};
    for (double v : r.trajectory.states[size_t(i)]) cells.push_back(csv_number(v));
    out.csv_text += csv_row(cells);
  }

  bool ok = r.no_torsion_exact && r.max_geodesic_residual <= 1e-6 &&
            r.max_transport_residual <= 1e-6 && r.max_energy_drift <= 1e-8;
  ordered summary = base_summary("geodesic", cfg);
  summary["samples"] = r.trajectory.samples();
  summary["no_torsion_exact"] = r.no_torsion_exact;
  summary["max_geodesic_residual"] = r.max_geodesic_residual;
  summary["max_transport_residual"] = r.max_transport_residual;
  summary["max_energy_drift"] = r.max_energy_drift;
  summary["within_tolerance"] = ok;
  summary["csv"] = out.csv_name;
  out.json_text = summary.dump(2) + "\n";
  out.conserved = ok;
  return out;
}

VectorFieldY parse_components_text(const std::string& text, int n, int k,
                                   const std::string& which) {
  std::vector<std::string> parts;
  std::string current;
  for (char ch : text) {
    if (ch == ',') {
      parts.push_back(current);
      current.clear();
    } else {
      current += ch;
    }
  }
  parts.push_back(current);
  if (int(parts.size()) != n + k)
    throw ConfigError(which + " must list " + std::to_string(n + k) +
                      " comma-separated components (base then fiber), got " +
                      std::to_string(parts.size()));
  VectorFieldY field(n, k);
  for (int i = 1; i <= n; ++i) {
    try {
      field.set_x_comp(i, parse_expr(parts[size_t(i - 1)]));
    } catch (const std::exception& e) {
      throw ConfigError(which + " component " + std::to_string(i) + ": " + e.what());
    }
  }
  for (int a = 1; a <= k; ++a) {
    try {
      field.set_y_comp(a, parse_expr(parts[size_t(n + a - 1)]));
    } catch (const std::exception& e) {
      throw ConfigError(which + " component " + std::to_string(n + a) + ": " + e.what());
    }
  }
  for (int i = 1; i <= n; ++i)
    for (const CoordName& v : field.x_comp(i).variables())
      if (v.kind == CoordKind::FiberY)
        throw ConfigError(which + " is not projectable: base component " + std::to_string(i) +
                          " depends on " + v.str());
  return field;
}

}  // namespace

// ---------------------------------------------------------------------------
// Public surface

ScenarioConfig::ScenarioConfig()
    : eta(Mat<Rational>::identity(2)),
      iota(Mat<Rational>::identity(2)),
      gamma(2, 2),
      start(2, 2),
      reparam_profile(1L),
      assoc_b(2, 2) {}

ScenarioConfig parse_config(const json& doc) {
  if (!doc.is_object()) throw ConfigError("configuration must be a JSON object");
  require_keys(doc, "configuration",
               {"version", "n", "k", "eta", "iota", "gamma", "generators", "initial",
                "integrator", "checks", "theta", "seed", "affine", "reparam"});
  if (!doc.contains("version")) throw ConfigError("configuration requires \"version\": 1");
  if (!doc["version"].is_number_integer() || doc["version"].get<int>() != 1)
    throw ConfigError("unsupported configuration version (expected 1)");

  ScenarioConfig cfg;
  if (doc.contains("n")) cfg.n = int_field(doc["n"], "n");
  if (doc.contains("k")) cfg.k = int_field(doc["k"], "k");
  if (cfg.n < 1 || cfg.k < 1 || cfg.n + cfg.k > 4)
    throw ConfigError("chart dimensions must satisfy n >= 1, k >= 1, n + k <= 4");
  Chart chart = make_chart(cfg.n, cfg.k);

  cfg.eta = Mat<Rational>::identity(cfg.n);
  cfg.iota = Mat<Rational>::identity(cfg.k);
  cfg.gamma = Mat<Expr>(cfg.k, cfg.n);
  cfg.start = FramePoint(cfg.n, cfg.k);
  cfg.assoc_b = Mat<Rational>(cfg.n, cfg.k);

  if (doc.contains("eta")) {
    cfg.eta = rational_matrix(doc["eta"], cfg.n, cfg.n, "eta");
    require_symmetric_invertible(cfg.eta, "eta");
  }
  if (doc.contains("iota")) {
    cfg.iota = rational_matrix(doc["iota"], cfg.k, cfg.k, "iota");
    require_symmetric_invertible(cfg.iota, "iota");
  }
  if (doc.contains("gamma")) cfg.gamma = expr_matrix(doc["gamma"], cfg.k, cfg.n, "gamma");

  if (doc.contains("generators")) {
    const json& gens = doc["generators"];
    if (!gens.is_array()) throw ConfigError("generators must be an array");
    for (size_t idx = 0; idx < gens.size(); ++idx) {
      const json& g = gens[idx];
      std::string where = "generators[" + std::to_string(idx + 1) + "]";
      if (!g.is_object()) throw ConfigError(where + " must be an object");
      require_keys(g, where, {"name", "x", "y"});
      if (!g.contains("name")) throw ConfigError(where + " requires a name");
      std::string gname = string_field(g["name"], where + ".name");
      if (!valid_name(gname))
        throw ConfigError(where + ".name must use letters, digits, '_' or '-'");
      for (const GeneratorSpec& prev : cfg.generators)
        if (prev.name == gname) throw ConfigError("duplicate generator name \"" + gname + "\"");
      cfg.generators.push_back({gname, parse_generator_components(g, cfg.n, cfg.k, where)});
    }
  }

  if (doc.contains("initial")) {
    if (!doc["initial"].is_object()) throw ConfigError("initial must be an object");
    cfg.start = frame_from_bindings(chart, doc["initial"]);
  }

  if (doc.contains("integrator")) {
    const json& grid = doc["integrator"];
    if (!grid.is_object()) throw ConfigError("integrator must be an object");
    require_keys(grid, "integrator", {"t_max", "dt"});
    if (grid.contains("t_max")) cfg.t_max = number_field(grid["t_max"], "integrator.t_max");
    if (grid.contains("dt")) cfg.dt = number_field(grid["dt"], "integrator.dt");
    if (cfg.dt <= 0 || cfg.t_max <= 0 || cfg.dt > cfg.t_max)
      throw ConfigError("integrator requires 0 < dt <= t_max");
  }

  if (doc.contains("checks")) {
    const json& checks = doc["checks"];
    if (!checks.is_array()) throw ConfigError("checks must be an array of check names");
    for (const json& c : checks) {
      std::string cname = string_field(c, "checks entry");
      bool known = false;
      for (const CheckEntry& entry : kChecks)
        if (cname == entry.name) known = true;
      if (!known) throw ConfigError("unknown check \"" + cname + "\"");
      for (const std::string& prev : cfg.checks)
        if (prev == cname) throw ConfigError("duplicate check \"" + cname + "\"");
      cfg.checks.push_back(cname);
    }
  }

  if (doc.contains("theta")) {
    const json& theta = doc["theta"];
    if (!theta.is_object()) throw ConfigError("theta must be an object");
    require_keys(theta, "theta", {"flip_sign"});
    if (theta.contains("flip_sign"))
      cfg.theta_flip = bool_field(theta["flip_sign"], "theta.flip_sign");
  }

  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned())
      throw ConfigError("seed must be an unsigned integer");
    cfg.seed = doc["seed"].get<std::uint64_t>();
  }

  if (doc.contains("affine")) {
    const json& blk = doc["affine"];
    if (!blk.is_object()) throw ConfigError("affine must be an object");
    require_keys(blk, "affine", {"rotation", "shift", "exact_lambda"});
    if (!blk.contains("rotation") || !blk.contains("shift"))
      throw ConfigError("affine requires rotation and shift");
    cfg.affine_rotation = rational_matrix(blk["rotation"], cfg.k, cfg.k, "affine.rotation");
    const json& shift = blk["shift"];
    if (!shift.is_array() || int(shift.size()) != cfg.k)
      throw ConfigError("affine.shift must list " + std::to_string(cfg.k) + " entries");
    for (size_t i = 0; i < shift.size(); ++i)
      cfg.affine_shift.push_back(
          rational_field(shift[i], "affine.shift[" + std::to_string(i + 1) + "]"));
    if (blk.contains("exact_lambda"))
      cfg.exact_lambda = rational_field(blk["exact_lambda"], "affine.exact_lambda");
  }

  if (doc.contains("reparam")) {
    const json& blk = doc["reparam"];
    if (!blk.is_object()) throw ConfigError("reparam must be an object");
    require_keys(blk, "reparam", {"profile", "assoc_b", "assoc_lambda"});
    if (blk.contains("profile")) cfg.reparam_profile = expr_field(blk["profile"], "reparam.profile");
    if (blk.contains("assoc_b"))
      cfg.assoc_b = rational_matrix(blk["assoc_b"], cfg.n, cfg.k, "reparam.assoc_b");
    if (blk.contains("assoc_lambda"))
      cfg.assoc_lambda = rational_field(blk["assoc_lambda"], "reparam.assoc_lambda");
  }

  return cfg;
}

ScenarioConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config JSON: ") + e.what());
  }
  return parse_config(doc);
}

std::uint64_t resolve_seed(const ScenarioConfig& cfg, const char* env_text) {
  if (env_text != nullptr && *env_text != '\0') {
    std::uint64_t value = 0;
    const char* last = env_text;
    while (*last) ++last;
    auto [ptr, ec] = std::from_chars(env_text, last, value);
    if (ec != std::errc{} || ptr != last)
      throw ConfigError("VERTFRAME_SEED must be an unsigned integer");
    return value;
  }
  if (cfg.seed) return *cfg.seed;
  return 0x76657274ULL;  // stable default
}

bool VerifyReport::all_passed() const {
  for (const CheckResult& c : checks)
    if (!c.passed) return false;
  return true;
}

std::vector<std::string> verify_check_names() {
  std::vector<std::string> out;
  for (const CheckEntry& entry : kChecks) out.emplace_back(entry.name);
  return out;
}

VerifyReport run_verify(const ScenarioConfig& cfg, std::uint64_t seed) {
  CheckContext ctx{cfg, seed};
  std::vector<const CheckEntry*> selected;
  for (const CheckEntry& entry : kChecks) {
    if (cfg.checks.empty()) {
      selected.push_back(&entry);
      continue;
    }
    for (const std::string& want : cfg.checks)
      if (want == entry.name) selected.push_back(&entry);
  }

  // independent checks run concurrently; the report keeps registry order
  std::vector<std::future<CheckResult>> futures;
  for (const CheckEntry* entry : selected)
    futures.push_back(std::async(std::launch::async, [entry, &ctx] {
      auto t0 = std::chrono::steady_clock::now();
      CheckResult result;
      try {
        result = entry->fn(ctx);
      } catch (const std::exception& e) {
        result = fail(entry->name, std::string("exception: ") + e.what());
      }
      result.millis = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
      return result;
    }));

  VerifyReport report;
  for (auto& f : futures) report.checks.push_back(f.get());
  return report;
}

std::vector<std::string> scenario_names() {
  return {"linear-momentum", "angular-momentum", "affine", "reparam", "geodesic"};
}

RunArtifacts run_scenario(const std::string& scenario, const ScenarioConfig& cfg) {
  if (scenario == "linear-momentum") return run_momentum_scenario(scenario, cfg, false);
  if (scenario == "angular-momentum") return run_momentum_scenario(scenario, cfg, true);
  if (scenario == "affine") return run_affine_scenario(cfg);
  if (scenario == "reparam") return run_reparam_scenario(cfg);
  if (scenario == "geodesic") return run_geodesic_scenario(cfg);
  throw ConfigError("unknown scenario \"" + scenario +
                    "\" (expected linear-momentum, angular-momentum, affine, reparam, geodesic)");
}

std::string locate_scenario_preset(const std::string& name) {
  bool known = false;
  for (const std::string& s : scenario_names())
    if (s == name) known = true;
  if (!known)
    throw ConfigError("unknown scenario \"" + name +
                      "\" (expected linear-momentum, angular-momentum, affine, reparam, geodesic)");

  namespace fs = std::filesystem;
  std::vector<fs::path> candidates;
  if (const char* dir = std::getenv("VERTFRAME_SCENARIO_DIR"))
    candidates.push_back(fs::path(dir) / (name + ".json"));
  candidates.push_back(fs::path("scenarios") / (name + ".json"));
  std::error_code ec;
  fs::path exe = fs::read_symlink("/proc/self/exe", ec);
  if (!ec) {
    candidates.push_back(exe.parent_path() / "scenarios" / (name + ".json"));
    candidates.push_back(exe.parent_path().parent_path() / "scenarios" / (name + ".json"));
  }

  std::string tried;
  for (const fs::path& p : candidates) {
    if (fs::exists(p)) return p.string();
    if (!tried.empty()) tried += ", ";
    tried += p.string();
  }
  throw ConfigError("no preset found for scenario \"" + name + "\" (tried: " + tried + ")");
}

BracketReport run_bracket(const std::string& space, int n, int k, const std::string& xi_text,
                          const std::string& zeta_text) {
  if (space != "Z" && space != "LVY") throw ConfigError("space must be Z or LVY");
  if (n < 1 || k < 1 || n + k > 4)
    throw ConfigError("chart dimensions must satisfy n >= 1, k >= 1, n + k <= 4");
  Chart chart = make_chart(n, k);
  VectorFieldY xi = parse_components_text(xi_text, n, k, "--xi");
  VectorFieldY zeta = parse_components_text(zeta_text, n, k, "--zeta");
  VectorFieldY commutator = lie_bracket(xi, zeta);

  BracketReport report;
  report.space = space;
  if (space == "LVY") {
    VVForm bracket = poisson_LVY(chart, xi, zeta);
    VVForm j_comm = momentum_observable_LVY(chart, commutator);
    report.j_xi = momentum_observable_LVY(chart, xi).str();
    report.j_zeta = momentum_observable_LVY(chart, zeta).str();
    report.bracket = bracket.str();
    report.j_commutator = j_comm.str();
    report.defect = (bracket - j_comm).str();
  } else {
    report.j_xi = momentum_observable_Z(chart, xi).str();
    report.j_zeta = momentum_observable_Z(chart, zeta).str();
    report.bracket = poisson_Z(chart, xi, zeta).str();
    report.j_commutator = momentum_observable_Z(chart, commutator).str();
    report.defect = bracket_defect_Z(chart, xi, zeta).str();
  }
  return report;
}

std::string csv_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) throw std::logic_error("number formatting failed");
  return std::string(buf, ptr);
}

}  // namespace vertframe
