#include "vertframe/numeric.hpp"

#include <cmath>
#include <stdexcept>

namespace vertframe {

CompiledExpr::CompiledExpr(const Expr& e, const CoordSystem& system) {
  auto flatten = [&system](const Poly& p, std::vector<Term>& out) {
    for (const auto& [mono, coeff] : p.terms()) {
      Term t;
      t.coeff = rational_to_double(coeff);
      for (const auto& [var, exp] : mono.factors) {
        int idx = system.index_of(var);
        if (idx < 0)
          throw std::invalid_argument("cannot compile: unbound variable " + var.str());
        t.powers.emplace_back(idx, exp);
      }
      out.push_back(std::move(t));
    }
  };
  flatten(e.num(), num_);
  if (!(e.den().is_constant() && e.den().constant_value() == 1)) flatten(e.den(), den_);
}

double CompiledExpr::eval_terms(const std::vector<Term>& terms,
                                const std::vector<double>& state) {
  double acc = 0.0;
  for (const Term& t : terms) {
    double v = t.coeff;
    for (const auto& [idx, exp] : t.powers) {
      double base = state[static_cast<size_t>(idx)];
      for (int r = 0; r < exp; ++r) v *= base;
    }
    acc += v;
  }
  return acc;
}

double CompiledExpr::eval(const std::vector<double>& state) const {
  double n = eval_terms(num_, state);
  if (den_.empty()) return n;
  double d = eval_terms(den_, state);
  if (d == 0.0) throw std::runtime_error("evaluation hit a zero denominator");
  return n / d;
}

CompiledField::CompiledField(const std::vector<Expr>& components, const CoordSystem& system) {
  if (static_cast<int>(components.size()) != system.dim())
    throw std::invalid_argument("component count does not match coordinate system");
  comps_.reserve(components.size());
  for (const Expr& c : components) comps_.emplace_back(c, system);
}

void CompiledField::eval_into(const std::vector<double>& state,
                              std::vector<double>& out) const {
  out.resize(comps_.size());
  for (size_t i = 0; i < comps_.size(); ++i) out[i] = comps_[i].eval(state);
}

std::vector<double> integrate_rk4(const CompiledField& field, std::vector<double> state,
                                  double t0, double dt, int steps,
                                  const FlowObserver& observer) {
  if (static_cast<int>(state.size()) != field.dim())
    throw std::invalid_argument("state dimension does not match field");
  auto check = [](int sample, const std::vector<double>& s) {
    for (double v : s)
      if (!std::isfinite(v) || std::abs(v) > kBlowUpLimit)
        throw std::runtime_error("integration blow-up at sample " + std::to_string(sample) +
                                 ": component exceeded limit");
  };
  check(0, state);
  if (observer) observer(0, t0, state);

  const size_t dim = state.size();
  std::vector<double> k1(dim), k2(dim), k3(dim), k4(dim), tmp(dim);
  for (int step = 1; step <= steps; ++step) {
    field.eval_into(state, k1);
    for (size_t i = 0; i < dim; ++i) tmp[i] = state[i] + 0.5 * dt * k1[i];
    field.eval_into(tmp, k2);
    for (size_t i = 0; i < dim; ++i) tmp[i] = state[i] + 0.5 * dt * k2[i];
    field.eval_into(tmp, k3);
    for (size_t i = 0; i < dim; ++i) tmp[i] = state[i] + dt * k3[i];
    field.eval_into(tmp, k4);
    for (size_t i = 0; i < dim; ++i)
      state[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    check(step, state);
    if (observer) observer(step, t0 + step * dt, state);
  }
  return state;
}

}  // namespace vertframe
