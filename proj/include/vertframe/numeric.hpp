#pragma once

#include <functional>
#include <vector>

#include "vertframe/coord.hpp"
#include "vertframe/expr.hpp"

namespace vertframe {

// Expression flattened to coefficient/power-list form for fast double
// evaluation inside integration loops. Every variable must be a chart
// coordinate; free parameters have to be substituted away first.
class CompiledExpr {
 public:
  CompiledExpr(const Expr& e, const CoordSystem& system);

  double eval(const std::vector<double>& state) const;

 private:
  struct Term {
    double coeff;
    std::vector<std::pair<int, int>> powers;  // (state index, exponent)
  };

  static double eval_terms(const std::vector<Term>& terms, const std::vector<double>& state);

  std::vector<Term> num_, den_;  // empty den_ means denominator 1
};

// Vector field with one compiled component per coordinate of the system.
class CompiledField {
 public:
  CompiledField(const std::vector<Expr>& components, const CoordSystem& system);

  int dim() const { return static_cast<int>(comps_.size()); }
  void eval_into(const std::vector<double>& state, std::vector<double>& out) const;

 private:
  std::vector<CompiledExpr> comps_;
};

// Observer receives (step index, time, state); step 0 is the initial state.
using FlowObserver = std::function<void(int, double, const std::vector<double>&)>;

inline constexpr double kBlowUpLimit = 1e12;

// Classic fixed-step fourth-order Runge-Kutta. Throws std::runtime_error when
// any state component exceeds the blow-up limit.
std::vector<double> integrate_rk4(const CompiledField& field, std::vector<double> state,
                                  double t0, double dt, int steps,
                                  const FlowObserver& observer = {});

}  // namespace vertframe
