#pragma once

#include <map>
#include <utility>
#include <vector>

#include "vertframe/coord.hpp"
#include "vertframe/expr.hpp"

namespace vertframe {

// Vector field with one Expr component per coordinate of an arbitrary system
// (used for fields on Z and on the frame bundle).
class GenericField {
 public:
  explicit GenericField(CoordSystem system);
  GenericField(CoordSystem system, std::vector<Expr> comps);

  const CoordSystem& system() const { return system_; }
  int dim() const { return system_.dim(); }
  const Expr& comp(int idx) const { return comps_.at(size_t(idx)); }
  const Expr& comp(const CoordName& c) const { return comps_.at(size_t(system_.require(c))); }
  void set_comp(int idx, Expr e) { comps_.at(size_t(idx)) = std::move(e); }
  void set_comp(const CoordName& c, Expr e);
  const std::vector<Expr>& comps() const { return comps_; }

  bool is_zero() const;
  Expr apply(const Expr& f) const;  // derivation on scalars

  friend bool operator==(const GenericField&, const GenericField&);

 private:
  CoordSystem system_;
  std::vector<Expr> comps_;
};

GenericField lie_bracket(const GenericField& v, const GenericField& w);

// Homogeneous scalar-valued differential form, stored sparsely over strictly
// increasing coordinate-index tuples. Degrees above the chart dimension are
// representable but necessarily empty.
class Form {
 public:
  Form(CoordSystem system, int degree);
  static Form function(CoordSystem system, Expr f);                      // degree 0
  static Form differential(const CoordSystem& system, const CoordName& c);  // d(coord)

  int degree() const { return degree_; }
  const CoordSystem& system() const { return system_; }
  const std::map<std::vector<int>, Expr>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  // Indices may come in any order; the term is sign-normalized and merged.
  // Repeated indices contribute nothing.
  void add_term(std::vector<int> indices, const Expr& coeff);
  Expr coefficient(std::vector<int> indices) const;  // 0 when absent

  Form operator-() const;
  friend Form operator+(const Form& a, const Form& b);
  friend Form operator-(const Form& a, const Form& b);
  Form scaled(const Expr& s) const;
  friend bool operator==(const Form& a, const Form& b);

  std::string str() const;

 private:
  CoordSystem system_;
  int degree_;
  std::map<std::vector<int>, Expr> terms_;
};

Form wedge(const Form& a, const Form& b);
Form exterior_derivative(const Form& w);
// Contraction in the first slot; rejects degree-0 input.
Form interior_product(const GenericField& v, const Form& w);
// Pull back through the map whose component at each target coordinate is the
// given Expr over source coordinates.
Form pullback(const CoordSystem& source, const std::map<CoordName, Expr>& target_map,
              const Form& w);

// Differential form with values in an exterior power of R^(n+k): one scalar
// form per strictly increasing value multi-index. Value slots 0..n-1 are the
// base directions r_1..r_n, slots n..n+k-1 the fiber directions s_1..s_k.
class VVForm {
 public:
  VVForm(CoordSystem system, int value_dim, int form_degree, int value_degree);
  static VVForm scalar_one(CoordSystem system, int value_dim);  // identity for the wedge

  int form_degree() const { return form_degree_; }
  int value_degree() const { return value_degree_; }
  int value_dim() const { return value_dim_; }
  const CoordSystem& system() const { return system_; }
  bool is_zero() const { return terms_.empty(); }

  using Key = std::pair<std::vector<int>, std::vector<int>>;  // (form idx, value idx)
  const std::map<Key, Expr>& terms() const { return terms_; }

  void add_term(std::vector<int> form_idx, std::vector<int> value_idx, const Expr& coeff);
  Expr coefficient(std::vector<int> form_idx, std::vector<int> value_idx) const;
  // Scalar form attached to one increasing value multi-index.
  Form value_component(const std::vector<int>& value_idx) const;

  VVForm operator-() const;
  friend VVForm operator+(const VVForm& a, const VVForm& b);
  friend VVForm operator-(const VVForm& a, const VVForm& b);
  VVForm scaled(const Expr& s) const;
  friend bool operator==(const VVForm& a, const VVForm& b);

  std::string str() const;

 private:
  CoordSystem system_;
  int value_dim_, form_degree_, value_degree_;
  std::map<Key, Expr> terms_;
};

// Graded wedge on both the form part and the value part.
VVForm vv_wedge(const VVForm& a, const VVForm& b);
VVForm vv_power(const VVForm& w, int m);  // m >= 0; m = 0 gives scalar_one
VVForm vv_exterior_derivative(const VVForm& w);
VVForm vv_interior_product(const GenericField& v, const VVForm& w);
// Pair against an element of the dual exterior power, given by coefficients
// over strictly increasing value multi-indices; missing entries count as 0.
Form vv_pair(const VVForm& w, const std::map<std::vector<int>, Expr>& dual);

}  // namespace vertframe
