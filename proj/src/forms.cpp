#include "vertframe/forms.hpp"

#include <algorithm>
#include <optional>
#include <stdexcept>

namespace vertframe {

namespace {

void require_same_system(const CoordSystem& a, const CoordSystem& b, const char* what) {
  if (!(a.coords == b.coords))
    throw std::invalid_argument(std::string(what) + ": coordinate systems differ");
}

// Sort indices, tracking permutation parity; nullopt when an index repeats.
std::optional<std::pair<std::vector<int>, int>> sort_with_sign(std::vector<int> idx) {
  int sign = 1;
  for (size_t i = 1; i < idx.size(); ++i)
    for (size_t j = i; j > 0 && idx[j] < idx[j - 1]; --j) {
      std::swap(idx[j], idx[j - 1]);
      sign = -sign;
    }
  for (size_t i = 1; i < idx.size(); ++i)
    if (idx[i] == idx[i - 1]) return std::nullopt;
  return std::make_pair(std::move(idx), sign);
}

// Merge two strictly increasing tuples, tracking parity; nullopt on overlap.
std::optional<std::pair<std::vector<int>, int>> merge_with_sign(const std::vector<int>& a,
                                                                const std::vector<int>& b) {
  std::vector<int> out;
  out.reserve(a.size() + b.size());
  int sign = 1;
  size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i] < b[j])) {
      out.push_back(a[i++]);
    } else if (i == a.size() || b[j] < a[i]) {
      // b[j] jumps over the remaining entries of a
      if ((a.size() - i) % 2 == 1) sign = -sign;
      out.push_back(b[j++]);
    } else {
      return std::nullopt;
    }
  }
  return std::make_pair(std::move(out), sign);
}

}  // namespace

// ---------------------------------------------------------------------------
// GenericField

GenericField::GenericField(CoordSystem system)
    : system_(std::move(system)), comps_(size_t(system_.dim())) {}

GenericField::GenericField(CoordSystem system, std::vector<Expr> comps)
    : system_(std::move(system)), comps_(std::move(comps)) {
  if (comps_.size() != size_t(system_.dim()))
    throw std::invalid_argument("field component count does not match system");
}

void GenericField::set_comp(const CoordName& c, Expr e) {
  comps_.at(size_t(system_.require(c))) = std::move(e);
}

bool GenericField::is_zero() const {
  return std::all_of(comps_.begin(), comps_.end(), [](const Expr& e) { return e.is_zero(); });
}

Expr GenericField::apply(const Expr& f) const {
  Expr out;
  for (int idx = 0; idx < dim(); ++idx) {
    if (comps_[size_t(idx)].is_zero()) continue;
    out += comps_[size_t(idx)] * f.derivative(system_.at(idx));
  }
  return out;
}

bool operator==(const GenericField& v, const GenericField& w) {
  return v.system_.coords == w.system_.coords && v.comps_ == w.comps_;
}

GenericField lie_bracket(const GenericField& v, const GenericField& w) {
  require_same_system(v.system(), w.system(), "lie_bracket");
  GenericField out(v.system());
  for (int idx = 0; idx < v.dim(); ++idx)
    out.set_comp(idx, v.apply(w.comp(idx)) - w.apply(v.comp(idx)));
  return out;
}

// ---------------------------------------------------------------------------
// Form

Form::Form(CoordSystem system, int degree) : system_(std::move(system)), degree_(degree) {
  if (degree < 0) throw std::invalid_argument("negative form degree");
}

Form Form::function(CoordSystem system, Expr f) {
  Form out(std::move(system), 0);
  out.add_term({}, f);
  return out;
}

Form Form::differential(const CoordSystem& system, const CoordName& c) {
  Form out(system, 1);
  out.add_term({system.require(c)}, Expr(1));
  return out;
}

void Form::add_term(std::vector<int> indices, const Expr& coeff) {
  if (indices.size() != size_t(degree_))
    throw std::invalid_argument("index count does not match form degree");
  for (int idx : indices)
    if (idx < 0 || idx >= system_.dim()) throw std::out_of_range("form index out of range");
  if (coeff.is_zero()) return;
  auto sorted = sort_with_sign(std::move(indices));
  if (!sorted) return;
  auto& [key, sign] = *sorted;
  Expr add = sign > 0 ? coeff : -coeff;
  auto it = terms_.find(key);
  if (it == terms_.end()) {
    terms_.emplace(std::move(key), std::move(add));
  } else {
    it->second += add;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

Expr Form::coefficient(std::vector<int> indices) const {
  auto sorted = sort_with_sign(std::move(indices));
  if (!sorted) return Expr();
  auto it = terms_.find(sorted->first);
  if (it == terms_.end()) return Expr();
  return sorted->second > 0 ? it->second : -it->second;
}

Form Form::operator-() const {
  Form out(system_, degree_);
  for (const auto& [key, c] : terms_) out.terms_.emplace(key, -c);
  return out;
}

Form operator+(const Form& a, const Form& b) {
  require_same_system(a.system_, b.system_, "form sum");
  if (a.degree_ != b.degree_) throw std::invalid_argument("form degrees differ in sum");
  Form out = a;
  for (const auto& [key, c] : b.terms_) out.add_term(key, c);
  return out;
}

Form operator-(const Form& a, const Form& b) {
  return a + (-b);
}

Form Form::scaled(const Expr& s) const {
  Form out(system_, degree_);
  if (s.is_zero()) return out;
  for (const auto& [key, c] : terms_) out.add_term(key, c * s);
  return out;
}

bool operator==(const Form& a, const Form& b) {
  return a.degree_ == b.degree_ && a.system_.coords == b.system_.coords &&
         a.terms_ == b.terms_;
}

std::string Form::str() const {
  if (terms_.empty()) return "0";
  std::string out;
  for (const auto& [key, c] : terms_) {
    if (!out.empty()) out += " + ";
    out += "(" + c.str() + ")";
    for (int idx : key) out += " d" + system_.at(idx).str();
  }
  return out;
}

Form wedge(const Form& a, const Form& b) {
  require_same_system(a.system(), b.system(), "wedge");
  Form out(a.system(), a.degree() + b.degree());
  for (const auto& [ka, ca] : a.terms())
    for (const auto& [kb, cb] : b.terms()) {
      auto merged = merge_with_sign(ka, kb);
      if (!merged) continue;
      Expr c = ca * cb;
      out.add_term(merged->first, merged->second > 0 ? c : -c);
    }
  return out;
}

Form exterior_derivative(const Form& w) {
  Form out(w.system(), w.degree() + 1);
  for (const auto& [key, c] : w.terms())
    for (int idx = 0; idx < w.system().dim(); ++idx) {
      Expr dc = c.derivative(w.system().at(idx));
      if (dc.is_zero()) continue;
      std::vector<int> extended;
      extended.reserve(key.size() + 1);
      extended.push_back(idx);
      extended.insert(extended.end(), key.begin(), key.end());
      out.add_term(std::move(extended), dc);
    }
  return out;
}

Form interior_product(const GenericField& v, const Form& w) {
  require_same_system(v.system(), w.system(), "interior product");
  if (w.degree() == 0) throw std::invalid_argument("interior product of a 0-form");
  Form out(w.system(), w.degree() - 1);
  for (const auto& [key, c] : w.terms())
    for (size_t t = 0; t < key.size(); ++t) {
      const Expr& vc = v.comp(key[t]);
      if (vc.is_zero()) continue;
      std::vector<int> rest;
      rest.reserve(key.size() - 1);
      for (size_t u = 0; u < key.size(); ++u)
        if (u != t) rest.push_back(key[u]);
      Expr contribution = vc * c;
      out.add_term(std::move(rest), t % 2 == 0 ? contribution : -contribution);
    }
  return out;
}

Form pullback(const CoordSystem& source, const std::map<CoordName, Expr>& target_map,
              const Form& w) {
  // Differential of each mapped target coordinate as a 1-form on the source;
  // unmapped coordinates must be shared between the systems.
  auto source_differential = [&](const CoordName& target_coord) {
    Form d(source, 1);
    auto it = target_map.find(target_coord);
    if (it == target_map.end()) {
      d.add_term({source.require(target_coord)}, Expr(1));
      return d;
    }
    for (int idx = 0; idx < source.dim(); ++idx) {
      Expr partial = it->second.derivative(source.at(idx));
      if (!partial.is_zero()) d.add_term({idx}, partial);
    }
    return d;
  };

  std::map<CoordName, Expr> substitution;
  for (const auto& [c, e] : target_map) substitution.emplace(c, e);

  Form out(source, w.degree());
  for (const auto& [key, c] : w.terms()) {
    Form partial = Form::function(source, c.substitute(substitution));
    for (int idx : key) partial = wedge(partial, source_differential(w.system().at(idx)));
    out = out + partial;
  }
  return out;
}

// ---------------------------------------------------------------------------
// VVForm

VVForm::VVForm(CoordSystem system, int value_dim, int form_degree, int value_degree)
    : system_(std::move(system)),
      value_dim_(value_dim),
      form_degree_(form_degree),
      value_degree_(value_degree) {
  if (value_dim < 1) throw std::invalid_argument("value dimension must be >= 1");
  if (form_degree < 0 || value_degree < 0) throw std::invalid_argument("negative degree");
}

VVForm VVForm::scalar_one(CoordSystem system, int value_dim) {
  VVForm out(std::move(system), value_dim, 0, 0);
  out.add_term({}, {}, Expr(1));
  return out;
}

void VVForm::add_term(std::vector<int> form_idx, std::vector<int> value_idx,
                      const Expr& coeff) {
  if (form_idx.size() != size_t(form_degree_) || value_idx.size() != size_t(value_degree_))
    throw std::invalid_argument("index count does not match degrees");
  for (int idx : form_idx)
    if (idx < 0 || idx >= system_.dim()) throw std::out_of_range("form index out of range");
  for (int idx : value_idx)
    if (idx < 0 || idx >= value_dim_) throw std::out_of_range("value index out of range");
  if (coeff.is_zero()) return;
  auto fs = sort_with_sign(std::move(form_idx));
  if (!fs) return;
  auto vs = sort_with_sign(std::move(value_idx));
  if (!vs) return;
  Key key{std::move(fs->first), std::move(vs->first)};
  Expr add = fs->second * vs->second > 0 ? coeff : -coeff;
  auto it = terms_.find(key);
  if (it == terms_.end()) {
    terms_.emplace(std::move(key), std::move(add));
  } else {
    it->second += add;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

Expr VVForm::coefficient(std::vector<int> form_idx, std::vector<int> value_idx) const {
  auto fs = sort_with_sign(std::move(form_idx));
  auto vs = sort_with_sign(std::move(value_idx));
  if (!fs || !vs) return Expr();
  auto it = terms_.find(Key{fs->first, vs->first});
  if (it == terms_.end()) return Expr();
  return fs->second * vs->second > 0 ? it->second : -it->second;
}

Form VVForm::value_component(const std::vector<int>& value_idx) const {
  Form out(system_, form_degree_);
  auto vs = sort_with_sign(value_idx);
  if (!vs) return out;
  for (const auto& [key, c] : terms_)
    if (key.second == vs->first) out.add_term(key.first, vs->second > 0 ? c : -c);
  return out;
}

VVForm VVForm::operator-() const {
  VVForm out(system_, value_dim_, form_degree_, value_degree_);
  for (const auto& [key, c] : terms_) out.terms_.emplace(key, -c);
  return out;
}

VVForm operator+(const VVForm& a, const VVForm& b) {
  require_same_system(a.system_, b.system_, "vv sum");
  if (a.form_degree_ != b.form_degree_ || a.value_degree_ != b.value_degree_ ||
      a.value_dim_ != b.value_dim_)
    throw std::invalid_argument("vv-form degrees differ in sum");
  VVForm out = a;
  for (const auto& [key, c] : b.terms_) out.add_term(key.first, key.second, c);
  return out;
}

VVForm operator-(const VVForm& a, const VVForm& b) {
  return a + (-b);
}

VVForm VVForm::scaled(const Expr& s) const {
  VVForm out(system_, value_dim_, form_degree_, value_degree_);
  if (s.is_zero()) return out;
  for (const auto& [key, c] : terms_) out.add_term(key.first, key.second, c * s);
  return out;
}

bool operator==(const VVForm& a, const VVForm& b) {
  return a.form_degree_ == b.form_degree_ && a.value_degree_ == b.value_degree_ &&
         a.value_dim_ == b.value_dim_ && a.system_.coords == b.system_.coords &&
         a.terms_ == b.terms_;
}

std::string VVForm::str() const {
  if (terms_.empty()) return "0";
  std::string out;
  for (const auto& [key, c] : terms_) {
    if (!out.empty()) out += " + ";
    out += "(" + c.str() + ")";
    for (int idx : key.first) out += " d" + system_.at(idx).str();
    for (int idx : key.second) out += " e" + std::to_string(idx + 1);
  }
  return out;
}

VVForm vv_wedge(const VVForm& a, const VVForm& b) {
  require_same_system(a.system(), b.system(), "vv wedge");
  if (a.value_dim() != b.value_dim())
    throw std::invalid_argument("vv wedge: value dimensions differ");
  if (a.value_degree() + b.value_degree() > a.value_dim())
    throw std::invalid_argument("vv wedge: value degree overflow");
  VVForm out(a.system(), a.value_dim(), a.form_degree() + b.form_degree(),
             a.value_degree() + b.value_degree());
  for (const auto& [ka, ca] : a.terms())
    for (const auto& [kb, cb] : b.terms()) {
      auto fm = merge_with_sign(ka.first, kb.first);
      if (!fm) continue;
      auto vm = merge_with_sign(ka.second, kb.second);
      if (!vm) continue;
      Expr c = ca * cb;
      out.add_term(fm->first, vm->first, fm->second * vm->second > 0 ? c : -c);
    }
  return out;
}

VVForm vv_power(const VVForm& w, int m) {
  if (m < 0) throw std::invalid_argument("negative wedge power");
  VVForm out = VVForm::scalar_one(w.system(), w.value_dim());
  for (int step = 0; step < m; ++step) out = vv_wedge(out, w);
  return out;
}

VVForm vv_exterior_derivative(const VVForm& w) {
  VVForm out(w.system(), w.value_dim(), w.form_degree() + 1, w.value_degree());
  for (const auto& [key, c] : w.terms())
    for (int idx = 0; idx < w.system().dim(); ++idx) {
      Expr dc = c.derivative(w.system().at(idx));
      if (dc.is_zero()) continue;
      std::vector<int> extended;
      extended.reserve(key.first.size() + 1);
      extended.push_back(idx);
      extended.insert(extended.end(), key.first.begin(), key.first.end());
      out.add_term(std::move(extended), key.second, dc);
    }
  return out;
}

VVForm vv_interior_product(const GenericField& v, const VVForm& w) {
  require_same_system(v.system(), w.system(), "vv interior product");
  if (w.form_degree() == 0)
    throw std::invalid_argument("interior product of a form-degree-0 input");
  VVForm out(w.system(), w.value_dim(), w.form_degree() - 1, w.value_degree());
  for (const auto& [key, c] : w.terms())
    for (size_t t = 0; t < key.first.size(); ++t) {
      const Expr& vc = v.comp(key.first[t]);
      if (vc.is_zero()) continue;
      std::vector<int> rest;
      rest.reserve(key.first.size() - 1);
      for (size_t u = 0; u < key.first.size(); ++u)
        if (u != t) rest.push_back(key.first[u]);
      Expr contribution = vc * c;
      out.add_term(std::move(rest), key.second, t % 2 == 0 ? contribution : -contribution);
    }
  return out;
}

Form vv_pair(const VVForm& w, const std::map<std::vector<int>, Expr>& dual) {
  Form out(w.system(), w.form_degree());
  for (const auto& [key, c] : w.terms()) {
    auto it = dual.find(key.second);
    if (it == dual.end()) continue;
    out.add_term(key.first, c * it->second);
  }
  return out;
}

}  // namespace vertframe
