#include "lobj/types.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace lobj {

TypePtr tconst(std::string name) {
  return std::make_shared<Type>(Type{TConst{std::move(name)}});
}

TypePtr tarrow(TypePtr dom, TypePtr cod) {
  return std::make_shared<Type>(Type{TArrow{std::move(dom), std::move(cod)}});
}

TypePtr tvar(std::string name, NameSet plus) {
  return std::make_shared<Type>(Type{TVar{std::move(name), std::move(plus)}});
}

TypePtr tobj(Flavor flavor, std::string binder, Row row, NameSet plus) {
  return std::make_shared<Type>(
      Type{TObj{flavor, std::move(binder), std::move(row), std::move(plus)}});
}

const TConst* as_tconst(const TypePtr& t) { return std::get_if<TConst>(&t->node); }
const TArrow* as_tarrow(const TypePtr& t) { return std::get_if<TArrow>(&t->node); }
const TVar* as_tvar(const TypePtr& t) { return std::get_if<TVar>(&t->node); }
const TObj* as_tobj(const TypePtr& t) { return std::get_if<TObj>(&t->node); }

bool is_object_type(const TypePtr& t) {
  return as_tvar(t) != nullptr || as_tobj(t) != nullptr;
}

static void ftv_into(const TypePtr& t, NameSet& bound, NameSet& out) {
  if (as_tconst(t)) return;
  if (auto* a = as_tarrow(t)) {
    ftv_into(a->dom, bound, out);
    ftv_into(a->cod, bound, out);
    return;
  }
  if (auto* v = as_tvar(t)) {
    if (!bound.count(v->name)) out.insert(v->name);
    return;
  }
  auto* o = as_tobj(t);
  bool added = bound.insert(o->binder).second;
  for (auto& [label, ty] : o->row) ftv_into(ty, bound, out);
  if (added) bound.erase(o->binder);
}

NameSet ftv(const TypePtr& t) {
  NameSet bound, out;
  ftv_into(t, bound, out);
  return out;
}

NameSet meth(const Row& row) {
  NameSet out;
  for (auto& [label, ty] : row) out.insert(label);
  return out;
}

static void mentions_into(const std::string& name, const TypePtr& t, NameSet& out) {
  if (as_tconst(t)) return;
  if (auto* a = as_tarrow(t)) {
    mentions_into(name, a->dom, out);
    mentions_into(name, a->cod, out);
    return;
  }
  if (auto* v = as_tvar(t)) {
    if (v->name == name) out.insert(v->plus.begin(), v->plus.end());
    return;
  }
  auto* o = as_tobj(t);
  if (o->binder == name) return;
  for (auto& [label, ty] : o->row) mentions_into(name, ty, out);
}

NameSet plus_mentions(const std::string& name, const TypePtr& t) {
  NameSet out;
  mentions_into(name, t, out);
  return out;
}

TypePtr plus_extend(const TypePtr& t, const NameSet& extra) {
  if (extra.empty()) return t;
  if (auto* v = as_tvar(t)) {
    NameSet merged = v->plus;
    merged.insert(extra.begin(), extra.end());
    return tvar(v->name, std::move(merged));
  }
  if (auto* o = as_tobj(t)) {
    NameSet merged = o->plus;
    merged.insert(extra.begin(), extra.end());
    return tobj(o->flavor, o->binder, o->row, std::move(merged));
  }
  throw std::logic_error("plus_extend applied to a non-object type");
}

TypePtr subst_type(const TypePtr& sigma, const std::string& name,
                   const TypePtr& tau) {
  if (as_tconst(sigma)) return sigma;
  if (auto* a = as_tarrow(sigma)) {
    TypePtr d = subst_type(a->dom, name, tau);
    TypePtr c = subst_type(a->cod, name, tau);
    if (d == a->dom && c == a->cod) return sigma;
    return tarrow(std::move(d), std::move(c));
  }
  if (auto* v = as_tvar(sigma)) {
    if (v->name != name) return sigma;
    return plus_extend(tau, v->plus);
  }
  auto* o = as_tobj(sigma);
  if (o->binder == name) return sigma;
  std::string binder = o->binder;
  Row row = o->row;
  NameSet tau_free = ftv(tau);
  if (tau_free.count(binder)) {
    bool used = false;
    for (auto& [label, ty] : row)
      if (plus_mentions(name, ty).size() || ftv(ty).count(name)) used = true;
    if (used) {
      NameSet avoid = tau_free;
      avoid.insert(name);
      for (auto& [label, ty] : row) {
        NameSet f = ftv(ty);
        avoid.insert(f.begin(), f.end());
      }
      std::string fresh = fresh_name(binder, avoid);
      TypePtr fresh_var = tvar(fresh);
      for (auto& [label, ty] : row) ty = subst_type(ty, binder, fresh_var);
      binder = fresh;
    } else {
      return sigma;
    }
  }
  bool changed = binder != o->binder;
  for (auto& [label, ty] : row) {
    TypePtr next = subst_type(ty, name, tau);
    if (next != ty) changed = true;
    ty = next;
  }
  if (!changed) return sigma;
  return tobj(o->flavor, std::move(binder), std::move(row), o->plus);
}

namespace {

void canon_into(const TypePtr& t, std::vector<std::string>& binders,
                std::ostream& os) {
  if (auto* c = as_tconst(t)) {
    os << "k:" << c->name;
    return;
  }
  if (auto* a = as_tarrow(t)) {
    os << "(";
    canon_into(a->dom, binders, os);
    os << "->";
    canon_into(a->cod, binders, os);
    os << ")";
    return;
  }
  if (auto* v = as_tvar(t)) {
    bool found = false;
    for (size_t i = binders.size(); i-- > 0;) {
      if (binders[i] == v->name) {
        os << "#" << (binders.size() - 1 - i);
        found = true;
        break;
      }
    }
    if (!found) os << "!" << v->name;
    os << "+{";
    bool first = true;
    for (auto& m : v->plus) {
      if (!first) os << ",";
      os << m;
      first = false;
    }
    os << "}";
    return;
  }
  auto* o = as_tobj(t);
  os << (o->flavor == Flavor::Pro ? "pro" : "obj") << ".<";
  binders.push_back(o->binder);
  bool first = true;
  for (auto& [label, ty] : o->row) {
    if (!first) os << ",";
    os << label << ":";
    canon_into(ty, binders, os);
    first = false;
  }
  binders.pop_back();
  os << ">+{";
  first = true;
  for (auto& m : o->plus) {
    if (!first) os << ",";
    os << m;
    first = false;
  }
  os << "}";
}

}  // namespace

std::string canon_type(const TypePtr& t) {
  std::ostringstream os;
  std::vector<std::string> binders;
  canon_into(t, binders, os);
  return os.str();
}

bool alpha_eq_type(const TypePtr& a, const TypePtr& b) {
  if (a == b) return true;
  return canon_type(a) == canon_type(b);
}

std::string fresh_name(const std::string& base, const NameSet& avoid) {
  std::string stem = base;
  while (!stem.empty() && stem.back() == '\'') stem.pop_back();
  if (stem.empty()) stem = "x";
  std::string cand = stem;
  while (avoid.count(cand)) cand += '\'';
  return cand;
}

}  // namespace lobj
