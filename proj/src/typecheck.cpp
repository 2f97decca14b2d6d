#include "lobj/typecheck.hpp"

#include <algorithm>
#include <cctype>

#include "lobj/parser.hpp"

namespace lobj {

const char* err_kind_name(ErrKind k) {
  switch (k) {
    case ErrKind::UnknownVar: return "UnknownVar";
    case ErrKind::UnknownMethod: return "UnknownMethod";
    case ErrKind::RowMismatch: return "RowMismatch";
    case ErrKind::NotMatching: return "NotMatching";
    case ErrKind::NotRigid: return "NotRigid";
    case ErrKind::NotCovariant: return "NotCovariant";
    case ErrKind::DuplicateLabel: return "DuplicateLabel";
    case ErrKind::IllFormedType: return "IllFormedType";
    case ErrKind::AnnotationRequired: return "AnnotationRequired";
    case ErrKind::ArityOrForm: return "ArityOrForm";
  }
  return "?";
}

const TypePtr* Ctx::lookup_var(const std::string& name) const {
  for (auto it = entries_.rbegin(); it != entries_.rend(); ++it)
    if (auto* v = std::get_if<VarBind>(&*it))
      if (v->name == name) return &v->type;
  return nullptr;
}

const TypePtr* Ctx::lookup_bound(const std::string& name) const {
  for (auto it = entries_.rbegin(); it != entries_.rend(); ++it)
    if (auto* m = std::get_if<MatchBind>(&*it))
      if (m->name == name) return &m->bound;
  return nullptr;
}

bool Ctx::has(const std::string& name) const {
  return lookup_var(name) || lookup_bound(name);
}

NameSet Ctx::domain() const {
  NameSet out;
  for (auto& e : entries_) {
    if (auto* v = std::get_if<VarBind>(&e)) out.insert(v->name);
    else out.insert(std::get<MatchBind>(e).name);
  }
  return out;
}

namespace {

bool cov(const std::string& tname, const TypePtr& t, bool pos) {
  if (as_tconst(t)) return true;
  if (auto* a = as_tarrow(t))
    return cov(tname, a->dom, !pos) && cov(tname, a->cod, pos);
  if (auto* v = as_tvar(t)) return v->name != tname || pos;
  auto* o = as_tobj(t);
  if (o->binder == tname) return true;
  for (auto& [label, ty] : o->row)
    if (!cov(tname, ty, pos)) return false;
  return true;
}

Row rename_row(const Row& row, const std::string& from, const std::string& to) {
  if (from == to) return row;
  Row out;
  TypePtr v = tvar(to);
  for (auto& [label, ty] : row) out.emplace(label, subst_type(ty, from, v));
  return out;
}

bool subset(const NameSet& a, const NameSet& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

}  // namespace

bool covariant_in(const std::string& tname, const TypePtr& sigma) {
  return cov(tname, sigma, true);
}

void Checker::kind_T(const Ctx& ctx, const TypePtr& t) const {
  if (auto* c = as_tconst(t)) {
    if (!sig_.iota.count(c->name))
      throw TypeError(ErrKind::IllFormedType, "Type-Const",
                      "unknown base type '" + c->name + "'", {});
    return;
  }
  if (auto* a = as_tarrow(t)) {
    kind_T(ctx, a->dom);
    kind_T(ctx, a->cod);
    return;
  }
  if (auto* v = as_tvar(t)) {
    const TypePtr* bound = ctx.lookup_bound(v->name);
    if (!bound)
      throw TypeError(ErrKind::IllFormedType, "Cont-t",
                      "unbound type variable '" + v->name + "'", {});
    const TObj* b = as_tobj(*bound);
    if (!subset(v->plus, meth(b->row)))
      throw TypeError(ErrKind::UnknownMethod, "Type-Extend",
                      "activated method missing from the row of '" + v->name +
                          "'",
                      {});
    return;
  }
  auto* o = as_tobj(t);
  if (o->flavor == Flavor::Obj && mode_ == SystemMode::Plain)
    throw TypeError(ErrKind::IllFormedType, "Type-Obj",
                    "obj types are not part of the plain system", {});
  NameSet labels = meth(o->row);
  if (!subset(o->plus, labels))
    throw TypeError(ErrKind::UnknownMethod, "Type-Extend",
                    "activated method missing from the row", {});
  // Admissible ordering: a method may be added only after the methods its
  // type activates on the self variable.
  NameSet placed;
  NameSet pending = labels;
  while (!pending.empty()) {
    bool progress = false;
    for (auto it = pending.begin(); it != pending.end();) {
      NameSet needs = plus_mentions(o->binder, o->row.at(*it));
      if (!subset(needs, labels))
        throw TypeError(ErrKind::IllFormedType, "Type-Pro",
                        "method '" + *it +
                            "' activates a method outside the row",
                        {});
      if (subset(needs, placed)) {
        placed.insert(*it);
        it = pending.erase(it);
        progress = true;
      } else {
        ++it;
      }
    }
    if (!progress)
      throw TypeError(ErrKind::IllFormedType, "Type-Pro",
                      "no admissible ordering for the row's methods", {});
  }
  // Kind each entry under the row's self bound.
  std::string binder = o->binder;
  Row row = o->row;
  if (ctx.has(binder)) {
    NameSet avoid = ctx.domain();
    for (auto& [label, ty] : row) {
      NameSet f = ftv(ty);
      avoid.insert(f.begin(), f.end());
    }
    std::string fresh = fresh_name(binder, avoid);
    row = rename_row(row, binder, fresh);
    binder = fresh;
  }
  Ctx inner = ctx;
  inner.push(MatchBind{binder, tobj(Flavor::Pro, binder, row, {})});
  for (auto& [label, ty] : row) kind_T(inner, ty);
}

bool Checker::is_kinded(const Ctx& ctx, const TypePtr& t) const {
  try {
    kind_T(ctx, t);
    return true;
  } catch (const TypeError&) {
    return false;
  }
}

void Checker::kind_rigid(const Ctx& ctx, const TypePtr& t) const {
  if (as_tconst(t)) return;
  if (auto* a = as_tarrow(t)) {
    kind_T(ctx, a->dom);
    kind_rigid(ctx, a->cod);
    return;
  }
  if (auto* v = as_tvar(t)) {
    const TypePtr* bound = ctx.lookup_bound(v->name);
    if (!bound)
      throw TypeError(ErrKind::IllFormedType, "Cont-t",
                      "unbound type variable '" + v->name + "'", {});
    const TObj* b = as_tobj(*bound);
    if (b->flavor != Flavor::Obj)
      throw TypeError(ErrKind::NotRigid, "Type-Var-Obj",
                      "'" + v->name + "' is bounded by a pro type", {});
    for (auto& [label, ty] : b->row)
      if (!covariant_in(v->name, ty))
        throw TypeError(ErrKind::NotCovariant, "Type-Var-Obj",
                        "'" + v->name + "' occurs non-covariantly in its bound",
                        {});
    return;
  }
  auto* o = as_tobj(t);
  if (o->flavor == Flavor::Pro)
    throw TypeError(ErrKind::NotRigid, "Type-Obj-Rdg",
                    "pro types are never rigid", {});
  kind_T(ctx, t);
  std::string binder = o->binder;
  Row row = o->row;
  if (ctx.has(binder)) {
    NameSet avoid = ctx.domain();
    for (auto& [label, ty] : row) {
      NameSet f = ftv(ty);
      avoid.insert(f.begin(), f.end());
    }
    std::string fresh = fresh_name(binder, avoid);
    row = rename_row(row, binder, fresh);
    binder = fresh;
  }
  Ctx inner = ctx;
  inner.push(MatchBind{binder, tobj(Flavor::Obj, binder, row, o->plus)});
  for (auto& [label, ty] : row) {
    if (!covariant_in(binder, ty))
      throw TypeError(ErrKind::NotCovariant, "Type-Obj-Rdg",
                      "self type occurs non-covariantly in method '" + label +
                          "'",
                      {});
    kind_rigid(inner, ty);
  }
}

bool Checker::is_rigid(const Ctx& ctx, const TypePtr& t) const {
  try {
    kind_rigid(ctx, t);
    return true;
  } catch (const TypeError&) {
    return false;
  }
}

bool Checker::matches(const Ctx& ctx, const TypePtr& a, const TypePtr& b) const {
  if (mode_ == SystemMode::Sub) {
    if (auto* ca = as_tconst(a)) {
      auto* cb = as_tconst(b);
      return cb && ca->name == cb->name;
    }
    if (auto* aa = as_tarrow(a)) {
      auto* ab = as_tarrow(b);
      return ab && matches(ctx, ab->dom, aa->dom) &&
             matches(ctx, aa->cod, ab->cod) && is_rigid(ctx, aa->dom);
    }
  }
  if (auto* va = as_tvar(a)) {
    if (auto* vb = as_tvar(b))
      return va->name == vb->name && subset(vb->plus, va->plus);
    const TypePtr* bound = ctx.lookup_bound(va->name);
    if (!bound) return false;
    return matches(ctx, plus_extend(*bound, va->plus), b);
  }
  auto* oa = as_tobj(a);
  auto* ob = as_tobj(b);
  if (!oa || !ob) return false;
  if (oa->flavor == Flavor::Pro && ob->flavor == Flavor::Obj &&
      mode_ != SystemMode::Sub)
    return false;
  if (oa->flavor == Flavor::Obj &&
      (ob->flavor == Flavor::Pro || mode_ != SystemMode::Sub))
    return false;
  if (!subset(ob->plus, oa->plus)) return false;
  NameSet avoid = ctx.domain();
  for (auto& [label, ty] : oa->row) {
    NameSet f = ftv(ty);
    avoid.insert(f.begin(), f.end());
  }
  for (auto& [label, ty] : ob->row) {
    NameSet f = ftv(ty);
    avoid.insert(f.begin(), f.end());
  }
  avoid.insert(oa->binder);
  avoid.insert(ob->binder);
  std::string u = fresh_name("t", avoid);
  Row ra = rename_row(oa->row, oa->binder, u);
  Row rb = rename_row(ob->row, ob->binder, u);
  for (auto& [label, ty] : rb) {
    auto it = ra.find(label);
    if (it == ra.end() || !alpha_eq_type(it->second, ty)) return false;
  }
  return true;
}

struct Checker::Resolved {
  Flavor flavor;
  std::string binder;
  Row row;        // entries reference binder
  NameSet avail;
  TypePtr type;   // the receiver type itself
};

Checker::Resolved Checker::resolve_object(const Ctx& ctx, const TypePtr& t,
                                          Span sp, const char* rule) const {
  if (auto* o = as_tobj(t))
    return Resolved{o->flavor, o->binder, o->row, o->plus, t};
  if (auto* v = as_tvar(t)) {
    const TypePtr* bound = ctx.lookup_bound(v->name);
    if (!bound)
      throw TypeError(ErrKind::IllFormedType, "Cont-t",
                      "unbound type variable '" + v->name + "'", sp);
    const TObj* b = as_tobj(*bound);
    NameSet avail = b->plus;
    avail.insert(v->plus.begin(), v->plus.end());
    return Resolved{b->flavor, v->name, b->row, std::move(avail), t};
  }
  throw TypeError(ErrKind::ArityOrForm, rule,
                  "expected an object type, found " + pretty_type(t), sp);
}

std::pair<Ctx, std::string> Checker::open_bound(const Ctx& ctx,
                                                const Resolved& r,
                                                const NameSet& bound_plus) const {
  NameSet avoid = ctx.domain();
  for (auto& [label, ty] : r.row) {
    NameSet f = ftv(ty);
    avoid.insert(f.begin(), f.end());
  }
  avoid.erase(r.binder);
  std::string tv = ctx.has(r.binder) || avoid.count(r.binder)
                       ? fresh_name(r.binder, [&] {
                           NameSet a = avoid;
                           a.insert(r.binder);
                           return a;
                         }())
                       : r.binder;
  Row row = rename_row(r.row, r.binder, tv);
  Ctx out = ctx;
  out.push(MatchBind{tv, tobj(r.flavor, tv, std::move(row), bound_plus)});
  return {std::move(out), std::move(tv)};
}

bool Checker::pre_extend_ok(const Ctx& ctx, const TypePtr& from,
                            const TypePtr& to) const {
  auto* a = as_tobj(from);
  auto* b = as_tobj(to);
  if (!a || !b || a->flavor != Flavor::Pro || b->flavor != Flavor::Pro)
    return false;
  if (a->plus != b->plus) return false;
  NameSet avoid = ctx.domain();
  avoid.insert(a->binder);
  avoid.insert(b->binder);
  for (auto& [label, ty] : b->row) {
    NameSet f = ftv(ty);
    avoid.insert(f.begin(), f.end());
  }
  std::string u = fresh_name("t", avoid);
  Row ra = rename_row(a->row, a->binder, u);
  Row rb = rename_row(b->row, b->binder, u);
  for (auto& [label, ty] : ra) {
    auto it = rb.find(label);
    if (it == rb.end() || !alpha_eq_type(it->second, ty)) return false;
  }
  return is_kinded(ctx, to);
}

void Checker::compat(const Ctx& ctx, const TypePtr& found,
                     const TypePtr& expected, Span sp, const char* rule) const {
  if (alpha_eq_type(found, expected)) return;
  if (pre_extend_ok(ctx, found, expected)) return;
  if (mode_ == SystemMode::Sub && matches(ctx, found, expected)) {
    if (is_rigid(ctx, expected)) return;
    throw TypeError(ErrKind::NotRigid, "Subsume",
                    "matching holds but " + pretty_type(expected) +
                        " is not rigid",
                    sp);
  }
  throw TypeError(ErrKind::NotMatching, rule,
                  "found " + pretty_type(found) + ", required " +
                      pretty_type(expected),
                  sp);
}

namespace {

// Renames the parameter apart from the context when needed.
struct Bound {
  Ctx ctx;
  TermPtr body;
  std::string param;
};

Bound bind_var(const Ctx& ctx, const std::string& param, const TypePtr& ty,
               const TermPtr& body) {
  Bound out{ctx, body, param};
  if (ctx.has(param)) {
    NameSet avoid = ctx.domain();
    NameSet names = all_names(body);
    avoid.insert(names.begin(), names.end());
    out.param = fresh_name(param, avoid);
    out.body = subst_term(body, param, mk_var(out.param));
  }
  out.ctx.push(VarBind{out.param, ty});
  return out;
}

bool all_digits(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit((unsigned char)c)) return false;
  return true;
}

// Extensions layered on the rebuild's own parameter, outermost first:
// \s. prev <s <- n (: T) = body>.
std::vector<std::pair<std::string, TypePtr>> rebuild_spine_annots(
    const TermPtr& rebuild) {
  std::vector<std::pair<std::string, TypePtr>> out;
  TermPtr cur = rebuild;
  while (auto* l = as_lam(cur)) {
    auto* app = as_app(l->body);
    if (!app) break;
    auto* x = as_ext(app->arg);
    if (!x) break;
    auto* v = as_var(x->obj);
    if (!v || v->name != l->param) break;
    if (x->annot) out.emplace_back(x->method, x->annot);
    cur = app->fn;
  }
  return out;
}

}  // namespace

TypePtr Checker::infer(const Ctx& ctx, const TermPtr& e) const {
  if (auto* c = as_const(e)) {
    if (all_digits(c->lit)) return tconst("int");
    if (!c->lit.empty() && c->lit.front() == '"') return tconst("str");
    auto it = sig_.consts.find(c->lit);
    if (it != sig_.consts.end()) return it->second;
    throw TypeError(ErrKind::UnknownVar, "Const",
                    "unknown constant '" + c->lit + "'", e->span);
  }
  if (auto* v = as_var(e)) {
    if (const TypePtr* ty = ctx.lookup_var(v->name)) return *ty;
    throw TypeError(ErrKind::UnknownVar, "Var",
                    "unbound variable '" + v->name + "'", e->span);
  }
  if (auto* l = as_lam(e)) {
    if (!l->annot)
      throw TypeError(ErrKind::AnnotationRequired, "Abs",
                      "parameter '" + l->param +
                          "' needs a type annotation here",
                      e->span);
    kind_T(ctx, l->annot);
    Bound b = bind_var(ctx, l->param, l->annot, l->body);
    return tarrow(l->annot, infer(b.ctx, b.body));
  }
  if (auto* a = as_app(e)) {
    if (auto* l = as_lam(a->fn); l && !l->annot) {
      TypePtr arg_ty = infer(ctx, a->arg);
      Bound b = bind_var(ctx, l->param, arg_ty, l->body);
      return infer(b.ctx, b.body);
    }
    TypePtr fn_ty = infer(ctx, a->fn);
    auto* arr = as_tarrow(fn_ty);
    if (!arr)
      throw TypeError(ErrKind::ArityOrForm, "Appl",
                      "application of a non-function of type " +
                          pretty_type(fn_ty),
                      e->span);
    TypePtr arg_ty = infer(ctx, a->arg);
    compat(ctx, arg_ty, arr->dom, a->arg->span, "Appl");
    return arr->cod;
  }
  if (as_empty(e)) return tobj(Flavor::Pro, "t", {}, {});
  if (as_ext(e)) return type_ext(ctx, e, nullptr);
  if (auto* s = as_send(e)) {
    TypePtr recv = infer(ctx, s->obj);
    Resolved r = resolve_object(ctx, recv, e->span, "Send");
    if (!r.avail.count(s->method)) {
      bool reserved = r.row.count(s->method) != 0;
      throw TypeError(ErrKind::UnknownMethod, "Send",
                      reserved ? "method '" + s->method +
                                     "' is reserved but not available"
                               : "no method '" + s->method + "' in type " +
                                     pretty_type(recv),
                      e->span);
    }
    return subst_type(r.row.at(s->method), r.binder, recv);
  }
  if (auto* s = as_sel(e)) {
    TypePtr recv = infer(ctx, s->obj);
    // Annotations carried by the rebuild restore methods stripped from the
    // receiver, mirroring the width step the reduction took.
    auto spine = rebuild_spine_annots(s->rebuild);
    if (auto* lit = as_tobj(recv);
        lit && lit->flavor == Flavor::Pro && !spine.empty()) {
      Row row = lit->row;
      bool grew = false;
      for (auto& [m, ty] : spine)
        if (!row.count(m)) {
          row.emplace(m, ty);
          grew = true;
        }
      if (grew) {
        TypePtr widened = tobj(Flavor::Pro, lit->binder, std::move(row),
                               lit->plus);
        if (is_kinded(ctx, widened)) recv = widened;
      }
    }
    Resolved r = resolve_object(ctx, recv, e->span, "Select");
    if (!r.avail.count(s->method))
      throw TypeError(ErrKind::UnknownMethod, "Select",
                      "no available method '" + s->method + "' in type " +
                          pretty_type(recv),
                      e->span);
    TypePtr sigma = r.row.at(s->method);
    NameSet bound_plus = r.avail;
    bound_plus.insert(s->method);
    auto [inner, tv] = open_bound(ctx, r, bound_plus);
    auto* rl = as_lam(s->rebuild);
    if (!rl)
      throw TypeError(ErrKind::ArityOrForm, "Select",
                      "the rebuilding argument must be a lambda", e->span);
    if (rl->annot && !alpha_eq_type(rl->annot, tvar(tv)))
      throw TypeError(ErrKind::RowMismatch, "Select",
                      "rebuild parameter annotation must be the self type",
                      e->span);
    Bound b = bind_var(inner, rl->param, tvar(tv), rl->body);
    TypePtr res = infer(b.ctx, b.body);
    auto* rv = as_tvar(res);
    if (!rv || rv->name != tv)
      throw TypeError(ErrKind::NotMatching, "Select",
                      "rebuild must return the self type, found " +
                          pretty_type(res),
                      e->span);
    TypePtr sigma_tv =
        tv == r.binder ? sigma : subst_type(sigma, r.binder, tvar(tv));
    return subst_type(sigma_tv, tv, plus_extend(recv, rv->plus));
  }
  auto* asc = as_ascribe(e);
  kind_T(ctx, asc->type);
  TypePtr found = infer(ctx, asc->term);
  compat(ctx, found, asc->type, e->span, "Subsume");
  return asc->type;
}

// Extension with a method already listed in the receiver's row. The two
// extension rules share this shape and differ only in whether the result
// type records the mention; the bound activates every available method of
// the receiver plus the one being defined, the largest set the match
// premise admits.
TypePtr Checker::type_ext(const Ctx& ctx, const TermPtr& e,
                          const TypePtr* expected) const {
  auto* x = as_ext(e);
  TypePtr recv = infer(ctx, x->obj);
  Resolved r = resolve_object(ctx, recv, e->span, "Extend");
  if (!r.row.count(x->method)) {
    if (!x->annot)
      throw TypeError(ErrKind::AnnotationRequired, "Extend",
                      "fresh method '" + x->method +
                          "' needs a type annotation",
                      e->span);
    auto* lit = as_tobj(recv);
    if (!lit || lit->flavor != Flavor::Pro)
      throw TypeError(ErrKind::UnknownMethod, "Pre-Extend",
                      "cannot add fresh method '" + x->method +
                          "' through type " + pretty_type(recv),
                      e->span);
    Row row = lit->row;
    row.emplace(x->method, x->annot);
    TypePtr widened = tobj(Flavor::Pro, lit->binder, std::move(row),
                           lit->plus);
    kind_T(ctx, widened);
    recv = widened;
    r = resolve_object(ctx, recv, e->span, "Extend");
  } else if (x->annot && !alpha_eq_type(x->annot, r.row.at(x->method))) {
    throw TypeError(ErrKind::RowMismatch, "Extend",
                    "annotation for '" + x->method +
                        "' disagrees with the row entry " +
                        pretty_type(r.row.at(x->method)),
                    e->span);
  }
  TypePtr sigma = r.row.at(x->method);
  NameSet bound_plus = r.avail;
  bound_plus.insert(x->method);
  auto [inner, tv] = open_bound(ctx, r, bound_plus);
  TypePtr sigma_tv =
      tv == r.binder ? sigma : subst_type(sigma, r.binder, tvar(tv));
  check(inner, x->body, tarrow(tvar(tv), sigma_tv));
  TypePtr grown = plus_extend(recv, {x->method});
  // Redefinition of an available method may keep the receiver's type
  // unchanged; take that reading only when the context asks for it.
  if (expected && r.avail.count(x->method) &&
      !alpha_eq_type(grown, *expected) && alpha_eq_type(recv, *expected))
    return recv;
  return grown;
}

void Checker::check(const Ctx& ctx, const TermPtr& e,
                    const TypePtr& expected) const {
  if (auto* l = as_lam(e)) {
    auto* arr = as_tarrow(expected);
    if (!arr)
      throw TypeError(ErrKind::NotMatching, "Abs",
                      "a lambda cannot have type " + pretty_type(expected),
                      e->span);
    if (l->annot && !alpha_eq_type(l->annot, arr->dom))
      throw TypeError(ErrKind::NotMatching, "Abs",
                      "parameter annotation differs from expected domain " +
                          pretty_type(arr->dom),
                      e->span);
    Bound b = bind_var(ctx, l->param, arr->dom, l->body);
    check(b.ctx, b.body, arr->cod);
    return;
  }
  if (auto* a = as_app(e)) {
    if (auto* l = as_lam(a->fn); l && !l->annot) {
      TypePtr arg_ty = infer(ctx, a->arg);
      Bound b = bind_var(ctx, l->param, arg_ty, l->body);
      check(b.ctx, b.body, expected);
      return;
    }
  }
  TypePtr found =
      as_ext(e) ? type_ext(ctx, e, &expected) : infer(ctx, e);
  compat(ctx, found, expected, e->span, "Check");
}

}  // namespace lobj
