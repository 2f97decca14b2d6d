#include "lobj/syntax.hpp"

#include <sstream>
#include <vector>

namespace lobj {

TermPtr mk_const(std::string lit, Span sp) {
  return std::make_shared<Term>(Term{Const{std::move(lit)}, sp});
}
TermPtr mk_var(std::string name, Span sp) {
  return std::make_shared<Term>(Term{Var{std::move(name)}, sp});
}
TermPtr mk_lam(std::string param, TypePtr annot, TermPtr body, Span sp) {
  return std::make_shared<Term>(
      Term{Lam{std::move(param), std::move(annot), std::move(body)}, sp});
}
TermPtr mk_app(TermPtr fn, TermPtr arg, Span sp) {
  return std::make_shared<Term>(Term{App{std::move(fn), std::move(arg)}, sp});
}
TermPtr mk_empty(Span sp) { return std::make_shared<Term>(Term{Empty{}, sp}); }
TermPtr mk_ext(TermPtr obj, std::string method, TypePtr annot, TermPtr body,
               Span sp) {
  return std::make_shared<Term>(Term{
      Ext{std::move(obj), std::move(method), std::move(annot), std::move(body)},
      sp});
}
TermPtr mk_send(TermPtr obj, std::string method, Span sp) {
  return std::make_shared<Term>(Term{Send{std::move(obj), std::move(method)}, sp});
}
TermPtr mk_sel(TermPtr obj, std::string method, TermPtr rebuild, Span sp) {
  return std::make_shared<Term>(
      Term{Sel{std::move(obj), std::move(method), std::move(rebuild)}, sp});
}
TermPtr mk_ascribe(TermPtr term, TypePtr type, Span sp) {
  return std::make_shared<Term>(Term{Ascribe{std::move(term), std::move(type)}, sp});
}

const Const* as_const(const TermPtr& e) { return std::get_if<Const>(&e->node); }
const Var* as_var(const TermPtr& e) { return std::get_if<Var>(&e->node); }
const Lam* as_lam(const TermPtr& e) { return std::get_if<Lam>(&e->node); }
const App* as_app(const TermPtr& e) { return std::get_if<App>(&e->node); }
const Empty* as_empty(const TermPtr& e) { return std::get_if<Empty>(&e->node); }
const Ext* as_ext(const TermPtr& e) { return std::get_if<Ext>(&e->node); }
const Send* as_send(const TermPtr& e) { return std::get_if<Send>(&e->node); }
const Sel* as_sel(const TermPtr& e) { return std::get_if<Sel>(&e->node); }
const Ascribe* as_ascribe(const TermPtr& e) {
  return std::get_if<Ascribe>(&e->node);
}

static void fv_into(const TermPtr& e, NameSet& bound, NameSet& out) {
  if (as_const(e) || as_empty(e)) return;
  if (auto* v = as_var(e)) {
    if (!bound.count(v->name)) out.insert(v->name);
    return;
  }
  if (auto* l = as_lam(e)) {
    bool added = bound.insert(l->param).second;
    fv_into(l->body, bound, out);
    if (added) bound.erase(l->param);
    return;
  }
  if (auto* a = as_app(e)) {
    fv_into(a->fn, bound, out);
    fv_into(a->arg, bound, out);
    return;
  }
  if (auto* x = as_ext(e)) {
    fv_into(x->obj, bound, out);
    fv_into(x->body, bound, out);
    return;
  }
  if (auto* s = as_send(e)) {
    fv_into(s->obj, bound, out);
    return;
  }
  if (auto* s = as_sel(e)) {
    fv_into(s->obj, bound, out);
    fv_into(s->rebuild, bound, out);
    return;
  }
  fv_into(as_ascribe(e)->term, bound, out);
}

NameSet free_vars(const TermPtr& e) {
  NameSet bound, out;
  fv_into(e, bound, out);
  return out;
}

static void names_into(const TermPtr& e, NameSet& out) {
  if (as_const(e) || as_empty(e)) return;
  if (auto* v = as_var(e)) {
    out.insert(v->name);
    return;
  }
  if (auto* l = as_lam(e)) {
    out.insert(l->param);
    names_into(l->body, out);
    return;
  }
  if (auto* a = as_app(e)) {
    names_into(a->fn, out);
    names_into(a->arg, out);
    return;
  }
  if (auto* x = as_ext(e)) {
    names_into(x->obj, out);
    names_into(x->body, out);
    return;
  }
  if (auto* s = as_send(e)) {
    names_into(s->obj, out);
    return;
  }
  if (auto* s = as_sel(e)) {
    names_into(s->obj, out);
    names_into(s->rebuild, out);
    return;
  }
  names_into(as_ascribe(e)->term, out);
}

NameSet all_names(const TermPtr& e) {
  NameSet out;
  names_into(e, out);
  return out;
}

TermPtr subst_term(const TermPtr& e, const std::string& x, const TermPtr& v) {
  if (as_const(e) || as_empty(e)) return e;
  if (auto* var = as_var(e)) return var->name == x ? v : e;
  if (auto* l = as_lam(e)) {
    if (l->param == x) return e;
    NameSet body_free = free_vars(l->body);
    if (!body_free.count(x)) return e;
    NameSet v_free = free_vars(v);
    if (v_free.count(l->param)) {
      NameSet avoid = v_free;
      avoid.insert(body_free.begin(), body_free.end());
      avoid.insert(x);
      std::string p = fresh_name(l->param, avoid);
      TermPtr renamed = subst_term(l->body, l->param, mk_var(p));
      return mk_lam(p, l->annot, subst_term(renamed, x, v), e->span);
    }
    return mk_lam(l->param, l->annot, subst_term(l->body, x, v), e->span);
  }
  if (auto* a = as_app(e)) {
    TermPtr f = subst_term(a->fn, x, v);
    TermPtr g = subst_term(a->arg, x, v);
    if (f == a->fn && g == a->arg) return e;
    return mk_app(std::move(f), std::move(g), e->span);
  }
  if (auto* ext = as_ext(e)) {
    TermPtr o = subst_term(ext->obj, x, v);
    TermPtr b = subst_term(ext->body, x, v);
    if (o == ext->obj && b == ext->body) return e;
    return mk_ext(std::move(o), ext->method, ext->annot, std::move(b), e->span);
  }
  if (auto* s = as_send(e)) {
    TermPtr o = subst_term(s->obj, x, v);
    if (o == s->obj) return e;
    return mk_send(std::move(o), s->method, e->span);
  }
  if (auto* s = as_sel(e)) {
    TermPtr o = subst_term(s->obj, x, v);
    TermPtr r = subst_term(s->rebuild, x, v);
    if (o == s->obj && r == s->rebuild) return e;
    return mk_sel(std::move(o), s->method, std::move(r), e->span);
  }
  auto* asc = as_ascribe(e);
  TermPtr t = subst_term(asc->term, x, v);
  if (t == asc->term) return e;
  return mk_ascribe(std::move(t), asc->type, e->span);
}

namespace {

void canon_into(const TermPtr& e, std::vector<std::string>& binders,
                std::ostream& os) {
  if (auto* c = as_const(e)) {
    os << "c:" << c->lit;
    return;
  }
  if (auto* v = as_var(e)) {
    for (size_t i = binders.size(); i-- > 0;) {
      if (binders[i] == v->name) {
        os << "#" << (binders.size() - 1 - i);
        return;
      }
    }
    os << "!" << v->name;
    return;
  }
  if (auto* l = as_lam(e)) {
    os << "\\[";
    if (l->annot) os << canon_type(l->annot);
    os << "]";
    binders.push_back(l->param);
    canon_into(l->body, binders, os);
    binders.pop_back();
    return;
  }
  if (auto* a = as_app(e)) {
    os << "(";
    canon_into(a->fn, binders, os);
    os << " ";
    canon_into(a->arg, binders, os);
    os << ")";
    return;
  }
  if (as_empty(e)) {
    os << "<>";
    return;
  }
  if (auto* x = as_ext(e)) {
    os << "<";
    canon_into(x->obj, binders, os);
    os << "+" << x->method << "[";
    if (x->annot) os << canon_type(x->annot);
    os << "]=";
    canon_into(x->body, binders, os);
    os << ">";
    return;
  }
  if (auto* s = as_send(e)) {
    os << "(";
    canon_into(s->obj, binders, os);
    os << "#" << s->method << ")";
    return;
  }
  if (auto* s = as_sel(e)) {
    os << "sel(";
    canon_into(s->obj, binders, os);
    os << "," << s->method << ",";
    canon_into(s->rebuild, binders, os);
    os << ")";
    return;
  }
  auto* asc = as_ascribe(e);
  os << "(";
  canon_into(asc->term, binders, os);
  os << ":" << canon_type(asc->type) << ")";
}

}  // namespace

std::string canon_term(const TermPtr& e) {
  std::ostringstream os;
  std::vector<std::string> binders;
  canon_into(e, binders, os);
  return os.str();
}

bool alpha_eq_term(const TermPtr& a, const TermPtr& b) {
  if (a == b) return true;
  return canon_term(a) == canon_term(b);
}

bool is_object(const TermPtr& e) { return as_empty(e) || as_ext(e); }

bool is_value(const TermPtr& e) {
  return as_const(e) || as_lam(e) || is_object(e);
}

int term_size(const TermPtr& e) {
  if (as_const(e) || as_var(e) || as_empty(e)) return 1;
  if (auto* l = as_lam(e)) return 1 + term_size(l->body);
  if (auto* a = as_app(e)) return 1 + term_size(a->fn) + term_size(a->arg);
  if (auto* x = as_ext(e)) return 1 + term_size(x->obj) + term_size(x->body);
  if (auto* s = as_send(e)) return 1 + term_size(s->obj);
  if (auto* s = as_sel(e))
    return 1 + term_size(s->obj) + term_size(s->rebuild);
  return 1 + term_size(as_ascribe(e)->term);
}

TermPtr erase_ascriptions(const TermPtr& e) {
  if (as_const(e) || as_var(e) || as_empty(e)) return e;
  if (auto* l = as_lam(e)) {
    TermPtr b = erase_ascriptions(l->body);
    if (b == l->body) return e;
    return mk_lam(l->param, l->annot, std::move(b), e->span);
  }
  if (auto* a = as_app(e)) {
    TermPtr f = erase_ascriptions(a->fn);
    TermPtr g = erase_ascriptions(a->arg);
    if (f == a->fn && g == a->arg) return e;
    return mk_app(std::move(f), std::move(g), e->span);
  }
  if (auto* x = as_ext(e)) {
    TermPtr o = erase_ascriptions(x->obj);
    TermPtr b = erase_ascriptions(x->body);
    if (o == x->obj && b == x->body) return e;
    return mk_ext(std::move(o), x->method, x->annot, std::move(b), e->span);
  }
  if (auto* s = as_send(e)) {
    TermPtr o = erase_ascriptions(s->obj);
    if (o == s->obj) return e;
    return mk_send(std::move(o), s->method, e->span);
  }
  if (auto* s = as_sel(e)) {
    TermPtr o = erase_ascriptions(s->obj);
    TermPtr r = erase_ascriptions(s->rebuild);
    if (o == s->obj && r == s->rebuild) return e;
    return mk_sel(std::move(o), s->method, std::move(r), e->span);
  }
  return erase_ascriptions(as_ascribe(e)->term);
}

TermPtr strip_annotations(const TermPtr& e) {
  if (as_const(e) || as_var(e) || as_empty(e)) return e;
  if (auto* l = as_lam(e))
    return mk_lam(l->param, nullptr, strip_annotations(l->body), e->span);
  if (auto* a = as_app(e))
    return mk_app(strip_annotations(a->fn), strip_annotations(a->arg), e->span);
  if (auto* x = as_ext(e))
    return mk_ext(strip_annotations(x->obj), x->method, nullptr,
                  strip_annotations(x->body), e->span);
  if (auto* s = as_send(e))
    return mk_send(strip_annotations(s->obj), s->method, e->span);
  if (auto* s = as_sel(e))
    return mk_sel(strip_annotations(s->obj), s->method,
                  strip_annotations(s->rebuild), e->span);
  auto* asc = as_ascribe(e);
  return mk_ascribe(strip_annotations(asc->term), asc->type, e->span);
}

static TermPtr admin_pass(const TermPtr& e, bool& changed) {
  if (as_const(e) || as_var(e) || as_empty(e)) return e;
  if (auto* a = as_app(e)) {
    if (auto* l = as_lam(a->fn)) {
      auto* v = as_var(l->body);
      if (v && v->name == l->param) {
        changed = true;
        return admin_pass(a->arg, changed);
      }
    }
    return mk_app(admin_pass(a->fn, changed), admin_pass(a->arg, changed),
                  e->span);
  }
  if (auto* l = as_lam(e))
    return mk_lam(l->param, l->annot, admin_pass(l->body, changed), e->span);
  if (auto* x = as_ext(e))
    return mk_ext(admin_pass(x->obj, changed), x->method, x->annot,
                  admin_pass(x->body, changed), e->span);
  if (auto* s = as_send(e))
    return mk_send(admin_pass(s->obj, changed), s->method, e->span);
  if (auto* s = as_sel(e))
    return mk_sel(admin_pass(s->obj, changed), s->method,
                  admin_pass(s->rebuild, changed), e->span);
  auto* asc = as_ascribe(e);
  return mk_ascribe(admin_pass(asc->term, changed), asc->type, e->span);
}

TermPtr normalize_admin(const TermPtr& e) {
  TermPtr cur = e;
  for (;;) {
    bool changed = false;
    TermPtr next = admin_pass(cur, changed);
    if (!changed) return next;
    cur = next;
  }
}

}  // namespace lobj
