#pragma once

// Term syntax: constants, variables, lambdas, application, the empty object,
// object extension (one operator for add and override), method send, the
// auxiliary selection form, and type ascription. Extension and lambda nodes
// may carry optional type annotations.

#include <memory>
#include <optional>
#include <string>
#include <variant>

#include "lobj/types.hpp"

namespace lobj {

struct Term;
using TermPtr = std::shared_ptr<const Term>;

struct Span {
  int line = 0;
  int col = 0;
};

// Literal constants keep their spelled form: "1", "\"Alice\"", "true", "plus".
struct Const {
  std::string lit;
};

struct Var {
  std::string name;
};

struct Lam {
  std::string param;
  TypePtr annot;  // may be null
  TermPtr body;
};

struct App {
  TermPtr fn;
  TermPtr arg;
};

struct Empty {};

struct Ext {
  TermPtr obj;
  std::string method;
  TypePtr annot;  // may be null
  TermPtr body;
};

struct Send {
  TermPtr obj;
  std::string method;
};

struct Sel {
  TermPtr obj;
  std::string method;
  TermPtr rebuild;
};

struct Ascribe {
  TermPtr term;
  TypePtr type;
};

struct Term {
  std::variant<Const, Var, Lam, App, Empty, Ext, Send, Sel, Ascribe> node;
  Span span;
};

TermPtr mk_const(std::string lit, Span sp = {});
TermPtr mk_var(std::string name, Span sp = {});
TermPtr mk_lam(std::string param, TypePtr annot, TermPtr body, Span sp = {});
TermPtr mk_app(TermPtr fn, TermPtr arg, Span sp = {});
TermPtr mk_empty(Span sp = {});
TermPtr mk_ext(TermPtr obj, std::string method, TypePtr annot, TermPtr body,
               Span sp = {});
TermPtr mk_send(TermPtr obj, std::string method, Span sp = {});
TermPtr mk_sel(TermPtr obj, std::string method, TermPtr rebuild, Span sp = {});
TermPtr mk_ascribe(TermPtr term, TypePtr type, Span sp = {});

const Const* as_const(const TermPtr& e);
const Var* as_var(const TermPtr& e);
const Lam* as_lam(const TermPtr& e);
const App* as_app(const TermPtr& e);
const Empty* as_empty(const TermPtr& e);
const Ext* as_ext(const TermPtr& e);
const Send* as_send(const TermPtr& e);
const Sel* as_sel(const TermPtr& e);
const Ascribe* as_ascribe(const TermPtr& e);

NameSet free_vars(const TermPtr& e);
// Free and bound variable names, for display-stable freshening.
NameSet all_names(const TermPtr& e);

// Capture-avoiding substitution e[v/x].
TermPtr subst_term(const TermPtr& e, const std::string& x, const TermPtr& v);

// Canonical string with numbered binders; annotations participate.
std::string canon_term(const TermPtr& e);
bool alpha_eq_term(const TermPtr& a, const TermPtr& b);

// Empty or Ext.
bool is_object(const TermPtr& e);
// Const, Lam, or object.
bool is_value(const TermPtr& e);

int term_size(const TermPtr& e);

// Drops every ascription node.
TermPtr erase_ascriptions(const TermPtr& e);
// Drops lambda/extension annotations (for comparisons against
// annotation-free spellings).
TermPtr strip_annotations(const TermPtr& e);
// Contracts identity redexes (\x. x) e -> e everywhere, to a fixpoint.
// The rebuild protocol inserts identity wrappers; comparisons against
// compressed spellings normalize both sides with this.
TermPtr normalize_admin(const TermPtr& e);

}  // namespace lobj
