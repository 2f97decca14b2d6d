#pragma once

// Type syntax for the object calculus: constants, arrows, type variables
// carrying a set of activated methods, and quantified object types
// (pro t.R / obj t.R) with an unordered row and an activation set.

#include <map>
#include <memory>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace lobj {

struct Type;
using TypePtr = std::shared_ptr<const Type>;
using NameSet = std::set<std::string>;
using Row = std::map<std::string, TypePtr>;

enum class Flavor { Pro, Obj };
enum class SystemMode { Plain, Sub };

struct TConst {
  std::string name;
};

struct TArrow {
  TypePtr dom;
  TypePtr cod;
};

// A type variable t together with the methods added on top of it (t + m1, m2).
// An empty set is plain t.
struct TVar {
  std::string name;
  NameSet plus;
};

struct TObj {
  Flavor flavor;
  std::string binder;
  Row row;
  NameSet plus;
};

struct Type {
  std::variant<TConst, TArrow, TVar, TObj> node;
};

TypePtr tconst(std::string name);
TypePtr tarrow(TypePtr dom, TypePtr cod);
TypePtr tvar(std::string name, NameSet plus = {});
TypePtr tobj(Flavor flavor, std::string binder, Row row, NameSet plus = {});

const TConst* as_tconst(const TypePtr& t);
const TArrow* as_tarrow(const TypePtr& t);
const TVar* as_tvar(const TypePtr& t);
const TObj* as_tobj(const TypePtr& t);

// TVar or TObj.
bool is_object_type(const TypePtr& t);

NameSet ftv(const TypePtr& t);
NameSet meth(const Row& row);

// Union of the plus-sets attached to free occurrences of `name` in t.
NameSet plus_mentions(const std::string& name, const TypePtr& t);

// t + extra. Throws std::logic_error if t is not an object type and extra
// is nonempty.
TypePtr plus_extend(const TypePtr& t, const NameSet& extra);

// Capture-avoiding substitution of tau for the type variable `name`.
// Occurrences name+S become plus_extend(tau, S).
TypePtr subst_type(const TypePtr& sigma, const std::string& name,
                   const TypePtr& tau);

// Canonical string (binders numbered, rows and sets sorted). Two types are
// alpha-equivalent iff their canonical strings are equal.
std::string canon_type(const TypePtr& t);
bool alpha_eq_type(const TypePtr& a, const TypePtr& b);

// Smallest name of the form base, base', base'', ... not in avoid.
std::string fresh_name(const std::string& base, const NameSet& avoid);

// Constant signature: constant names with their types plus the set of valid
// base type names.
struct PreludeSig {
  std::map<std::string, TypePtr> consts;
  NameSet iota;
};

}  // namespace lobj
