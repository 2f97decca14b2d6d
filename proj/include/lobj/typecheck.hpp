#pragma once

// Type checking for both systems: the plain one (pro types only) and the
// extension with width subtyping (obj types, rigid kinds, subsumption).
// The rules are made syntax-directed: most-specific matches, a composed
// beta-redex rule for machine-produced applications, and bound opening at
// extension/selection sites with a deterministic activation-set choice.

#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "lobj/syntax.hpp"
#include "lobj/types.hpp"

namespace lobj {

enum class ErrKind {
  UnknownVar, UnknownMethod, RowMismatch, NotMatching, NotRigid,
  NotCovariant, DuplicateLabel, IllFormedType, AnnotationRequired,
  ArityOrForm,
};
const char* err_kind_name(ErrKind k);

struct TypeError : std::runtime_error {
  ErrKind kind;
  std::string rule;  // violated rule, e.g. "Extend", "Match-Pro"
  Span span;
  TypeError(ErrKind k, std::string rule_, const std::string& msg, Span sp)
      : std::runtime_error(msg), kind(k), rule(std::move(rule_)), span(sp) {}
};

struct VarBind {
  std::string name;
  TypePtr type;
};

// A type variable with its upper bound; the bound is an object type whose
// binder is the variable's own name.
struct MatchBind {
  std::string name;
  TypePtr bound;
};

class Ctx {
 public:
  void push(VarBind b) { entries_.emplace_back(std::move(b)); }
  void push(MatchBind b) { entries_.emplace_back(std::move(b)); }
  const TypePtr* lookup_var(const std::string& name) const;
  const TypePtr* lookup_bound(const std::string& name) const;
  bool has(const std::string& name) const;
  NameSet domain() const;

 private:
  std::vector<std::variant<VarBind, MatchBind>> entries_;
};

// All free occurrences of tname in sigma are in positive position.
bool covariant_in(const std::string& tname, const TypePtr& sigma);

class Checker {
 public:
  Checker(PreludeSig sig, SystemMode mode)
      : sig_(std::move(sig)), mode_(mode) {}

  SystemMode mode() const { return mode_; }
  const PreludeSig& sig() const { return sig_; }

  // Well-kindedness. Throws TypeError.
  void kind_T(const Ctx& ctx, const TypePtr& t) const;
  bool is_kinded(const Ctx& ctx, const TypePtr& t) const;

  // Rigidity (subtyping system only).
  void kind_rigid(const Ctx& ctx, const TypePtr& t) const;
  bool is_rigid(const Ctx& ctx, const TypePtr& t) const;

  // a <# b. Inputs are assumed well kinded.
  bool matches(const Ctx& ctx, const TypePtr& a, const TypePtr& b) const;

  TypePtr infer(const Ctx& ctx, const TermPtr& e) const;
  void check(const Ctx& ctx, const TermPtr& e, const TypePtr& expected) const;

  TypePtr infer(const TermPtr& e) const { return infer(Ctx{}, e); }
  void check(const TermPtr& e, const TypePtr& expected) const {
    check(Ctx{}, e, expected);
  }

 private:
  struct Resolved;
  Resolved resolve_object(const Ctx& ctx, const TypePtr& t, Span sp,
                          const char* rule) const;
  std::pair<Ctx, std::string> open_bound(const Ctx& ctx, const Resolved& r,
                                         const NameSet& bound_plus) const;
  bool pre_extend_ok(const Ctx& ctx, const TypePtr& from,
                     const TypePtr& to) const;
  TypePtr type_ext(const Ctx& ctx, const TermPtr& e,
                   const TypePtr* expected) const;
  void compat(const Ctx& ctx, const TypePtr& found, const TypePtr& expected,
              Span sp, const char* rule) const;

  PreludeSig sig_;
  SystemMode mode_;
};

}  // namespace lobj
