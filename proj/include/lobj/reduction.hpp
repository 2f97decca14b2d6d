#pragma once

// Small-step operational semantics. Four rules; deterministic call-by-name
// strategy with evaluation contexts C ::= [] | C e | C # m | sel(C, m, e),
// selection firing as soon as a send node is the focus. step_any is the full
// contextual closure, used by the confluence search.

#include <optional>
#include <string>
#include <vector>

#include "lobj/syntax.hpp"

namespace lobj {

enum class RedRule { Beta, Selection, Success, Next };
const char* rule_name(RedRule r);

struct StepResult {
  RedRule rule;
  TermPtr term;
};

// Deterministic step. Ascriptions are inert (no rule fires at one); keep
// them at positions the focus never reaches, e.g. on the innermost empty
// object of a spine. nullopt on normal forms (values, wrong, stuck).
std::optional<StepResult> step(const TermPtr& e);

enum class PosKind {
  AppFun, AppArg, LamBody, ExtObj, ExtBody, SendObj, SelObj, SelRebuild
};

struct AnyStep {
  std::vector<PosKind> path;
  RedRule rule;
  TermPtr term;
};

std::vector<AnyStep> step_any(const TermPtr& e);

enum class OutcomeKind { Value, Wrong, Stuck, OutOfFuel };
// The three selection patterns with no reduct: receiver empty, a lambda,
// or a constant.
enum class WrongKind { EmptyReceiver, LamReceiver, ConstReceiver };

struct TraceEntry {
  RedRule rule;
  TermPtr term;
};

struct Outcome {
  OutcomeKind kind;
  TermPtr result;
  long steps = 0;
  std::optional<WrongKind> wrong;
  std::vector<TraceEntry> trace;
};

// Iterates step up to fuel times and classifies the final term.
Outcome eval(const TermPtr& e, long fuel = 10000, bool keep_trace = false);

// One line per term: "#<index> [<rule>] <pretty term>", index 0 tagged init.
std::string format_trace(const TermPtr& start,
                         const std::vector<TraceEntry>& trace);

namespace detail {
// freshen=false skips the fresh rename in (Next); used to demonstrate that
// the property harness catches the resulting capture bug.
std::optional<StepResult> step_impl(const TermPtr& e, bool freshen);
std::vector<AnyStep> step_any_impl(const TermPtr& e, bool freshen);
}  // namespace detail

}  // namespace lobj
