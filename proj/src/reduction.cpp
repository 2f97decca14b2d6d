#include "lobj/reduction.hpp"

#include <sstream>
#include <stdexcept>

#include "lobj/parser.hpp"

namespace lobj {

const char* rule_name(RedRule r) {
  switch (r) {
    case RedRule::Beta: return "Beta";
    case RedRule::Selection: return "Selection";
    case RedRule::Success: return "Success";
    case RedRule::Next: return "Next";
  }
  return "?";
}

namespace {

// Reducts available at the root, if any. Ascriptions are inert: no rule
// fires at one and none inspects through one.
std::optional<StepResult> root_redex(const TermPtr& e, bool freshen) {
  if (auto* a = as_app(e)) {
    if (auto* l = as_lam(a->fn))
      return StepResult{RedRule::Beta, subst_term(l->body, l->param, a->arg)};
    return std::nullopt;
  }
  if (auto* s = as_send(e)) {
    TermPtr identity = mk_lam("s", nullptr, mk_var("s"));
    return StepResult{RedRule::Selection,
                      mk_sel(s->obj, s->method, std::move(identity))};
  }
  if (auto* s = as_sel(e)) {
    auto* x = as_ext(s->obj);
    if (!x) return std::nullopt;
    if (x->method == s->method) {
      // e2 (e3 <e1 <- m = e2>)
      return StepResult{RedRule::Success,
                        mk_app(x->body, mk_app(s->rebuild, s->obj))};
    }
    std::string binder = "s";
    if (freshen) {
      NameSet avoid = all_names(s->rebuild);
      NameSet more = all_names(x->body);
      avoid.insert(more.begin(), more.end());
      binder = fresh_name("s", avoid);
    }
    // The annotation on the stripped extension travels with the rebuild.
    TermPtr rebuilt = mk_ext(mk_var(binder), x->method, x->annot, x->body);
    TermPtr wrapper =
        mk_lam(binder, nullptr, mk_app(s->rebuild, std::move(rebuilt)));
    return StepResult{RedRule::Next,
                      mk_sel(x->obj, s->method, std::move(wrapper))};
  }
  return std::nullopt;
}

}  // namespace

namespace detail {

std::optional<StepResult> step_impl(const TermPtr& e, bool freshen) {
  if (auto r = root_redex(e, freshen)) return r;
  if (auto* a = as_app(e)) {
    if (auto sub = step_impl(a->fn, freshen))
      return StepResult{sub->rule, mk_app(sub->term, a->arg, e->span)};
    return std::nullopt;
  }
  if (auto* s = as_sel(e)) {
    if (auto sub = step_impl(s->obj, freshen))
      return StepResult{sub->rule,
                        mk_sel(sub->term, s->method, s->rebuild, e->span)};
    return std::nullopt;
  }
  return std::nullopt;
}

}  // namespace detail

std::optional<StepResult> step(const TermPtr& e) {
  return detail::step_impl(e, true);
}

namespace detail {

std::vector<AnyStep> step_any_impl(const TermPtr& e, bool freshen) {
  std::vector<AnyStep> out;
  if (auto r = root_redex(e, freshen)) out.push_back({{}, r->rule, r->term});

  auto child = [&](PosKind pos, const TermPtr& sub, auto rebuild) {
    for (auto& st : step_any_impl(sub, freshen)) {
      AnyStep wrapped{{pos}, st.rule, rebuild(st.term)};
      wrapped.path.insert(wrapped.path.end(), st.path.begin(), st.path.end());
      out.push_back(std::move(wrapped));
    }
  };

  if (auto* a = as_app(e)) {
    child(PosKind::AppFun, a->fn,
          [&](TermPtr t) { return mk_app(std::move(t), a->arg, e->span); });
    child(PosKind::AppArg, a->arg,
          [&](TermPtr t) { return mk_app(a->fn, std::move(t), e->span); });
  } else if (auto* l = as_lam(e)) {
    child(PosKind::LamBody, l->body, [&](TermPtr t) {
      return mk_lam(l->param, l->annot, std::move(t), e->span);
    });
  } else if (auto* x = as_ext(e)) {
    child(PosKind::ExtObj, x->obj, [&](TermPtr t) {
      return mk_ext(std::move(t), x->method, x->annot, x->body, e->span);
    });
    child(PosKind::ExtBody, x->body, [&](TermPtr t) {
      return mk_ext(x->obj, x->method, x->annot, std::move(t), e->span);
    });
  } else if (auto* s = as_send(e)) {
    child(PosKind::SendObj, s->obj, [&](TermPtr t) {
      return mk_send(std::move(t), s->method, e->span);
    });
  } else if (auto* s = as_sel(e)) {
    child(PosKind::SelObj, s->obj, [&](TermPtr t) {
      return mk_sel(std::move(t), s->method, s->rebuild, e->span);
    });
    child(PosKind::SelRebuild, s->rebuild, [&](TermPtr t) {
      return mk_sel(s->obj, s->method, std::move(t), e->span);
    });
  }
  return out;
}

}  // namespace detail

std::vector<AnyStep> step_any(const TermPtr& e) {
  return detail::step_any_impl(e, true);
}

namespace {

std::optional<WrongKind> wrong_focus(const TermPtr& e) {
  if (auto* a = as_app(e)) return wrong_focus(a->fn);
  if (auto* s = as_sel(e)) {
    if (as_empty(s->obj)) return WrongKind::EmptyReceiver;
    if (as_lam(s->obj)) return WrongKind::LamReceiver;
    if (as_const(s->obj)) return WrongKind::ConstReceiver;
    return wrong_focus(s->obj);
  }
  return std::nullopt;
}

}  // namespace

Outcome eval(const TermPtr& e, long fuel, bool keep_trace) {
  Outcome out;
  TermPtr cur = e;
  for (;;) {
    auto st = step(cur);
    if (!st) break;
    cur = st->term;
    out.steps++;
    if (keep_trace) out.trace.push_back({st->rule, cur});
    if (out.steps >= fuel && step(cur)) {
      out.kind = OutcomeKind::OutOfFuel;
      out.result = cur;
      return out;
    }
  }
  out.result = cur;
  if (is_value(cur)) {
    out.kind = OutcomeKind::Value;
  } else if (auto w = wrong_focus(cur)) {
    out.kind = OutcomeKind::Wrong;
    out.wrong = w;
  } else {
    out.kind = OutcomeKind::Stuck;
  }
  return out;
}

std::string format_trace(const TermPtr& start,
                         const std::vector<TraceEntry>& trace) {
  std::ostringstream os;
  os << "#0 [init] " << pretty_term(start) << "\n";
  int i = 1;
  for (auto& entry : trace)
    os << "#" << i++ << " [" << rule_name(entry.rule) << "] "
       << pretty_term(entry.term) << "\n";
  return os.str();
}

}  // namespace lobj
