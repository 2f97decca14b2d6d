#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>

#include "lobj/parser.hpp"
#include "lobj/reduction.hpp"

using namespace lobj;

static TermPtr pt(const std::string& s) {
  return resolve_idents(parse_term(s, builtin_prelude()), builtin_prelude(),
                        {});
}

static TermPtr norm(const TermPtr& e) {
  return normalize_admin(erase_ascriptions(e));
}

// The worked self-extension object over an ascribed empty receiver.
static const char* kExtend =
    "< (<> : pro t. <add_n: t + n, n: int>)"
    "    <- add_n = \\self. < self <- n = \\u. 1 > >";

TEST_CASE("the four rules fire") {
  auto s1 = step(pt("(\\x. x) 1"));
  REQUIRE(s1);
  CHECK(s1->rule == RedRule::Beta);
  CHECK(lobj::as_const(s1->term)->lit == "1");

  // selection fires unconditionally as soon as the send is the focus
  auto s2 = step(pt("<> # m"));
  REQUIRE(s2);
  CHECK(s2->rule == RedRule::Selection);
  auto* sel = as_sel(s2->term);
  REQUIRE(sel);
  CHECK(as_empty(sel->obj));
  auto* reb = as_lam(sel->rebuild);
  REQUIRE(reb);
  CHECK(as_var(reb->body)->name == reb->param);

  auto s3 = step(pt("sel(< o <- m = \\s. s >, m, \\q. q)"));
  REQUIRE(s3);
  CHECK(s3->rule == RedRule::Success);
  auto* app = as_app(s3->term);
  REQUIRE(app);  // e2 (e3 <e1 <- m = e2>)
  CHECK(as_lam(app->fn));
  CHECK(as_ext(as_app(app->arg)->arg));

  auto s4 = step(pt("sel(< o <- n = \\s. s >, m, \\q. q)"));
  REQUIRE(s4);
  CHECK(s4->rule == RedRule::Next);
  auto* sel4 = as_sel(s4->term);
  REQUIRE(sel4);
  CHECK(as_var(sel4->obj)->name == "o");
  CHECK(sel4->method == "m");
}

TEST_CASE("next freshens the rebuilt binder") {
  // the rebuild mentions a free s; the wrapper binder must avoid it
  TermPtr e = pt("sel(< o <- n = \\u. u >, m, s)");
  auto st = step(e);
  REQUIRE(st);
  CHECK(st->rule == RedRule::Next);
  auto* lam = as_lam(as_sel(st->term)->rebuild);
  REQUIRE(lam);
  CHECK(lam->param != "s");
  auto* body = as_app(lam->body);
  REQUIRE(body);
  CHECK(as_var(body->fn)->name == "s");

  // with freshening disabled the binder captures
  auto raw = detail::step_impl(e, false);
  REQUIRE(raw);
  auto* lam2 = as_lam(as_sel(raw->term)->rebuild);
  REQUIRE(lam2);
  CHECK(lam2->param == "s");
}

TEST_CASE("deterministic focus follows the context grammar") {
  // function position of an application
  auto s1 = step(pt("((\\x. x) (\\y. y)) 1"));
  REQUIRE(s1);
  CHECK(s1->rule == RedRule::Beta);
  CHECK(as_app(s1->term));  // outer application survives

  // arguments are not reduced (call by name)
  TermPtr cbn = pt("(\\x. 2) ((\\y. y) 1)");
  auto s2 = step(cbn);
  REQUIRE(s2);
  CHECK(lobj::as_const(s2->term)->lit == "2");

  // a send is itself the redex: the receiver reduces inside the sel
  auto s3 = step(pt("((\\x. x) <>) # m"));
  REQUIRE(s3);
  CHECK(s3->rule == RedRule::Selection);
  auto* sl = as_sel(s3->term);
  REQUIRE(sl);
  CHECK(as_app(sl->obj));
  auto s3b = step(s3->term);
  REQUIRE(s3b);
  CHECK(s3b->rule == RedRule::Beta);
  CHECK(as_empty(as_sel(s3b->term)->obj));

  // first argument of sel
  auto s4 = step(pt("sel((\\x. x) <>, m, \\q. q)"));
  REQUIRE(s4);
  CHECK(s4->rule == RedRule::Beta);
  CHECK(as_sel(s4->term));

  // never under a lambda or inside extension bodies
  CHECK_FALSE(step(pt("\\x. (\\y. y) x")));
  CHECK_FALSE(step(pt("< o <- m = (\\y. y) 1 >")));
}

TEST_CASE("values and normal forms") {
  CHECK_FALSE(step(pt("<>")));
  CHECK_FALSE(step(pt("7")));
  CHECK_FALSE(step(pt("\\x. x")));
  CHECK_FALSE(step(pt("< <> <- m = \\s. s >")));
  // wrong forms have no reduct
  CHECK_FALSE(step(pt("sel(<>, m, \\s. s)")));
  CHECK_FALSE(step(pt("sel(\\x. x, m, \\s. s)")));
  CHECK_FALSE(step(pt("sel(1, m, \\s. s)")));
  // stuck forms have no reduct either
  CHECK_FALSE(step(pt("1 2")));
  CHECK_FALSE(step(pt("sel((<> : pro t. <>), m, \\s. s)")));
}

TEST_CASE("eval classifies outcomes") {
  Outcome v = eval(pt("(\\x. x) <>"));
  CHECK(v.kind == OutcomeKind::Value);
  CHECK(as_empty(v.result));
  CHECK(v.steps == 1);

  Outcome w1 = eval(pt("<> # m"));
  CHECK(w1.kind == OutcomeKind::Wrong);
  CHECK(w1.wrong == WrongKind::EmptyReceiver);

  Outcome w2 = eval(pt("(\\x. x # m) (\\y. y)"));
  CHECK(w2.kind == OutcomeKind::Wrong);
  CHECK(w2.wrong == WrongKind::LamReceiver);

  Outcome w3 = eval(pt("1 # m"));
  CHECK(w3.kind == OutcomeKind::Wrong);
  CHECK(w3.wrong == WrongKind::ConstReceiver);

  // search walks below the top extension before going wrong
  Outcome w4 = eval(pt("< <> <- n = \\s. s > # m"));
  CHECK(w4.kind == OutcomeKind::Wrong);
  CHECK(w4.wrong == WrongKind::EmptyReceiver);

  Outcome st = eval(pt("1 2"));
  CHECK(st.kind == OutcomeKind::Stuck);

  // an ascription in the selection path blocks the walk: stuck, not wrong
  Outcome st2 = eval(pt("(<> : pro t. <>) # m"));
  CHECK(st2.kind == OutcomeKind::Stuck);

  Outcome fuel = eval(pt("(\\x. x x) (\\x. x x)"), 50);
  CHECK(fuel.kind == OutcomeKind::OutOfFuel);
  CHECK(fuel.steps == 50);
}

TEST_CASE("worked example: single extension") {
  TermPtr send = mk_send(pt(kExtend), "add_n");
  Outcome out = eval(send, 100, true);
  REQUIRE(out.kind == OutcomeKind::Value);
  CHECK(out.steps == 3);
  // <extend <- n = \u. 1>, modulo the identity rebuild
  TermPtr want = mk_ext(pt(kExtend), "n", nullptr, pt("\\u. 1"));
  CHECK(alpha_eq_term(norm(out.result), norm(want)));

  Outcome run = eval(mk_send(out.result, "n"), 100);
  REQUIRE(run.kind == OutcomeKind::Value);
  CHECK(lobj::as_const(run.result)->lit == "1");
}

TEST_CASE("worked example: delayed double extension") {
  TermPtr two = pt(
      "< (<> : pro t. <add_mn: t + m, m: t + n, n: int>)"
      "    <- add_mn = \\self. < self <- m = \\s'. < s' <- n = \\u. 1 > > >");
  Outcome out = eval(mk_send(mk_send(two, "add_mn"), "m"), 200);
  REQUIRE(out.kind == OutcomeKind::Value);
  // both m and n present afterwards
  TermPtr got = norm(out.result);
  auto* top = as_ext(got);
  REQUIRE(top);
  CHECK(top->method == "n");
  auto* mid = as_ext(top->obj);
  REQUIRE(mid);
  CHECK(mid->method == "m");
  auto* base = as_ext(mid->obj);
  REQUIRE(base);
  CHECK(base->method == "add_mn");

  Outcome val = eval(mk_send(out.result, "n"), 200);
  REQUIRE(val.kind == OutcomeKind::Value);
  CHECK(lobj::as_const(val.result)->lit == "1");
}

TEST_CASE("worked example: extension on the fly") {
  TermPtr fly = pt(
      "< < (<> : pro t. <f: (t + n) -> int, get_f: int, n: int>)"
      "    <- f = \\self. \\s'. (s' # n) >"
      "    <- get_f = \\self. (self # f) < self <- n = \\u. 1 > >");
  Outcome out = eval(mk_send(fly, "get_f"), 200);
  REQUIRE(out.kind == OutcomeKind::Value);
  CHECK(lobj::as_const(out.result)->lit == "1");
}

TEST_CASE("worked example: identity send rebuilds the receiver") {
  TermPtr idone = pt(
      "< < (<> : pro t. <id: t, one: int>) <- id = \\s. s >"
      "    <- one = \\u. 1 >");
  Outcome out = eval(mk_send(idone, "id"), 100, true);
  REQUIRE(out.kind == OutcomeKind::Value);
  REQUIRE(out.steps == 6);
  REQUIRE(out.trace.size() == 6);
  RedRule want[] = {RedRule::Selection, RedRule::Next,  RedRule::Success,
                    RedRule::Beta,      RedRule::Beta,  RedRule::Beta};
  for (int i = 0; i < 6; ++i) CHECK(out.trace[i].rule == want[i]);
  // the object reassembles itself exactly
  CHECK(alpha_eq_term(out.result, idone));
}

TEST_CASE("full contextual closure") {
  // the classic diamond
  TermPtr d = pt("(\\x. x) ((\\y. 2) 1)");
  auto reducts = step_any(d);
  REQUIRE(reducts.size() == 2);
  CHECK_FALSE(alpha_eq_term(reducts[0].term, reducts[1].term));

  // redexes under binders and inside bodies are visible
  CHECK(step_any(pt("\\x. (\\y. y) x")).size() == 1);
  CHECK(step_any(pt("< o <- m = (\\y. y) 1 >")).size() == 1);
  CHECK(step_any(pt("sel(o, m, (\\y. y) 1)")).size() == 1);

  // values without inner redexes have none
  CHECK(step_any(pt("<>")).empty());
  CHECK(step_any(pt("\\x. x")).empty());

  // the deterministic step agrees with the leftmost-outermost entry
  TermPtr send = mk_send(pt(kExtend), "add_n");
  auto all = step_any(send);
  REQUIRE(all.size() == 1);
  auto det = step(send);
  REQUIRE(det);
  CHECK(alpha_eq_term(det->term, all[0].term));
  CHECK(det->rule == all[0].rule);
}

TEST_CASE("trace format") {
  TermPtr e = pt("(\\x. x) 1");
  Outcome out = eval(e, 10, true);
  REQUIRE(out.trace.size() == 1);
  std::string text = format_trace(e, out.trace);
  CHECK(text.find("#0 [init]") == 0);
  CHECK(text.find("[Beta]") != std::string::npos);
  CHECK(text.find("1") != std::string::npos);
}
