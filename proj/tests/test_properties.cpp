#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>

#include "lobj/harness.hpp"
#include "lobj/parser.hpp"
#include "lobj/reduction.hpp"

using namespace lobj;

static GenConfig small_cfg(SystemMode mode, int count) {
  GenConfig cfg;
  cfg.mode = mode;
  cfg.count = count;
  return cfg;
}

TEST_CASE("generators produce the advertised shapes") {
  GenConfig cfg = small_cfg(SystemMode::Plain, 60);
  auto typed = gen_typed(cfg);
  CHECK(typed.size() == 60);
  Checker ck(builtin_prelude(), cfg.mode);
  for (auto& [term, type] : typed) {
    CHECK(free_vars(term).empty());
    CHECK_NOTHROW(ck.check(term, type));
  }
  // same seed, same terms
  auto again = gen_typed(cfg);
  REQUIRE(again.size() == typed.size());
  for (size_t i = 0; i < typed.size(); ++i)
    CHECK(alpha_eq_term(again[i].first, typed[i].first));

  for (auto& t : gen_raw(cfg)) CHECK(free_vars(t).empty());
  CHECK(gen_asts(cfg).size() == 60);
}

TEST_CASE("subject reduction and no-wrong hold at desk scale") {
  for (SystemMode mode : {SystemMode::Plain, SystemMode::Sub}) {
    GenConfig cfg = small_cfg(mode, 120);
    PropertyReport sr = prop_subject_reduction(cfg);
    CHECK(sr.ok());
    CHECK(sr.cases == 120);
    CHECK(sr.passed == 120);

    PropertyReport nw = prop_no_wrong(cfg);
    CHECK(nw.ok());
    CHECK(nw.passed == 120);
  }
  // the control: untypable programs do go wrong, so the property has teeth
  Outcome bad = eval(resolve_idents(
      parse_term("<> # m", builtin_prelude()), builtin_prelude(), {}));
  CHECK(bad.kind == OutcomeKind::Wrong);
}

TEST_CASE("confluence joins within the search bound") {
  PropertyReport r = prop_confluence(small_cfg(SystemMode::Plain, 150));
  CHECK(r.ok());
  CHECK(r.cases == 150);
  CHECK(r.passed + r.unknown == r.cases);
  CHECK(r.unknown * 20 <= r.cases);  // at most 5% abstained
}

TEST_CASE("matching laws") {
  for (SystemMode mode : {SystemMode::Plain, SystemMode::Sub}) {
    PropertyReport r = prop_matching_laws(small_cfg(mode, 150));
    CHECK(r.ok());
    CHECK(r.cases == 150);
  }
}

TEST_CASE("substitution and renaming stability") {
  PropertyReport good = prop_substitution(small_cfg(SystemMode::Plain, 150));
  CHECK(good.ok());
  CHECK(good.cases == 150);

  // sabotage: with (Next) renaming disabled the equivariance half must fail,
  // and the shrinker must hand back a small printable witness
  PropertyReport bad =
      prop_substitution(small_cfg(SystemMode::Plain, 150), false);
  CHECK_FALSE(bad.ok());
  REQUIRE(!bad.failures.empty());
  const Failure& f = bad.failures.front();
  REQUIRE(!f.shrunk.empty());
  TermPtr witness = resolve_idents(
      parse_term(f.shrunk, builtin_prelude()), builtin_prelude(), {});
  CHECK(term_size(witness) <= 15);
}

TEST_CASE("round trip") {
  PropertyReport r = prop_roundtrip(small_cfg(SystemMode::Plain, 200));
  CHECK(r.ok());
  CHECK(r.cases == 200);
  CHECK(r.passed == 200);
}

TEST_CASE("prop_all bundles every property") {
  auto all = prop_all(small_cfg(SystemMode::Sub, 40));
  REQUIRE(all.size() == 6);
  for (auto& r : all) {
    CHECK(r.ok());
    CHECK(r.mode == SystemMode::Sub);
    CHECK(r.to_string().find("property:") == 0);
  }
}

TEST_CASE("the shrinker finds the minimal failing core") {
  TermPtr t = resolve_idents(
      parse_term("(\\x. x) ((\\y. y) (<> # m))", builtin_prelude()),
      builtin_prelude(), {});
  auto contains_empty_send = [](const TermPtr& e) {
    std::function<bool(const TermPtr&)> walk = [&](const TermPtr& u) -> bool {
      if (auto* s = as_send(u)) {
        if (as_empty(s->obj)) return true;
        return walk(s->obj);
      }
      if (auto* a = as_app(u)) return walk(a->fn) || walk(a->arg);
      if (auto* l = as_lam(u)) return walk(l->body);
      if (auto* x = as_ext(u)) return walk(x->obj) || walk(x->body);
      if (auto* s = as_sel(u))
        return walk(s->obj) || walk(s->rebuild);
      if (auto* a = as_ascribe(u)) return walk(a->term);
      return false;
    };
    return walk(e);
  };
  TermPtr shrunk = shrink_term(t, contains_empty_send);
  CHECK(contains_empty_send(shrunk));
  CHECK(term_size(shrunk) == 2);
  auto* s = as_send(shrunk);
  REQUIRE(s);
  CHECK(as_empty(s->obj));
}
