#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lobj/syntax.hpp"

using namespace lobj;

static TermPtr lam(const std::string& x, TermPtr b) {
  return mk_lam(x, nullptr, std::move(b));
}

TEST_CASE("free_vars") {
  TermPtr e = lam("x", mk_app(mk_var("x"), mk_var("y")));
  CHECK(free_vars(e) == NameSet{"y"});
  TermPtr o = mk_ext(mk_empty(), "m", nullptr, lam("s", mk_send(mk_var("s"), "m")));
  CHECK(free_vars(o).empty());
  CHECK(all_names(o) == NameSet{"s"});
}

TEST_CASE("substitution is capture avoiding") {
  // (\y. x y)[y / x] must rename the binder
  TermPtr e = lam("y", mk_app(mk_var("x"), mk_var("y")));
  TermPtr r = subst_term(e, "x", mk_var("y"));
  auto* l = as_lam(r);
  REQUIRE(l);
  CHECK(l->param != "y");
  auto* body = as_app(l->body);
  REQUIRE(body);
  CHECK(as_var(body->fn)->name == "y");
  CHECK(as_var(body->arg)->name == l->param);

  // shadowed variable untouched
  TermPtr sh = lam("x", mk_var("x"));
  CHECK(subst_term(sh, "x", mk_const("1")) == sh);

  // substitution reaches extension bodies and rebuild arguments
  TermPtr s = mk_sel(mk_var("x"), "m", lam("z", mk_var("x")));
  TermPtr s2 = subst_term(s, "x", mk_empty());
  CHECK(as_empty(as_sel(s2)->obj));
  CHECK(as_empty(as_lam(as_sel(s2)->rebuild)->body));
}

TEST_CASE("alpha equivalence") {
  CHECK(alpha_eq_term(lam("x", mk_var("x")), lam("y", mk_var("y"))));
  CHECK_FALSE(alpha_eq_term(lam("x", mk_var("x")), lam("x", mk_var("z"))));
  // annotations are compared
  TermPtr a1 = mk_lam("x", tconst("int"), mk_var("x"));
  TermPtr a2 = mk_lam("x", tconst("bool"), mk_var("x"));
  CHECK_FALSE(alpha_eq_term(a1, a2));
  CHECK(alpha_eq_term(strip_annotations(a1), strip_annotations(a2)));
  // free variables by name
  CHECK_FALSE(alpha_eq_term(mk_var("a"), mk_var("b")));
}

TEST_CASE("values and objects") {
  CHECK(is_value(mk_const("3")));
  CHECK(is_value(lam("x", mk_var("x"))));
  CHECK(is_value(mk_empty()));
  TermPtr o = mk_ext(mk_app(lam("x", mk_var("x")), mk_empty()), "m", nullptr,
                     lam("s", mk_var("s")));
  CHECK(is_value(o));  // extensions are values whatever sits inside
  CHECK(is_object(o));
  CHECK_FALSE(is_value(mk_send(mk_empty(), "m")));
  CHECK_FALSE(is_value(mk_var("x")));
}

TEST_CASE("erase_ascriptions removes every ascription") {
  TypePtr ty = tconst("int");
  TermPtr e = mk_app(mk_ascribe(lam("x", mk_ascribe(mk_var("x"), ty)), ty),
                     mk_const("1"));
  TermPtr r = erase_ascriptions(e);
  CHECK(alpha_eq_term(r, mk_app(lam("x", mk_var("x")), mk_const("1"))));
}

TEST_CASE("normalize_admin contracts identity redexes only") {
  TermPtr id = lam("x", mk_var("x"));
  TermPtr obj = mk_ext(mk_empty(), "m", nullptr, id);
  // < (\x.x) <...> <- m = ... >  ==>  < <...> <- m = ... >
  TermPtr buried = mk_ext(mk_app(id, obj), "n", nullptr, lam("w", mk_const("1")));
  TermPtr norm = normalize_admin(buried);
  CHECK(alpha_eq_term(norm,
                      mk_ext(obj, "n", nullptr, lam("w", mk_const("1")))));
  // nested identities collapse to a fixpoint
  TermPtr nested = mk_app(id, mk_app(id, mk_const("2")));
  CHECK(alpha_eq_term(normalize_admin(nested), mk_const("2")));
  // a non-identity redex is left alone
  TermPtr beta = mk_app(lam("x", mk_const("7")), mk_const("1"));
  CHECK(alpha_eq_term(normalize_admin(beta), beta));
}

TEST_CASE("term_size counts nodes") {
  CHECK(term_size(mk_empty()) == 1);
  CHECK(term_size(mk_app(mk_var("f"), mk_var("x"))) == 3);
  CHECK(term_size(mk_ext(mk_empty(), "m", nullptr, lam("s", mk_var("s")))) == 4);
}
