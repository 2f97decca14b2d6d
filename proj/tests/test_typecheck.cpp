#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <optional>
#include <string>

#include "lobj/parser.hpp"
#include "lobj/typecheck.hpp"

using namespace lobj;

static const PreludeSig& sig() {
  static PreludeSig s = builtin_prelude();
  return s;
}
static TermPtr pt(const std::string& s) {
  return resolve_idents(parse_term(s, sig()), sig(), {});
}
static TypePtr ty(const std::string& s) { return parse_type(s, sig()); }
static Checker ck_plain() { return Checker(sig(), SystemMode::Plain); }
static Checker ck_sub() { return Checker(sig(), SystemMode::Sub); }

static std::optional<ErrKind> infer_err(const Checker& ck, const Ctx& ctx,
                                        const TermPtr& e) {
  try {
    (void)ck.infer(ctx, e);
    return std::nullopt;
  } catch (const TypeError& err) {
    return err.kind;
  }
}
static std::optional<ErrKind> infer_err(const Checker& ck, const TermPtr& e) {
  return infer_err(ck, Ctx{}, e);
}
static std::optional<ErrKind> check_err(const Checker& ck, const Ctx& ctx,
                                        const TermPtr& e, const TypePtr& t) {
  try {
    ck.check(ctx, e, t);
    return std::nullopt;
  } catch (const TypeError& err) {
    return err.kind;
  }
}
static std::optional<ErrKind> kind_err(const Checker& ck, const TypePtr& t) {
  try {
    ck.kind_T(Ctx{}, t);
    return std::nullopt;
  } catch (const TypeError& err) {
    return err.kind;
  }
}

TEST_CASE("kinding") {
  CHECK(ck_plain().is_kinded(Ctx{},
                             ty("pro t. <add_n: t + n, n: int> + add_n")));
  CHECK(ck_plain().is_kinded(Ctx{}, ty("int -> (pro t. <m: int>)")));

  CHECK(kind_err(ck_plain(), tconst("zap")) == ErrKind::IllFormedType);
  // a free lowercase name parses as a type variable
  CHECK(kind_err(ck_plain(), ty("zap")) == ErrKind::IllFormedType);
  // activated method missing from the row
  CHECK(kind_err(ck_plain(), ty("pro t. <m: int> + q")) ==
        ErrKind::UnknownMethod);
  // a row entry may only activate methods of the same row
  CHECK(kind_err(ck_plain(), ty("pro t. <m: t + q>")) ==
        ErrKind::IllFormedType);
  // and the activation order must be admissible
  CHECK(kind_err(ck_plain(), ty("pro t. <a: t + b, b: t + a>")) ==
        ErrKind::IllFormedType);
  CHECK(ck_plain().is_kinded(
      Ctx{}, ty("pro t. <add_mn: t + m, m: t + n, n: int> + add_mn")));

  TypePtr o = ty("obj t. <n: int> + n");
  CHECK(kind_err(ck_plain(), o) == ErrKind::IllFormedType);
  CHECK(ck_sub().is_kinded(Ctx{}, o));

  // type variables are kinded through their bound
  Ctx c;
  c.push(MatchBind{"t", ty("pro t. <m: int, n: int> + m")});
  CHECK(ck_plain().is_kinded(c, tvar("t", {"m", "n"})));
  CHECK_THROWS_AS(ck_plain().kind_T(c, tvar("t", {"q"})), TypeError);
  CHECK(kind_err(ck_plain(), tvar("t")) == ErrKind::IllFormedType);

  CHECK_THROWS_AS(ty("pro t. <m: int, m: str>"), SyntaxError);
}

TEST_CASE("constants, variables, lambdas, applications") {
  Checker ck = ck_plain();
  CHECK(alpha_eq_type(ck.infer(pt("1")), tconst("int")));
  CHECK(alpha_eq_type(ck.infer(pt("\"hi\"")), tconst("str")));
  CHECK(alpha_eq_type(ck.infer(pt("plus")), ty("int -> int -> int")));
  CHECK(alpha_eq_type(ck.infer(pt("(2 + 3) + 4")), tconst("int")));

  CHECK(infer_err(ck, pt("zork")) == ErrKind::UnknownVar);
  CHECK(infer_err(ck, pt("\\x. x")) == ErrKind::AnnotationRequired);
  CHECK(alpha_eq_type(ck.infer(pt("\\x: int. x")), ty("int -> int")));

  CHECK(alpha_eq_type(ck.infer(pt("(\\x: int. x) 2")), tconst("int")));
  CHECK(infer_err(ck, pt("(\\x: int. x) \"s\"")) == ErrKind::NotMatching);
  CHECK(infer_err(ck, pt("1 2")) == ErrKind::ArityOrForm);

  // machine-produced redexes carry no annotation; the argument types first
  CHECK(alpha_eq_type(ck.infer(pt("(\\x. x) 1")), tconst("int")));
  CHECK(alpha_eq_type(ck.infer(pt("(\\x. x 2) (\\y: int. y)")),
                      tconst("int")));

  CHECK(check_err(ck, Ctx{}, pt("\\x. x"), ty("int -> int")) == std::nullopt);
  CHECK(check_err(ck, Ctx{}, pt("\\x. x"), tconst("int")) ==
        ErrKind::NotMatching);
  CHECK(check_err(ck, Ctx{}, pt("\\x: str. x"), ty("int -> int")) ==
        ErrKind::NotMatching);
}

TEST_CASE("sends and availability") {
  Checker ck = ck_plain();
  CHECK(alpha_eq_type(ck.infer(pt("<>")), ty("pro t. <>")));

  Ctx c;
  c.push(VarBind{"x", ty("pro t. <m: int, n: t + m> + m, n")});
  c.push(VarBind{"y", ty("pro t. <m: int, n: int> + m")});
  CHECK(alpha_eq_type(ck.infer(c, pt("x # m")), tconst("int")));
  // the self variable in the method type is the receiver's own type
  CHECK(alpha_eq_type(ck.infer(c, pt("x # n")),
                      ty("pro t. <m: int, n: t + m> + m, n")));
  // reserved is not available
  CHECK(infer_err(ck, c, pt("y # n")) == ErrKind::UnknownMethod);
  CHECK(infer_err(ck, c, pt("y # q")) == ErrKind::UnknownMethod);
  CHECK(infer_err(ck, pt("1 # m")) == ErrKind::ArityOrForm);
}

TEST_CASE("extension") {
  const char* kExtend =
      "< (<> : pro t. <add_n: t + n, n: int>)"
      "    <- add_n = \\self. < self <- n = \\u. 1 > >";
  TypePtr want = ty("pro t. <add_n: t + n, n: int> + add_n");
  CHECK(alpha_eq_type(ck_plain().infer(pt(kExtend)), want));
  CHECK(alpha_eq_type(ck_sub().infer(pt(kExtend)), want));

  Checker ck = ck_plain();
  Ctx c;
  c.push(VarBind{"x", ty("pro t. <m: int> + m")});

  // in-row annotations must agree with the row
  CHECK(alpha_eq_type(ck.infer(c, pt("< x <- m : int = \\s. 2 >")),
                      ty("pro t. <m: int> + m")));
  CHECK(infer_err(ck, c, pt("< x <- m : str = \\s. \"a\" >")) ==
        ErrKind::RowMismatch);

  // fresh labels demand an annotation; with one, a literal receiver widens
  CHECK(infer_err(ck, c, pt("< x <- q = \\s. 1 >")) ==
        ErrKind::AnnotationRequired);
  CHECK(alpha_eq_type(ck.infer(c, pt("< x <- q : int = \\s. 1 >")),
                      ty("pro t. <m: int, q: int> + m, q")));

  // a fresh label cannot pass through an opaque receiver type
  Ctx cv;
  cv.push(MatchBind{"t", ty("pro t. <m: int> + m")});
  cv.push(VarBind{"v", tvar("t")});
  CHECK(infer_err(ck, cv, pt("< v <- q : int = \\s. 1 >")) ==
        ErrKind::UnknownMethod);
  CHECK(alpha_eq_type(ck.infer(pt("< <> <- m : int = \\s. 1 >")),
                      ty("pro t. <m: int> + m")));
  // the bound activates the method being installed
  CHECK(alpha_eq_type(ck.infer(pt("< <> <- m : int = \\s. (s # m) >")),
                      ty("pro t. <m: int> + m")));
}

TEST_CASE("extension reads: extend vs redefine") {
  Ctx c;
  c.push(MatchBind{"t", ty("pro t. <m: int, n: int> + m, n")});
  c.push(VarBind{"x", tvar("t")});
  TermPtr e = pt("< x <- m = \\u. 2 >");

  for (Checker ck : {ck_plain(), ck_sub()}) {
    CHECK(alpha_eq_type(ck.infer(c, e), tvar("t", {"m"})));
    CHECK(check_err(ck, c, e, tvar("t")) == std::nullopt);
    CHECK(check_err(ck, c, e, tvar("t", {"m"})) == std::nullopt);
    CHECK(check_err(ck, c, e, tvar("t", {"n"})) == ErrKind::NotMatching);
  }
}

TEST_CASE("selection") {
  Checker ck = ck_plain();
  Ctx c;
  c.push(VarBind{"x", ty("pro t. <m: t + n, n: int> + m")});
  c.push(VarBind{"y", ty("pro t. <m: int> + m")});

  CHECK(alpha_eq_type(ck.infer(c, pt("sel(y, m, \\s. s)")), tconst("int")));
  // a rebuild that extends the receiver shows up in the result type
  CHECK(alpha_eq_type(ck.infer(c, pt("sel(x, m, \\s. < s <- n = \\u. 1 >)")),
                      ty("pro t. <m: t + n, n: int> + m, n")));

  CHECK(infer_err(ck, c, pt("sel(y, m, y)")) == ErrKind::ArityOrForm);
  CHECK(infer_err(ck, c, pt("sel(y, m, \\s. 1)")) == ErrKind::NotMatching);
  CHECK(infer_err(ck, c, pt("sel(y, q, \\s. s)")) == ErrKind::UnknownMethod);
}

TEST_CASE("ascription and subsumption") {
  Checker ckp = ck_plain();
  Checker cks = ck_sub();

  // reserving labels on an empty object is pre-extension, not subtyping
  CHECK(alpha_eq_type(ckp.infer(pt("(<> : pro t. <m: int>)")),
                      ty("pro t. <m: int>")));
  // but claiming availability the object lacks is rejected in both systems
  CHECK(infer_err(ckp, pt("(<> : pro t. <m: int> + m)")) ==
        ErrKind::NotMatching);
  CHECK(infer_err(cks, pt("(<> : pro t. <m: int> + m)")) ==
        ErrKind::NotMatching);

  Ctx c;
  c.push(VarBind{"p", ty("pro t. <m: int, n: int> + m, n")});
  c.push(VarBind{"q", ty("pro t. <m: t -> int> + m")});

  // promotion to a rigid object type, width included
  TermPtr prom = pt("(p : obj t. <m: int> + m)");
  CHECK(alpha_eq_type(cks.infer(c, prom), ty("obj t. <m: int> + m")));
  CHECK(infer_err(ckp, c, prom) == ErrKind::IllFormedType);

  // the promoted methods must all be there
  CHECK(infer_err(cks, c, pt("(p : obj t. <m: int, z: str> + m)")) ==
        ErrKind::NotMatching);
  CHECK(infer_err(cks, c, pt("(p : obj t. <m: str> + m)")) ==
        ErrKind::NotMatching);
  // subsumption stops at non-rigid targets
  CHECK(infer_err(cks, c, pt("(q : obj t. <m: t -> int> + m)")) ==
        ErrKind::NotRigid);
  CHECK(infer_err(cks, c, pt("(p : pro t. <m: int, n: int> + m)")) ==
        ErrKind::NotRigid);
  CHECK(infer_err(ckp, c, pt("(p : pro t. <m: int, n: int> + m)")) ==
        ErrKind::NotMatching);
}

TEST_CASE("the match relation") {
  Checker ckp = ck_plain();
  Checker cks = ck_sub();
  Ctx none;

  TypePtr P = ty("obj t. <n: int> + n");
  TypePtr CP = ty("obj t. <n: int, col: colors> + n");

  CHECK(cks.matches(none, CP, P));
  CHECK_FALSE(cks.matches(none, P, CP));
  CHECK(cks.matches(none, ty("obj t. <n: int, col: colors> + n, col"), CP));

  // pro types match by shrinking the activation set or dropping rows
  TypePtr wide = ty("pro t. <m: int, n: int> + m, n");
  CHECK(ckp.matches(none, wide, ty("pro t. <m: int, n: int> + m")));
  CHECK(ckp.matches(none, wide, ty("pro t. <m: int> + m")));
  CHECK_FALSE(ckp.matches(none, ty("pro t. <m: int, n: int> + m"), wide));
  CHECK_FALSE(ckp.matches(none, wide, ty("pro t. <m: str> + m")));

  // promotion is one way and only in the subtyping system
  CHECK(cks.matches(none, ty("pro t. <n: int, col: colors> + n, col"), P));
  CHECK_FALSE(
      ckp.matches(none, ty("pro t. <n: int, col: colors> + n, col"), P));
  CHECK_FALSE(cks.matches(none, P, ty("pro t. <n: int> + n")));

  // arrows: contravariant domain, covariant codomain, rigid domain
  CHECK(cks.matches(none, tarrow(P, tconst("int")), tarrow(CP, tconst("int"))));
  CHECK_FALSE(
      cks.matches(none, tarrow(CP, tconst("int")), tarrow(P, tconst("int"))));
  CHECK(cks.matches(none, tarrow(tconst("int"), CP),
                    tarrow(tconst("int"), P)));

  // variables match their bound, keeping their own activations
  Ctx c;
  c.push(MatchBind{"t", ty("pro t. <m: int, n: int> + m")});
  c.push(MatchBind{"s", ty("pro s. <m: int, n: int> + m")});
  CHECK(ckp.matches(c, tvar("t"), ty("pro t. <m: int, n: int> + m")));
  CHECK(ckp.matches(c, tvar("t"), ty("pro t. <m: int> + m")));
  CHECK(ckp.matches(c, tvar("t", {"n"}), ty("pro t. <m: int, n: int> + m, n")));
  CHECK_FALSE(ckp.matches(c, tvar("t"), ty("pro t. <m: int, n: int> + n")));
  // on the right a variable stands only for itself
  CHECK(ckp.matches(c, tvar("t", {"n"}), tvar("t")));
  CHECK_FALSE(ckp.matches(c, tvar("t"), tvar("t", {"n"})));
  CHECK_FALSE(ckp.matches(c, tvar("t"), tvar("s")));
}

TEST_CASE("covariance and rigidity") {
  CHECK(covariant_in("t", tvar("t")));
  CHECK(covariant_in("t", tconst("int")));
  CHECK_FALSE(covariant_in("t", ty("t -> int")));
  CHECK(covariant_in("t", ty("(t -> int) -> int")));
  CHECK(covariant_in("t", ty("int -> (pro s. <m: t>)")));

  Checker cks = ck_sub();
  CHECK(cks.is_rigid(Ctx{}, ty("obj t. <n: int, f: int -> int> + n")));
  CHECK_FALSE(cks.is_rigid(Ctx{}, ty("pro t. <n: int> + n")));
  CHECK_FALSE(cks.is_rigid(Ctx{}, ty("obj t. <m: t -> int> + m")));

  Ctx c;
  c.push(MatchBind{"t", ty("obj t. <n: int> + n")});
  c.push(MatchBind{"u", ty("pro u. <n: int> + n")});
  CHECK(cks.is_rigid(c, tvar("t")));
  CHECK_FALSE(cks.is_rigid(c, tvar("u")));
}

TEST_CASE("programs no system accepts") {
  // re-extension inside a method body cannot return the outer self
  TermPtr andback = pt(
      "< (<> : pro t. <extend: t + delete, delete: t>)"
      "    <- extend = \\s. < s <- delete = \\s'. s > >");
  CHECK(infer_err(ck_plain(), andback) == ErrKind::NotMatching);
  CHECK(infer_err(ck_sub(), andback) == ErrKind::NotMatching);

  // the three irreducible selection shapes
  for (Checker ck : {ck_plain(), ck_sub()}) {
    CHECK(infer_err(ck, pt("sel(<>, m, \\s. s)")) == ErrKind::UnknownMethod);
    CHECK(infer_err(ck, pt("sel(\\x: int. x, m, \\s. s)")) ==
          ErrKind::ArityOrForm);
    CHECK(infer_err(ck, pt("sel(1, m, \\s. s)")) == ErrKind::ArityOrForm);
  }
}
