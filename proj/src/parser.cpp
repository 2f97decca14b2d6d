#include "lobj/parser.hpp"

#include <cctype>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace lobj {

namespace {

enum class Tok {
  Ident, Int, Str,
  KwDef, KwSel, KwPro, KwObj, KwConst,
  Lambda, Dot, LParen, RParen, Lt, Gt, LArrow, RArrow, FatArrow,
  Hash, Plus, Comma, Colon, Semi, Eq, LBrack, RBrack,
  End,
};

struct Token {
  Tok kind;
  std::string text;
  Span span;
};

bool ident_start(char c) { return std::isalpha((unsigned char)c) || c == '_'; }
bool ident_char(char c) {
  return std::isalnum((unsigned char)c) || c == '_' || c == '\'';
}

std::vector<Token> lex(const std::string& src) {
  std::vector<Token> out;
  int line = 1, col = 1;
  size_t i = 0;
  auto push = [&](Tok k, std::string t, Span sp) {
    out.push_back({k, std::move(t), sp});
  };
  while (i < src.size()) {
    char c = src[i];
    Span sp{line, col};
    if (c == '\n') {
      line++;
      col = 1;
      i++;
      continue;
    }
    if (c == ' ' || c == '\t' || c == '\r') {
      i++;
      col++;
      continue;
    }
    if (c == '-' && i + 1 < src.size() && src[i + 1] == '-') {
      while (i < src.size() && src[i] != '\n') i++;
      continue;
    }
    if (c == '-' && i + 1 < src.size() && src[i + 1] == '>') {
      push(Tok::RArrow, "->", sp);
      i += 2;
      col += 2;
      continue;
    }
    if (c == '<' && i + 1 < src.size() && src[i + 1] == '-') {
      push(Tok::LArrow, "<-", sp);
      i += 2;
      col += 2;
      continue;
    }
    if (c == '=' && i + 1 < src.size() && src[i + 1] == '>') {
      push(Tok::FatArrow, "=>", sp);
      i += 2;
      col += 2;
      continue;
    }
    if (ident_start(c)) {
      size_t j = i;
      while (j < src.size() && ident_char(src[j])) j++;
      std::string word = src.substr(i, j - i);
      Tok k = Tok::Ident;
      if (word == "def") k = Tok::KwDef;
      else if (word == "sel") k = Tok::KwSel;
      else if (word == "pro") k = Tok::KwPro;
      else if (word == "obj") k = Tok::KwObj;
      else if (word == "const") k = Tok::KwConst;
      push(k, word, sp);
      col += int(j - i);
      i = j;
      continue;
    }
    if (std::isdigit((unsigned char)c)) {
      size_t j = i;
      while (j < src.size() && std::isdigit((unsigned char)src[j])) j++;
      push(Tok::Int, src.substr(i, j - i), sp);
      col += int(j - i);
      i = j;
      continue;
    }
    if (c == '"') {
      size_t j = i + 1;
      while (j < src.size() && src[j] != '"' && src[j] != '\n') j++;
      if (j >= src.size() || src[j] != '"')
        throw SyntaxError("unterminated string literal", sp);
      push(Tok::Str, src.substr(i, j - i + 1), sp);
      col += int(j - i + 1);
      i = j + 1;
      continue;
    }
    Tok k;
    switch (c) {
      case '\\': k = Tok::Lambda; break;
      case '.': k = Tok::Dot; break;
      case '(': k = Tok::LParen; break;
      case ')': k = Tok::RParen; break;
      case '<': k = Tok::Lt; break;
      case '>': k = Tok::Gt; break;
      case '#': k = Tok::Hash; break;
      case '+': k = Tok::Plus; break;
      case ',': k = Tok::Comma; break;
      case ':': k = Tok::Colon; break;
      case ';': k = Tok::Semi; break;
      case '=': k = Tok::Eq; break;
      case '[': k = Tok::LBrack; break;
      case ']': k = Tok::RBrack; break;
      default:
        throw SyntaxError(std::string("unexpected character '") + c + "'", sp);
    }
    push(k, std::string(1, c), sp);
    i++;
    col++;
  }
  out.push_back({Tok::End, "", {line, col}});
  return out;
}

struct Parser {
  std::vector<Token> toks;
  size_t pos = 0;
  const PreludeSig* sig;

  const Token& peek(size_t ahead = 0) const {
    size_t i = pos + ahead;
    return i < toks.size() ? toks[i] : toks.back();
  }
  const Token& next() {
    const Token& t = peek();
    if (t.kind != Tok::End) pos++;
    return t;
  }
  bool at(Tok k) const { return peek().kind == k; }
  Token expect(Tok k, const std::string& what) {
    if (!at(k))
      throw SyntaxError("expected " + what + ", found '" + peek().text + "'",
                        peek().span);
    return next();
  }

  // --- types ---

  TypePtr parse_type_top() { return parse_arrow(); }

  TypePtr parse_arrow() {
    TypePtr lhs = parse_tatom_plus();
    if (at(Tok::RArrow)) {
      next();
      return tarrow(lhs, parse_arrow());
    }
    return lhs;
  }

  NameSet parse_plus_list() {
    NameSet out;
    while (at(Tok::Plus)) {
      next();
      out.insert(expect(Tok::Ident, "method name").text);
      // after a comma, an identifier belongs to the plus list unless the
      // token after it is ':' (then it starts a row entry)
      while (at(Tok::Comma) && peek(1).kind == Tok::Ident &&
             peek(2).kind != Tok::Colon) {
        next();
        out.insert(expect(Tok::Ident, "method name").text);
      }
    }
    return out;
  }

  Row parse_row() {
    expect(Tok::Lt, "'<'");
    Row row;
    if (at(Tok::Gt)) {
      next();
      return row;
    }
    for (;;) {
      Token label = expect(Tok::Ident, "row label");
      expect(Tok::Colon, "':'");
      TypePtr ty = parse_type_top();
      if (row.count(label.text))
        throw SyntaxError("duplicate row label '" + label.text + "'",
                          label.span);
      row.emplace(label.text, std::move(ty));
      if (at(Tok::Comma)) {
        next();
        continue;
      }
      expect(Tok::Gt, "'>' or ','");
      return row;
    }
  }

  TypePtr parse_tatom_plus() {
    if (at(Tok::KwPro) || at(Tok::KwObj)) {
      Flavor f = at(Tok::KwPro) ? Flavor::Pro : Flavor::Obj;
      next();
      Token binder = expect(Tok::Ident, "type variable");
      expect(Tok::Dot, "'.'");
      Row row = parse_row();
      NameSet plus = parse_plus_list();
      return tobj(f, binder.text, std::move(row), std::move(plus));
    }
    if (at(Tok::LParen)) {
      next();
      TypePtr t = parse_type_top();
      expect(Tok::RParen, "')'");
      return t;
    }
    Token id = expect(Tok::Ident, "a type");
    NameSet plus = parse_plus_list();
    if (sig->iota.count(id.text)) {
      if (!plus.empty())
        throw SyntaxError("base type '" + id.text + "' takes no '+' methods",
                          id.span);
      return tconst(id.text);
    }
    return tvar(id.text, std::move(plus));
  }

  // --- terms ---

  bool atom_start() const {
    switch (peek().kind) {
      case Tok::Lt:
      case Tok::KwSel:
      case Tok::LParen:
      case Tok::Ident:
      case Tok::Int:
      case Tok::Str:
        return true;
      default:
        return false;
    }
  }

  TermPtr parse_term_top() {
    if (at(Tok::Lambda)) {
      Span sp = peek().span;
      next();
      Token param = expect(Tok::Ident, "parameter name");
      TypePtr annot;
      if (at(Tok::Colon)) {
        next();
        annot = parse_type_top();
      }
      expect(Tok::Dot, "'.'");
      return mk_lam(param.text, annot, parse_term_top(), sp);
    }
    return parse_sum();
  }

  TermPtr parse_sum() {
    TermPtr lhs = parse_send();
    while (at(Tok::Plus)) {
      Span sp = peek().span;
      next();
      TermPtr rhs = parse_send();
      lhs = mk_app(mk_app(mk_var("plus", sp), std::move(lhs), sp),
                   std::move(rhs), sp);
    }
    return lhs;
  }

  TermPtr parse_send() {
    TermPtr e = parse_app();
    while (at(Tok::Hash)) {
      Span sp = peek().span;
      next();
      Token m = expect(Tok::Ident, "method name");
      e = mk_send(std::move(e), m.text, sp);
    }
    return e;
  }

  TermPtr parse_app() {
    TermPtr e = parse_atom();
    while (atom_start()) {
      Span sp = peek().span;
      e = mk_app(std::move(e), parse_atom(), sp);
    }
    return e;
  }

  TermPtr parse_atom() {
    Span sp = peek().span;
    switch (peek().kind) {
      case Tok::Lt: {
        next();
        if (at(Tok::Gt)) {
          next();
          return mk_empty(sp);
        }
        TermPtr obj = parse_term_top();
        expect(Tok::LArrow, "'<-'");
        Token m = expect(Tok::Ident, "method name");
        TypePtr annot;
        if (at(Tok::Colon)) {
          next();
          annot = parse_type_top();
        }
        expect(Tok::Eq, "'='");
        TermPtr body = parse_term_top();
        expect(Tok::Gt, "'>'");
        return mk_ext(std::move(obj), m.text, annot, std::move(body), sp);
      }
      case Tok::KwSel: {
        next();
        expect(Tok::LParen, "'('");
        TermPtr obj = parse_term_top();
        expect(Tok::Comma, "','");
        Token m = expect(Tok::Ident, "method name");
        expect(Tok::Comma, "','");
        TermPtr rebuild = parse_term_top();
        expect(Tok::RParen, "')'");
        return mk_sel(std::move(obj), m.text, std::move(rebuild), sp);
      }
      case Tok::LParen: {
        next();
        TermPtr e = parse_term_top();
        if (at(Tok::Colon)) {
          next();
          TypePtr ty = parse_type_top();
          expect(Tok::RParen, "')'");
          return mk_ascribe(std::move(e), std::move(ty), sp);
        }
        expect(Tok::RParen, "')'");
        return e;
      }
      case Tok::Ident:
        return mk_var(next().text, sp);
      case Tok::Int:
      case Tok::Str:
        return mk_const(next().text, sp);
      default:
        throw SyntaxError("expected a term, found '" + peek().text + "'", sp);
    }
  }

  // --- files ---

  Directive::Kind directive_kind(const Token& word) {
    if (word.text == "check") return Directive::Kind::Check;
    if (word.text == "reject") return Directive::Kind::Reject;
    if (word.text == "eval") return Directive::Kind::Eval;
    if (word.text == "steps") return Directive::Kind::Steps;
    throw SyntaxError("unknown directive '#" + word.text + "'", word.span);
  }

  void parse_opts(Directive& d) {
    if (!at(Tok::LBrack)) return;
    next();
    Token m = expect(Tok::Ident, "'plain' or 'sub'");
    if (m.text == "plain") d.mode = SystemMode::Plain;
    else if (m.text == "sub") d.mode = SystemMode::Sub;
    else throw SyntaxError("expected 'plain' or 'sub'", m.span);
    if (at(Tok::Comma)) {
      next();
      Token f = expect(Tok::Ident, "'fuel'");
      if (f.text != "fuel") throw SyntaxError("expected 'fuel'", f.span);
      expect(Tok::Eq, "'='");
      d.fuel = std::stol(expect(Tok::Int, "fuel amount").text);
    }
    expect(Tok::RBrack, "']'");
  }
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Free type variables (not iota, which the parser already classified)
// declared in a prelude become new base types.
TypePtr promote_free_tvars(const TypePtr& t, NameSet& bound, NameSet& iota) {
  if (as_tconst(t)) return t;
  if (auto* a = as_tarrow(t)) {
    TypePtr d = promote_free_tvars(a->dom, bound, iota);
    TypePtr c = promote_free_tvars(a->cod, bound, iota);
    return tarrow(std::move(d), std::move(c));
  }
  if (auto* v = as_tvar(t)) {
    if (bound.count(v->name) || !v->plus.empty()) return t;
    iota.insert(v->name);
    return tconst(v->name);
  }
  auto* o = as_tobj(t);
  bool added = bound.insert(o->binder).second;
  Row row = o->row;
  for (auto& [label, ty] : row) ty = promote_free_tvars(ty, bound, iota);
  if (added) bound.erase(o->binder);
  return tobj(o->flavor, o->binder, std::move(row), o->plus);
}

void parse_file_into(const std::string& path, const PreludeSig& sig,
                     SourceFile& out, std::set<std::string>& loaded,
                     std::set<std::string>& loading) {
  namespace fs = std::filesystem;
  std::string canon;
  try {
    canon = fs::weakly_canonical(fs::path(path)).string();
  } catch (const fs::filesystem_error&) {
    canon = path;
  }
  if (loaded.count(canon)) return;
  if (loading.count(canon)) throw IoError("import cycle through '" + path + "'");
  loading.insert(canon);

  Parser p{lex(read_file(path)), 0, &sig};
  while (!p.at(Tok::End)) {
    if (p.at(Tok::Hash)) {
      Span sp = p.peek().span;
      p.next();
      Token word = p.expect(Tok::Ident, "directive name");
      if (word.text == "use") {
        Token file = p.expect(Tok::Str, "file name");
        p.expect(Tok::Semi, "';'");
        std::string rel = file.text.substr(1, file.text.size() - 2);
        if (rel.find(".lobj") == std::string::npos) rel += ".lobj";
        fs::path target = fs::path(path).parent_path() / rel;
        parse_file_into(target.string(), sig, out, loaded, loading);
        continue;
      }
      Directive d;
      d.kind = p.directive_kind(word);
      d.span = sp;
      d.target = p.expect(Tok::Ident, "def name").text;
      switch (d.kind) {
        case Directive::Kind::Check:
          p.expect(Tok::Colon, "':'");
          d.type = p.parse_type_top();
          p.parse_opts(d);
          break;
        case Directive::Kind::Reject:
          p.parse_opts(d);
          break;
        case Directive::Kind::Eval:
          p.expect(Tok::FatArrow, "'=>'");
          d.expect = p.parse_term_top();
          p.parse_opts(d);
          break;
        case Directive::Kind::Steps:
          p.expect(Tok::Eq, "'='");
          d.steps = std::stol(p.expect(Tok::Int, "step count").text);
          break;
      }
      p.expect(Tok::Semi, "';'");
      out.directives.push_back(std::move(d));
      continue;
    }
    if (p.at(Tok::KwDef)) {
      Span sp = p.peek().span;
      p.next();
      Token name = p.expect(Tok::Ident, "def name");
      p.expect(Tok::Eq, "'='");
      TermPtr body = p.parse_term_top();
      p.expect(Tok::Semi, "';'");
      out.defs.push_back({name.text, std::move(body), sp});
      continue;
    }
    throw SyntaxError("expected a def or directive, found '" + p.peek().text +
                          "'",
                      p.peek().span);
  }
  loading.erase(canon);
  loaded.insert(canon);
}

}  // namespace

TermPtr parse_term(const std::string& src, const PreludeSig& sig) {
  Parser p{lex(src), 0, &sig};
  TermPtr e = p.parse_term_top();
  p.expect(Tok::End, "end of input");
  return e;
}

TypePtr parse_type(const std::string& src, const PreludeSig& sig) {
  Parser p{lex(src), 0, &sig};
  TypePtr t = p.parse_type_top();
  p.expect(Tok::End, "end of input");
  return t;
}

SourceFile parse_file(const std::string& path, const PreludeSig& sig) {
  SourceFile out;
  out.path = path;
  std::set<std::string> loaded, loading;
  parse_file_into(path, sig, out, loaded, loading);
  return out;
}

PreludeSig builtin_prelude() {
  PreludeSig sig;
  sig.iota = {"int", "str", "bool", "colors"};
  TypePtr i = tconst("int");
  TypePtr b = tconst("bool");
  TypePtr c = tconst("colors");
  sig.consts["true"] = b;
  sig.consts["false"] = b;
  sig.consts["white"] = c;
  sig.consts["black"] = c;
  sig.consts["plus"] = tarrow(i, tarrow(i, i));
  sig.consts["equal_int"] = tarrow(i, tarrow(i, b));
  return sig;
}

PreludeSig load_prelude(const std::string& path) {
  PreludeSig sig;
  sig.iota = {"int", "str"};
  Parser p{lex(read_file(path)), 0, &sig};
  while (!p.at(Tok::End)) {
    p.expect(Tok::KwConst, "'const'");
    Token name = p.expect(Tok::Ident, "constant name");
    p.expect(Tok::Colon, "':'");
    TypePtr ty = p.parse_type_top();
    p.expect(Tok::Semi, "';'");
    NameSet bound;
    sig.consts[name.text] = promote_free_tvars(ty, bound, sig.iota);
  }
  return sig;
}

TermPtr resolve_idents(const TermPtr& e, const PreludeSig& sig,
                       const std::map<std::string, TermPtr>& defs) {
  struct Walk {
    const PreludeSig& sig;
    const std::map<std::string, TermPtr>& defs;
    NameSet bound;

    TermPtr go(const TermPtr& e) {
      if (as_const(e) || as_empty(e)) return e;
      if (auto* v = as_var(e)) {
        if (bound.count(v->name)) return e;
        auto d = defs.find(v->name);
        if (d != defs.end()) return d->second;
        if (sig.consts.count(v->name)) return mk_const(v->name, e->span);
        return e;
      }
      if (auto* l = as_lam(e)) {
        bool added = bound.insert(l->param).second;
        TermPtr b = go(l->body);
        if (added) bound.erase(l->param);
        return mk_lam(l->param, l->annot, std::move(b), e->span);
      }
      if (auto* a = as_app(e))
        return mk_app(go(a->fn), go(a->arg), e->span);
      if (auto* x = as_ext(e))
        return mk_ext(go(x->obj), x->method, x->annot, go(x->body), e->span);
      if (auto* s = as_send(e)) return mk_send(go(s->obj), s->method, e->span);
      if (auto* s = as_sel(e))
        return mk_sel(go(s->obj), s->method, go(s->rebuild), e->span);
      auto* asc = as_ascribe(e);
      return mk_ascribe(go(asc->term), asc->type, e->span);
    }
  };
  Walk w{sig, defs, {}};
  return w.go(e);
}

Program elaborate(const SourceFile& file, const PreludeSig& sig) {
  Program prog;
  std::map<std::string, TermPtr> defmap;
  for (auto& d : file.defs) {
    TermPtr resolved = resolve_idents(d.term, sig, defmap);
    defmap[d.name] = resolved;
    prog.defs.emplace_back(d.name, std::move(resolved));
  }
  for (auto& dir : file.directives) {
    Directive d = dir;
    if (d.expect) d.expect = resolve_idents(d.expect, sig, defmap);
    prog.directives.push_back(std::move(d));
  }
  return prog;
}

// --- pretty printing ---

namespace {

enum class TermCtx { Top, SendObj, AppFun, AppArg };

bool needs_parens(const TermPtr& e, TermCtx ctx) {
  switch (ctx) {
    case TermCtx::Top:
      return false;
    case TermCtx::SendObj:
      return as_lam(e) != nullptr;
    case TermCtx::AppFun:
      return as_lam(e) || as_send(e);
    case TermCtx::AppArg:
      return as_lam(e) || as_send(e) || as_app(e);
  }
  return false;
}

void pp_term(const TermPtr& e, TermCtx ctx, std::ostream& os) {
  if (needs_parens(e, ctx)) {
    os << "(";
    pp_term(e, TermCtx::Top, os);
    os << ")";
    return;
  }
  if (auto* c = as_const(e)) {
    os << c->lit;
    return;
  }
  if (auto* v = as_var(e)) {
    os << v->name;
    return;
  }
  if (auto* l = as_lam(e)) {
    os << "\\" << l->param;
    if (l->annot) os << ": " << pretty_type(l->annot);
    os << ". ";
    pp_term(l->body, TermCtx::Top, os);
    return;
  }
  if (auto* a = as_app(e)) {
    pp_term(a->fn, TermCtx::AppFun, os);
    os << " ";
    pp_term(a->arg, TermCtx::AppArg, os);
    return;
  }
  if (as_empty(e)) {
    os << "<>";
    return;
  }
  if (auto* x = as_ext(e)) {
    os << "< ";
    pp_term(x->obj, TermCtx::Top, os);
    os << " <- " << x->method;
    if (x->annot) os << " : " << pretty_type(x->annot);
    os << " = ";
    pp_term(x->body, TermCtx::Top, os);
    os << " >";
    return;
  }
  if (auto* s = as_send(e)) {
    pp_term(s->obj, TermCtx::SendObj, os);
    os << " # " << s->method;
    return;
  }
  if (auto* s = as_sel(e)) {
    os << "sel(";
    pp_term(s->obj, TermCtx::Top, os);
    os << ", " << s->method << ", ";
    pp_term(s->rebuild, TermCtx::Top, os);
    os << ")";
    return;
  }
  auto* asc = as_ascribe(e);
  os << "(";
  pp_term(asc->term, TermCtx::Top, os);
  os << " : " << pretty_type(asc->type) << ")";
}

void pp_plus(const NameSet& plus, std::ostream& os) {
  if (plus.empty()) return;
  os << " +";
  bool first = true;
  for (auto& m : plus) {
    os << (first ? " " : ", ") << m;
    first = false;
  }
}

void pp_type(const TypePtr& t, bool arrow_dom, std::ostream& os) {
  if (auto* c = as_tconst(t)) {
    os << c->name;
    return;
  }
  if (auto* a = as_tarrow(t)) {
    if (arrow_dom) {
      os << "(";
      pp_type(t, false, os);
      os << ")";
      return;
    }
    pp_type(a->dom, true, os);
    os << " -> ";
    pp_type(a->cod, false, os);
    return;
  }
  if (auto* v = as_tvar(t)) {
    os << v->name;
    pp_plus(v->plus, os);
    return;
  }
  auto* o = as_tobj(t);
  os << (o->flavor == Flavor::Pro ? "pro " : "obj ") << o->binder << ". <";
  bool first = true;
  for (auto& [label, ty] : o->row) {
    if (!first) os << ", ";
    os << label << ": ";
    pp_type(ty, false, os);
    first = false;
  }
  os << ">";
  pp_plus(o->plus, os);
}

}  // namespace

std::string pretty_term(const TermPtr& e) {
  std::ostringstream os;
  pp_term(e, TermCtx::Top, os);
  return os.str();
}

std::string pretty_type(const TypePtr& t) {
  std::ostringstream os;
  pp_type(t, false, os);
  return os.str();
}

}  // namespace lobj
