#pragma once

// Concrete syntax: lexer, recursive-descent parser, pretty-printers, and
// source-file handling (defs, directives, imports, constant declarations).

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "lobj/syntax.hpp"
#include "lobj/types.hpp"

namespace lobj {

struct SyntaxError : std::runtime_error {
  Span span;
  SyntaxError(std::string msg, Span sp)
      : std::runtime_error(std::move(msg)), span(sp) {}
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Def {
  std::string name;
  TermPtr term;
  Span span;
};

struct Directive {
  enum class Kind { Check, Reject, Eval, Steps };
  Kind kind;
  std::string target;
  TypePtr type;     // Check
  TermPtr expect;   // Eval
  long steps = -1;  // Steps
  SystemMode mode = SystemMode::Plain;
  long fuel = 10000;
  Span span;
};

struct SourceFile {
  std::string path;
  std::vector<Def> defs;
  std::vector<Directive> directives;
};

// Standalone entry points (used by the REPL and tests).
TermPtr parse_term(const std::string& src, const PreludeSig& sig);
TypePtr parse_type(const std::string& src, const PreludeSig& sig);

// Parses a file, resolving #use imports relative to it (depth-first,
// duplicates loaded once, cycles rejected). Imported defs precede local ones.
SourceFile parse_file(const std::string& path, const PreludeSig& sig);

// Constant declarations: `const name : type ;`. Base type names mentioned in
// declared types extend the iota set ({int, str} to start).
PreludeSig load_prelude(const std::string& path);
// The shipped signature, for callers without a prelude file.
PreludeSig builtin_prelude();

// Substitutes def references and classifies prelude constants; respects
// term-level binders.
TermPtr resolve_idents(const TermPtr& e, const PreludeSig& sig,
                       const std::map<std::string, TermPtr>& defs);

struct Program {
  std::vector<std::pair<std::string, TermPtr>> defs;  // resolved, in order
  std::vector<Directive> directives;                  // expect-terms resolved
};
Program elaborate(const SourceFile& file, const PreludeSig& sig);

std::string pretty_term(const TermPtr& e);
std::string pretty_type(const TypePtr& t);

}  // namespace lobj
