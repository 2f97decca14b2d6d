#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "lobj/corpus.hpp"
#include "lobj/harness.hpp"
#include "lobj/parser.hpp"
#include "lobj/reduction.hpp"
#include "lobj/typecheck.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace lobj;

namespace {

// check: 0 ok, 1 type error, 2 syntax error, 3 io error
// eval:  0 value, 1 wrong, 4 out of fuel, 5 stuck (2/3 as above)
enum ExitCode {
  kOk = 0, kTypeError = 1, kWrong = 1, kSyntax = 2, kIo = 3,
  kFuel = 4, kStuck = 5,
};

SystemMode parse_mode(const std::string& s) {
  return s == "sub" ? SystemMode::Sub : SystemMode::Plain;
}

PreludeSig find_prelude(const std::string& near_file) {
  if (const char* env = std::getenv("LOBJ_PRELUDE")) return load_prelude(env);
  if (!near_file.empty()) {
    fs::path sibling = fs::path(near_file).parent_path() / "prelude.lobj";
    if (fs::exists(sibling)) return load_prelude(sibling.string());
  }
  if (fs::exists("corpus/prelude.lobj"))
    return load_prelude("corpus/prelude.lobj");
  return builtin_prelude();
}

void emit_error(bool as_json, const std::string& rule, const std::string& kind,
                Span sp, const std::string& msg) {
  if (as_json) {
    json j{{"rule", rule}, {"kind", kind}, {"line", sp.line}, {"col", sp.col},
           {"message", msg}};
    std::cout << j.dump() << "\n";
  } else {
    std::cout << "error";
    if (sp.line) std::cout << " at " << sp.line << ":" << sp.col;
    std::cout << " [" << rule << "] " << msg << "\n";
  }
}

const char* wrong_name(WrongKind k) {
  switch (k) {
    case WrongKind::EmptyReceiver: return "empty-sel";
    case WrongKind::LamReceiver: return "lam-sel";
    case WrongKind::ConstReceiver: return "const-sel";
  }
  return "?";
}

int cmd_check(const std::string& file, SystemMode mode, bool as_json) {
  PreludeSig sig = find_prelude(file);
  SourceFile sf = parse_file(file, sig);
  Program prog = elaborate(sf, sig);

  std::map<std::string, const Directive*> checks, rejects;
  for (auto& d : prog.directives) {
    if (d.kind == Directive::Kind::Check) checks[d.target] = &d;
    if (d.kind == Directive::Kind::Reject) rejects[d.target] = &d;
  }

  int rc = kOk;
  for (auto& [name, term] : prog.defs) {
    if (auto it = rejects.find(name); it != rejects.end()) {
      Checker ck(sig, it->second->mode);
      try {
        TypePtr ty = ck.infer(term);
        emit_error(as_json, "reject", "UnexpectedlyTyped", it->second->span,
                   name + " : " + pretty_type(ty) + " (expected rejection)");
        rc = kTypeError;
      } catch (const TypeError& ex) {
        if (!as_json)
          std::cout << name << " : rejected [" << ex.rule << "]\n";
      }
      continue;
    }
    SystemMode m = mode;
    const Directive* want = nullptr;
    if (auto it = checks.find(name); it != checks.end()) {
      want = it->second;
      m = want->mode;
    }
    Checker ck(sig, m);
    try {
      TypePtr shown;
      if (want) {
        ck.check(term, want->type);
        try {
          shown = ck.infer(term);
        } catch (const TypeError&) {
          shown = want->type;
        }
      } else {
        shown = ck.infer(term);
      }
      if (as_json) {
        std::cout << json{{"def", name}, {"type", pretty_type(shown)}}.dump()
                  << "\n";
      } else {
        std::cout << name << " : " << pretty_type(shown) << "\n";
      }
    } catch (const TypeError& ex) {
      emit_error(as_json, ex.rule, err_kind_name(ex.kind), ex.span,
                 name + ": " + ex.what());
      rc = kTypeError;
    }
  }
  return rc;
}

int cmd_eval(const std::string& file, long fuel, bool trace, bool as_json) {
  PreludeSig sig = find_prelude(file);
  SourceFile sf = parse_file(file, sig);
  Program prog = elaborate(sf, sig);
  if (prog.defs.empty()) {
    emit_error(as_json, "eval", "NoProgram", {}, "file defines no terms");
    return kIo;
  }
  const auto& [name, term] = prog.defs.back();
  Outcome out = eval(term, fuel, trace);
  if (trace && !as_json) std::cout << format_trace(term, out.trace);
  switch (out.kind) {
    case OutcomeKind::Value:
      if (as_json)
        std::cout << json{{"outcome", "value"},
                          {"result", pretty_term(out.result)},
                          {"steps", out.steps}}.dump()
                  << "\n";
      else
        std::cout << "value: " << pretty_term(out.result) << "\n";
      return kOk;
    case OutcomeKind::Wrong:
      if (as_json)
        std::cout << json{{"outcome", "wrong"},
                          {"wrong", wrong_name(*out.wrong)},
                          {"result", pretty_term(out.result)},
                          {"steps", out.steps}}.dump()
                  << "\n";
      else
        std::cout << "wrong: " << wrong_name(*out.wrong) << "\n";
      return kWrong;
    case OutcomeKind::OutOfFuel:
      if (as_json)
        std::cout << json{{"outcome", "out-of-fuel"}, {"steps", out.steps}}
                         .dump()
                  << "\n";
      else
        std::cout << "out-of-fuel after " << out.steps << " steps\n";
      return kFuel;
    default:
      if (as_json)
        std::cout << json{{"outcome", "stuck"},
                          {"result", pretty_term(out.result)},
                          {"steps", out.steps}}.dump()
                  << "\n";
      else
        std::cout << "stuck: " << pretty_term(out.result) << "\n";
      return kStuck;
  }
}

int cmd_repl(SystemMode mode, long fuel) {
  PreludeSig sig = find_prelude("");
  std::map<std::string, TermPtr> defs;
  std::string line;
  std::cout << "lobj repl; :t TERM, :e TERM, :load FILE, :mode plain|sub, "
               ":q\n";
  while (std::cout << "lobj> " << std::flush, std::getline(std::cin, line)) {
    try {
      if (line == ":q" || line == ":quit") break;
      if (line.empty()) continue;
      if (line.rfind(":mode", 0) == 0) {
        mode = parse_mode(line.substr(line.find_last_of(' ') + 1));
        std::cout << (mode == SystemMode::Sub ? "sub" : "plain") << "\n";
      } else if (line.rfind(":load ", 0) == 0) {
        std::string path = line.substr(6);
        SourceFile sf = parse_file(path, sig);
        Program prog = elaborate(sf, sig);
        for (auto& [n, t] : prog.defs) defs[n] = t;
        std::cout << "loaded " << prog.defs.size() << " definitions\n";
      } else if (line.rfind(":t ", 0) == 0) {
        TermPtr e = resolve_idents(parse_term(line.substr(3), sig), sig, defs);
        Checker ck(sig, mode);
        std::cout << pretty_type(ck.infer(e)) << "\n";
      } else if (line.rfind(":e ", 0) == 0) {
        TermPtr e = resolve_idents(parse_term(line.substr(3), sig), sig, defs);
        Outcome out = eval(e, fuel);
        switch (out.kind) {
          case OutcomeKind::Value:
            std::cout << pretty_term(out.result) << "\n";
            break;
          case OutcomeKind::Wrong:
            std::cout << "wrong: " << wrong_name(*out.wrong) << "\n";
            break;
          case OutcomeKind::OutOfFuel:
            std::cout << "out-of-fuel\n";
            break;
          default:
            std::cout << "stuck: " << pretty_term(out.result) << "\n";
        }
      } else {
        std::cout << "commands: :t TERM | :e TERM | :load FILE | :mode "
                     "plain|sub | :q\n";
      }
    } catch (const TypeError& ex) {
      std::cout << "type error [" << ex.rule << "] " << ex.what() << "\n";
    } catch (const std::exception& ex) {
      std::cout << "error: " << ex.what() << "\n";
    }
  }
  return kOk;
}

int cmd_corpus(const std::string& dir) {
  CorpusReport rep = run_corpus(dir);
  std::cout << rep.to_string();
  return rep.ok() ? kOk : 1;
}

int cmd_prop(const std::string& name, const GenConfig& cfg, bool as_json) {
  std::vector<PropertyReport> reports;
  if (name == "all") {
    reports = prop_all(cfg);
  } else if (name == "subject-reduction" || name == "sr") {
    reports.push_back(prop_subject_reduction(cfg));
  } else if (name == "no-wrong") {
    reports.push_back(prop_no_wrong(cfg));
  } else if (name == "confluence") {
    reports.push_back(prop_confluence(cfg));
  } else if (name == "matching" || name == "matching-laws") {
    reports.push_back(prop_matching_laws(cfg));
  } else if (name == "substitution") {
    reports.push_back(prop_substitution(cfg));
  } else if (name == "round-trip" || name == "roundtrip") {
    reports.push_back(prop_roundtrip(cfg));
  } else {
    std::cerr << "unknown property: " << name << "\n";
    return kIo;
  }
  bool ok = true;
  for (auto& r : reports) {
    ok = ok && r.ok();
    if (as_json) {
      json fails = json::array();
      for (auto& f : r.failures)
        fails.push_back({{"term", f.term}, {"type", f.type},
                         {"trace", f.trace}, {"shrunk", f.shrunk}});
      std::cout << json{{"property", r.property},
                        {"mode", r.mode == SystemMode::Sub ? "sub" : "plain"},
                        {"seed", r.seed},
                        {"cases", r.cases},
                        {"passed", r.passed},
                        {"unknown", r.unknown},
                        {"failures", fails}}.dump()
                << "\n";
    } else {
      std::cout << r.to_string();
    }
  }
  return ok ? kOk : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lambda calculus of objects with self-inflicted extension"};
  app.require_subcommand(1);

  std::string file, dir, mode_s = "plain", prop_name = "all";
  long fuel = 10000;
  bool trace = false, as_json = false;
  GenConfig cfg;

  auto* check = app.add_subcommand("check", "type-check a file's definitions");
  check->add_option("file", file)->required();
  check->add_option("--mode", mode_s)->check(CLI::IsMember({"plain", "sub"}));
  check->add_flag("--json", as_json);

  auto* ev = app.add_subcommand("eval", "evaluate a file's last definition");
  ev->add_option("file", file)->required();
  ev->add_option("--fuel", fuel);
  ev->add_option("--mode", mode_s)->check(CLI::IsMember({"plain", "sub"}));
  ev->add_flag("--trace", trace);
  ev->add_flag("--json", as_json);

  auto* repl = app.add_subcommand("repl", "interactive session");
  repl->add_option("--mode", mode_s)->check(CLI::IsMember({"plain", "sub"}));
  repl->add_option("--fuel", fuel);

  auto* corpus = app.add_subcommand("corpus", "golden corpus runner");
  auto* crun = corpus->add_subcommand("run", "run all directives under DIR");
  crun->add_option("dir", dir)->required();

  auto* prop = app.add_subcommand("prop", "property suites");
  prop->add_option("name", prop_name,
                   "all|sr|no-wrong|confluence|matching|substitution|"
                   "round-trip");
  prop->add_option("--seed", cfg.seed);
  prop->add_option("--count", cfg.count);
  prop->add_option("--size", cfg.max_term_size);
  prop->add_option("--width", cfg.max_row_width);
  prop->add_option("--depth", cfg.max_depth);
  prop->add_option("--mode", mode_s)->check(CLI::IsMember({"plain", "sub"}));
  prop->add_flag("--json", as_json);

  CLI11_PARSE(app, argc, argv);
  SystemMode mode = parse_mode(mode_s);
  cfg.mode = mode;

  try {
    if (check->parsed()) return cmd_check(file, mode, as_json);
    if (ev->parsed()) return cmd_eval(file, fuel, trace, as_json);
    if (repl->parsed()) return cmd_repl(mode, fuel);
    if (corpus->parsed()) {
      if (!crun->parsed()) {
        std::cerr << "usage: lobj corpus run DIR\n";
        return kIo;
      }
      return cmd_corpus(dir);
    }
    if (prop->parsed()) return cmd_prop(prop_name, cfg, as_json);
  } catch (const TypeError& ex) {
    emit_error(as_json, ex.rule, err_kind_name(ex.kind), ex.span, ex.what());
    return kTypeError;
  } catch (const SyntaxError& ex) {
    emit_error(as_json, "syntax", "SyntaxError", ex.span, ex.what());
    return kSyntax;
  } catch (const IoError& ex) {
    emit_error(as_json, "io", "IoError", {}, ex.what());
    return kIo;
  } catch (const std::exception& ex) {
    emit_error(as_json, "internal", "Internal", {}, ex.what());
    return kIo;
  }
  return kOk;
}
