#include "lobj/corpus.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "lobj/reduction.hpp"
#include "lobj/typecheck.hpp"

namespace fs = std::filesystem;

namespace lobj {

void CorpusReport::add(DirectiveResult r) {
  (r.pass ? passed : failed)++;
  results.push_back(std::move(r));
}

std::string CorpusReport::to_string() const {
  std::ostringstream os;
  for (auto& r : results) {
    os << (r.pass ? "PASS" : "FAIL") << " " << r.file << ":" << r.line << " #"
       << r.kind << " " << r.target << " ["
       << (r.mode == SystemMode::Plain ? "plain" : "sub") << "]";
    if (!r.detail.empty()) os << " -- " << r.detail;
    os << "\n";
  }
  os << passed << " passed, " << failed << " failed\n";
  return os.str();
}

namespace {

const char* wrong_name(WrongKind k) {
  switch (k) {
    case WrongKind::EmptyReceiver: return "empty-sel";
    case WrongKind::LamReceiver: return "lam-sel";
    case WrongKind::ConstReceiver: return "const-sel";
  }
  return "?";
}

const char* outcome_name(OutcomeKind k) {
  switch (k) {
    case OutcomeKind::Value: return "value";
    case OutcomeKind::Wrong: return "wrong";
    case OutcomeKind::Stuck: return "stuck";
    case OutcomeKind::OutOfFuel: return "out-of-fuel";
  }
  return "?";
}

void run_directive(const Directive& d,
                   const std::map<std::string, TermPtr>& defs,
                   const PreludeSig& sig, const std::string& file,
                   CorpusReport& rep) {
  DirectiveResult res;
  res.file = file;
  res.line = d.span.line;
  res.target = d.target;
  res.mode = d.mode;
  auto it = defs.find(d.target);
  if (it == defs.end()) {
    res.kind = "check";
    res.detail = "no definition named " + d.target;
    rep.add(std::move(res));
    return;
  }
  const TermPtr& term = it->second;
  Checker ck(sig, d.mode);
  switch (d.kind) {
    case Directive::Kind::Check: {
      res.kind = "check";
      try {
        ck.check(term, d.type);
        res.pass = true;
        try {
          res.detail = pretty_type(ck.infer(term));
        } catch (const TypeError&) {
          res.detail = pretty_type(d.type);
        }
      } catch (const TypeError& ex) {
        res.detail = std::string("[") + ex.rule + "] " + ex.what();
      }
      break;
    }
    case Directive::Kind::Reject: {
      res.kind = "reject";
      try {
        TypePtr ty = ck.infer(term);
        res.detail = "unexpectedly typed at " + pretty_type(ty);
      } catch (const TypeError& ex) {
        res.pass = true;
        res.detail = std::string("[") + ex.rule + "] " +
                     err_kind_name(ex.kind);
      }
      break;
    }
    case Directive::Kind::Eval: {
      res.kind = "eval";
      Outcome out = eval(term, d.fuel);
      if (out.kind != OutcomeKind::Value) {
        res.detail = std::string("outcome ") + outcome_name(out.kind) +
                     (out.kind == OutcomeKind::Wrong
                          ? std::string(" (") + wrong_name(*out.wrong) + ")"
                          : "");
        break;
      }
      TermPtr got = normalize_admin(out.result);
      TermPtr want = normalize_admin(d.expect);
      if (alpha_eq_term(got, want)) {
        res.pass = true;
        res.detail = pretty_term(got);
      } else {
        res.detail = "result " + pretty_term(got) + " differs from " +
                     pretty_term(want);
      }
      break;
    }
    case Directive::Kind::Steps: {
      res.kind = "steps";
      Outcome out = eval(term, d.fuel);
      if (out.kind != OutcomeKind::Value) {
        res.detail = std::string("outcome ") + outcome_name(out.kind);
      } else if (out.steps == d.steps) {
        res.pass = true;
        res.detail = std::to_string(out.steps) + " steps";
      } else {
        res.detail = "took " + std::to_string(out.steps) + " steps, expected " +
                     std::to_string(d.steps);
      }
      break;
    }
  }
  rep.add(std::move(res));
}

}  // namespace

void run_file(const std::string& path, const PreludeSig& sig,
              CorpusReport& rep) {
  SourceFile file = parse_file(path, sig);
  Program prog = elaborate(file, sig);
  std::map<std::string, TermPtr> defs(prog.defs.begin(), prog.defs.end());
  std::string shown = fs::path(path).filename().string();
  for (auto& d : prog.directives) run_directive(d, defs, sig, shown, rep);
}

CorpusReport run_corpus(const std::string& dir) {
  CorpusReport rep;
  fs::path root(dir);
  PreludeSig sig = fs::exists(root / "prelude.lobj")
                       ? load_prelude((root / "prelude.lobj").string())
                       : builtin_prelude();

  std::vector<fs::path> files;
  auto collect = [&](const fs::path& d) {
    if (!fs::exists(d)) return;
    for (auto& entry : fs::directory_iterator(d))
      if (entry.path().extension() == ".lobj" &&
          entry.path().filename() != "prelude.lobj")
        files.push_back(entry.path());
  };
  collect(root);
  collect(root / "examples");
  std::sort(files.begin(), files.end());

  std::map<std::string, TermPtr> all_defs;
  for (auto& f : files) {
    try {
      SourceFile file = parse_file(f.string(), sig);
      Program prog = elaborate(file, sig);
      std::map<std::string, TermPtr> defs(prog.defs.begin(), prog.defs.end());
      for (auto& [name, term] : defs) all_defs.emplace(name, term);
      for (auto& d : prog.directives)
        run_directive(d, defs, sig, f.filename().string(), rep);
    } catch (const std::exception& ex) {
      rep.add({f.filename().string(), 0, "parse", "-", SystemMode::Plain,
               false, ex.what()});
    }
  }

  fs::path traces = root / "traces";
  if (fs::exists(traces)) {
    std::vector<fs::path> tfiles;
    for (auto& entry : fs::directory_iterator(traces))
      if (entry.path().extension() == ".trace") tfiles.push_back(entry.path());
    std::sort(tfiles.begin(), tfiles.end());
    for (auto& tf : tfiles) {
      DirectiveResult res;
      res.file = tf.filename().string();
      res.kind = "trace";
      res.target = tf.stem().string();
      auto it = all_defs.find(res.target);
      if (it == all_defs.end()) {
        res.detail = "no definition named " + res.target;
        rep.add(std::move(res));
        continue;
      }
      std::ifstream in(tf);
      std::stringstream buf;
      buf << in.rdbuf();
      Outcome out = eval(it->second, 10000, true);
      std::string got = format_trace(it->second, out.trace);
      if (got == buf.str()) {
        res.pass = true;
        res.detail = std::to_string(out.steps) + " steps";
      } else {
        res.detail = "trace differs from golden file";
      }
      rep.add(std::move(res));
    }
  }
  return rep;
}

}  // namespace lobj
