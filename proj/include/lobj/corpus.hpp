#pragma once

// Golden-file runner: executes the directives in .lobj files (typings,
// rejections, evaluations, step counts) and compares frozen traces.

#include <string>
#include <vector>

#include "lobj/parser.hpp"

namespace lobj {

struct DirectiveResult {
  std::string file;
  int line = 0;
  std::string kind;  // check | reject | eval | steps | trace
  std::string target;
  SystemMode mode = SystemMode::Plain;
  bool pass = false;
  std::string detail;
};

struct CorpusReport {
  int passed = 0;
  int failed = 0;
  std::vector<DirectiveResult> results;

  bool ok() const { return failed == 0; }
  void add(DirectiveResult r);
  std::string to_string() const;
};

// Runs one file's directives against the given signature.
void run_file(const std::string& path, const PreludeSig& sig,
              CorpusReport& rep);

// Loads dir/prelude.lobj when present (else the built-in signature), runs
// every directive in dir/examples/*.lobj and dir/*.lobj, then compares the
// golden traces dir/traces/<def>.trace against re-derived traces.
CorpusReport run_corpus(const std::string& dir);

}  // namespace lobj
