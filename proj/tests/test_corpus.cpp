#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <string>

#include "lobj/corpus.hpp"

using namespace lobj;

static std::string write_tmp(const std::string& name,
                             const std::string& body) {
  std::string path = std::string("/tmp/") + name;
  std::ofstream out(path);
  out << body;
  return path;
}

TEST_CASE("the whole corpus passes") {
  CorpusReport rep = run_corpus(LOBJ_CORPUS_DIR);
  INFO(rep.to_string());
  CHECK(rep.ok());
  CHECK(rep.failed == 0);
  // a sanity floor so an accidentally empty directory cannot pass
  CHECK(rep.passed > 80);
  CHECK(rep.to_string().find("passed") != std::string::npos);

  bool saw_check = false, saw_eval = false, saw_steps = false,
       saw_reject = false;
  for (auto& r : rep.results) {
    saw_check |= r.kind == "check";
    saw_eval |= r.kind == "eval";
    saw_steps |= r.kind == "steps";
    saw_reject |= r.kind == "reject";
  }
  CHECK(saw_check);
  CHECK(saw_eval);
  CHECK(saw_steps);
  CHECK(saw_reject);
}

TEST_CASE("failing directives are reported, not thrown") {
  std::string path = write_tmp(
      "corpus_fail.lobj",
      "def x = 1;\n"
      "#check x : str [plain];\n"
      "#eval x => 2;\n"
      "#check x : int [plain];\n");
  CorpusReport rep;
  run_file(path, builtin_prelude(), rep);
  CHECK(rep.failed == 2);
  CHECK(rep.passed == 1);
  REQUIRE(rep.results.size() == 3);
  CHECK_FALSE(rep.results[0].pass);
  CHECK(!rep.results[0].detail.empty());
  CHECK(rep.results[0].file == "corpus_fail.lobj");
  CHECK(rep.results[0].line == 2);
  CHECK_FALSE(rep.results[1].pass);
  CHECK(rep.results[2].pass);
  CHECK(rep.to_string().find("failed") != std::string::npos);
  std::remove(path.c_str());
}

TEST_CASE("rejection directives demand a type error") {
  std::string path = write_tmp(
      "corpus_reject.lobj",
      "def ok = \\x: int. x;\n"
      "#reject ok [plain];\n"
      "def bad = 1 2;\n"
      "#reject bad [plain];\n"
      "#reject bad [sub];\n");
  CorpusReport rep;
  run_file(path, builtin_prelude(), rep);
  CHECK(rep.passed == 2);   // `1 2` really is ill typed in both modes
  CHECK(rep.failed == 1);   // the identity types, so its rejection fails
  std::remove(path.c_str());
}
