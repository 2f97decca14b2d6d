#pragma once

// Property-based verification of the metatheory at desk scale: rule-directed
// generators of well-typed terms, raw terms for confluence, printable ASTs
// for round-trips, and the property runners (subject reduction, no-wrong,
// confluence joins, matching laws, substitution stability, round-trip).

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "lobj/syntax.hpp"
#include "lobj/typecheck.hpp"
#include "lobj/types.hpp"

namespace lobj {

struct GenConfig {
  std::uint64_t seed = 42;
  int max_term_size = 12;
  int max_row_width = 4;
  int max_depth = 5;
  int count = 1000;
  SystemMode mode = SystemMode::Plain;
};

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : g_(seed) {}
  std::uint64_t raw() { return g_(); }
  int below(int n) {
    return n <= 1 ? 0 : static_cast<int>(g_() % static_cast<std::uint64_t>(n));
  }
  bool chance(int num, int den) { return below(den) < num; }

 private:
  std::mt19937_64 g_;
};

struct Failure {
  std::string term;
  std::string type;
  std::string trace;
  std::string shrunk;
};

struct PropertyReport {
  std::string property;
  SystemMode mode = SystemMode::Plain;
  std::uint64_t seed = 42;
  int cases = 0;
  int passed = 0;
  int unknown = 0;
  std::vector<Failure> failures;
  double millis = 0;  // excluded from to_string; reports stay byte-stable

  bool ok() const { return failures.empty(); }
  std::string to_string() const;
};

// Closed well-typed terms with their type certificate; every pair passes
// check under cfg.mode. The first entries are fixed instances of the worked
// self-extension objects, the rest rule-directed random constructions.
std::vector<std::pair<TermPtr, TypePtr>> gen_typed(const GenConfig& cfg);

// Closed untyped terms for the confluence search.
std::vector<TermPtr> gen_raw(const GenConfig& cfg);

// Arbitrary printable ASTs (terms that pretty-print to parseable text).
std::vector<TermPtr> gen_asts(const GenConfig& cfg);

PropertyReport prop_subject_reduction(const GenConfig& cfg);
PropertyReport prop_no_wrong(const GenConfig& cfg);
PropertyReport prop_confluence(const GenConfig& cfg);
PropertyReport prop_matching_laws(const GenConfig& cfg);
// freshen=false runs the evaluator with the (Next) fresh-rename disabled;
// the alpha-equivariance half of the property must then fail.
PropertyReport prop_substitution(const GenConfig& cfg, bool freshen = true);
PropertyReport prop_roundtrip(const GenConfig& cfg);

std::vector<PropertyReport> prop_all(const GenConfig& cfg);

// Greedy structural shrinker: smallest found subject still failing `fails`.
TermPtr shrink_term(const TermPtr& t,
                    const std::function<bool(const TermPtr&)>& fails);

}  // namespace lobj
