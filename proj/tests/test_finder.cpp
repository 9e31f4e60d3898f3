#include <gtest/gtest.h>

#include "loopcert/error.hpp"
#include "loopcert/finder.hpp"
#include "support.hpp"

using namespace loopcert;
using testing_support::T;

namespace {

using testing_support::Renamed;
using testing_support::renamed;

}  // namespace

TEST(Finder, FactorialLoopIsFound) {
  const Trs trs = testing_support::load_trs("ex1.trs");
  FinderConfig config;
  config.max_depth = 6;
  config.start = T("fact(x,y)");
  const auto loops = find_loops(trs, config);
  ASSERT_FALSE(loops.empty());
  const LoopCertificate expected{T("fact(x,y)"), {}, testing_support::C("times([],s(x))"),
                                 Substitution{{"x", T("s(x)")}}};
  bool found = false;
  for (const auto& cert : loops) {
    EXPECT_NO_THROW(validate_loop(trs, cert));
    found = found || renamed(cert) == renamed(expected);
  }
  EXPECT_TRUE(found);
}

TEST(Finder, TerminatingSystemHasNoLoops) {
  const Trs trs = parse_trs("(VAR x) (RULES a -> b)");
  FinderConfig config;
  config.max_depth = 8;
  EXPECT_TRUE(find_loops(trs, config).empty());
}

TEST(Finder, SelfEmbeddingRule) {
  const Trs trs = parse_trs("(VAR x) (RULES f(x) -> f(f(x)))");
  FinderConfig config;
  config.max_depth = 2;
  const auto loops = find_loops(trs, config);
  bool found = false;
  for (const auto& cert : loops) {
    const ValidatedLoop loop = validate_loop(trs, cert);
    if (cert.start == T("f(x)") && cert.context.body() == T("f([])") && cert.subst.empty() && loop.length() == 1) {
      found = true;
    }
  }
  EXPECT_TRUE(found);
}

TEST(Finder, LoopsBackToTheSameTerm) {
  const Trs trs = parse_trs("(VAR x) (RULES a -> b b -> a)");
  const auto loops = find_loops(trs);
  ASSERT_FALSE(loops.empty());
  EXPECT_TRUE(loops[0].context.is_empty());
}

TEST(Finder, DeduplicatesUpToRenaming) {
  testing_support::Random r(8);
  for (int i = 0; i < 40; ++i) {
    const Trs trs = testing_support::random_trs(r);
    FinderConfig config;
    config.max_depth = 3;
    config.max_term_size = 40;
    std::vector<Renamed> seen;
    for (const auto& cert : find_loops(trs, config)) {
      EXPECT_NO_THROW(validate_loop(trs, cert));
      const Renamed key = renamed(cert);
      EXPECT_EQ(std::count(seen.begin(), seen.end(), key), 0);
      seen.push_back(key);
    }
  }
}

TEST(Finder, RejectsZeroBounds) {
  const Trs trs = parse_trs("(VAR x) (RULES a -> b)");
  FinderConfig config;
  config.max_depth = 0;
  EXPECT_THROW(find_loops(trs, config), Error);
}

TEST(Finder, ManyRandomLoopsValidate) {
  const auto loops = testing_support::random_finder_loops(2024, 120);
  EXPECT_GE(loops.size(), 100u);
}
