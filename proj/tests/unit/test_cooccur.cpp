#include <cmath>
#include <map>

#include "doctest.h"
#include "oracles.hpp"
#include "pkgrec/cooccur.hpp"
#include "pkgrec/error.hpp"
#include "pkgrec/synthetic.hpp"

using namespace pkgrec;

namespace {

Corpus corpus_of(std::vector<PackageSet> files) {
  Corpus c;
  for (std::size_t i = 0; i < files.size(); ++i) c.records.push_back({"f" + std::to_string(i), files[i]});
  return c;
}

}  // namespace

TEST_SUITE("cooccur") {
  TEST_CASE("vocabulary frequency threshold") {
    const auto c = corpus_of({{"a", "b"}, {"a"}, {"a", "c"}});
    const auto v = build_vocabulary(c, 2);
    CHECK(v.packages() == std::vector<std::string>{"a"});
    CHECK(v.freq(0) == 3);
    CHECK(build_vocabulary(c, 1).size() == 3);
    CHECK_THROWS_AS(build_vocabulary(c, 1, {"a", "b", "c"}), EmptyVocabularyError);
    CHECK_THROWS_AS(build_vocabulary(c, 0), InvalidArgumentError);
  }

  TEST_CASE("vocabulary order is descending frequency then name") {
    const auto c = corpus_of({{"z", "m"}, {"z", "b"}, {"m", "b"}, {"q"}});
    const auto v = build_vocabulary(c, 1);
    CHECK(v.packages() == std::vector<std::string>{"b", "m", "z", "q"});
    for (std::size_t i = 0; i < v.size(); ++i) CHECK(v.find(v.packages()[i]) == static_cast<int>(i));
  }

  TEST_CASE("pair counts example") {
    const auto c = corpus_of({{"a", "b", "c"}, {"a", "b"}});
    const auto v = build_vocabulary(c, 1);
    const auto s = build_pair_stats(c, v);
    const int a = *v.find("a"), b = *v.find("b"), cc = *v.find("c");
    CHECK(s.count(a, b) == 2);
    CHECK(s.count(b, a) == 2);
    CHECK(s.count(a, cc) == 1);
    CHECK(s.count(b, cc) == 1);
    CHECK(s.count(a, a) == 0);
    CHECK(s.total_pairs() == 4);

    const auto singles = corpus_of({{"a"}, {"b"}});
    const auto sv = build_vocabulary(singles, 1);
    CHECK(build_pair_stats(singles, sv).empty());
    CHECK(build_pair_stats(singles, sv).total_pairs() == 0);
  }

  TEST_CASE("pair counts match brute-force enumeration") {
    for (std::uint64_t seed = 1; seed <= 25; ++seed) {
      SyntheticConfig cfg;
      cfg.clusters = 3;
      cfg.packages_per_cluster = 6;
      cfg.files = 20;
      cfg.min_imports = 1;
      cfg.max_imports = 6;
      cfg.noise = 0.2;
      cfg.seed = seed;
      const auto corpus = make_synthetic_corpus(cfg);
      const auto vocab = build_vocabulary(corpus, seed % 3 + 1);
      const auto stats = build_pair_stats(corpus, vocab);
      const auto want = oracle::brute_pairs(corpus, vocab);
      CHECK(oracle::named_pairs(stats, vocab) == want);
      std::int64_t total = 0;
      for (const auto& [_, n] : want) total += n;
      CHECK(stats.total_pairs() == total);
      for (const auto& e : stats.entries()) {
        CHECK(e.first < e.second);
        CHECK(e.count >= 1);
      }
    }
  }

  TEST_CASE("sampler marginal matches smoothed unigram law") {
    const auto corpus = make_synthetic_corpus(SyntheticConfig{});
    const auto vocab = build_vocabulary(corpus, 1);
    const auto stats = build_pair_stats(corpus, vocab);
    auto sampler = make_negative_sampler(vocab, stats, 0.75, 123);

    std::vector<double> want(vocab.size());
    double z = 0;
    for (std::size_t i = 0; i < vocab.size(); ++i) z += want[i] = std::pow(static_cast<double>(vocab.freq(i)), 0.75);
    for (auto& w : want) w /= z;

    const int draws = 100000;
    std::vector<double> seen(vocab.size(), 0.0);
    for (int i = 0; i < draws; ++i) seen[static_cast<std::size_t>(sampler.draw())] += 1.0 / draws;
    double tv = 0;
    for (std::size_t i = 0; i < want.size(); ++i) {
      tv += std::fabs(seen[i] - want[i]);
      CHECK(sampler.probabilities()[i] == doctest::Approx(want[i]).epsilon(1e-12));
    }
    CHECK(tv / 2 < 0.02);
  }

  TEST_CASE("negatives respect the co-occurrence threshold unless a fallback is counted") {
    const auto corpus = make_synthetic_corpus(SyntheticConfig{});
    const auto vocab = build_vocabulary(corpus, 1);
    const auto stats = build_pair_stats(corpus, vocab);
    for (std::int64_t threshold : {0, 2}) {
      SamplerOptions opt;
      opt.reject_threshold = threshold;
      NegativeSampler sampler(vocab, stats, opt, 9);
      std::size_t violations = 0;
      for (int i = 0; i < 20000; ++i) {
        const int t = i % static_cast<int>(vocab.size());
        const auto n = sampler.negative_for(t);
        REQUIRE(n.has_value());
        CHECK(*n != t);
        if (stats.count(t, *n) > threshold) ++violations;
      }
      CHECK(violations <= sampler.fallback_count());
    }
  }

  TEST_CASE("sampler without fallback reports exhaustion") {
    const auto c = corpus_of({{"a", "b"}, {"a", "b"}});
    const auto v = build_vocabulary(c, 1);
    const auto s = build_pair_stats(c, v);
    SamplerOptions opt;
    opt.allow_fallback = false;
    NegativeSampler sampler(v, s, opt, 1);
    CHECK_FALSE(sampler.negative_for(0).has_value());
    CHECK(sampler.exhausted_count() == 1);

    opt.allow_fallback = true;
    NegativeSampler with_fallback(v, s, opt, 1);
    CHECK(with_fallback.negative_for(0) == 1);
    CHECK(with_fallback.fallback_count() == 1);
  }

  TEST_CASE("sampler argument errors") {
    const auto one = corpus_of({{"a"}});
    const auto v1 = build_vocabulary(one, 1);
    CHECK_THROWS_AS(make_negative_sampler(v1, build_pair_stats(one, v1), 0.75, 1), DegenerateSamplerError);
    const auto two = corpus_of({{"a", "b"}});
    const auto v2 = build_vocabulary(two, 1);
    const auto s2 = build_pair_stats(two, v2);
    CHECK_THROWS_AS(make_negative_sampler(v2, s2, 0.0, 1), InvalidArgumentError);
    CHECK_THROWS_AS(make_negative_sampler(v2, s2, 1.5, 1), InvalidArgumentError);
    CHECK_NOTHROW(make_negative_sampler(v2, s2, 1.0, 1));
  }
}
