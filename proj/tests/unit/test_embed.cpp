#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "pkgrec/embed.hpp"
#include "pkgrec/error.hpp"
#include "pkgrec/synthetic.hpp"

using namespace pkgrec;

namespace {

std::vector<double> random_vec(Rng& rng, int d, double scale) {
  std::vector<double> v(static_cast<std::size_t>(d));
  for (auto& x : v) x = rng.uniform(-scale, scale);
  return v;
}

Corpus pair_corpus(int files) {
  Corpus c;
  for (int i = 0; i < files; ++i) c.records.push_back({"f" + std::to_string(i), {"a", "b"}});
  return c;
}

EmbeddingModel model_from_rows(const std::vector<std::vector<float>>& rows) {
  std::vector<std::string> names;
  std::vector<std::int64_t> freq;
  std::vector<float> u;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    names.push_back("p" + std::to_string(i));
    freq.push_back(1);
    u.insert(u.end(), rows[i].begin(), rows[i].end());
  }
  const int d = static_cast<int>(rows.front().size());
  std::vector<float> c(u.size(), 0.0f);
  return EmbeddingModel(Vocabulary(names, freq, 1), d, u, c);
}

}  // namespace

TEST_SUITE("embed") {
  TEST_CASE("loss examples") {
    const std::vector<double> zero(4, 0.0);
    const std::vector<std::vector<double>> one_zero_neg{zero};
    CHECK(sgns_loss(zero, zero, one_zero_neg) == doctest::Approx(2 * std::log(2.0)).epsilon(1e-12));

    std::vector<double> u{1.0, 0.0}, v{40.0, 0.0};
    const std::vector<std::vector<double>> far{{-40.0, 0.0}};
    CHECK(sgns_loss(u, v, far) < 1e-6);

    // no overflow at |dot| = 500
    std::vector<double> big{500.0, 0.0};
    const std::vector<std::vector<double>> big_neg{{500.0, 0.0}};
    const double l = sgns_loss(u, std::vector<double>{-500.0, 0.0}, big_neg);
    CHECK(std::isfinite(l));
    CHECK(l == doctest::Approx(1000.0).epsilon(1e-12));
    CHECK(sgns_loss(u, big, std::vector<std::vector<double>>{}) == doctest::Approx(0.0));

    const std::vector<std::vector<double>> wrong{{1.0}};
    CHECK_THROWS_AS(sgns_loss(u, v, wrong), DimensionError);
    CHECK_THROWS_AS(sgns_loss(u, std::vector<double>{1.0}, far), DimensionError);
  }

  TEST_CASE("loss matches scalar oracle") {
    Rng rng(7);
    for (int trial = 0; trial < 50; ++trial) {
      const auto u = random_vec(rng, 8, 1.0);
      const auto v = random_vec(rng, 8, 1.0);
      std::vector<std::vector<double>> negs;
      for (int n = 0; n < 5; ++n) negs.push_back(random_vec(rng, 8, 1.0));
      const double want = static_cast<double>(oracle::sgns_loss(u, v, negs));
      CHECK(std::fabs(sgns_loss(u, v, negs) - want) <= 1e-12 * std::max(1.0, std::fabs(want)));
    }
  }

  TEST_CASE("analytic gradient matches central differences") {
    Rng rng(2024);
    const double h = 1e-5;
    double worst = 0;
    for (int point = 0; point < 100; ++point) {
      auto u = random_vec(rng, 8, 1.0);
      auto v = random_vec(rng, 8, 1.0);
      std::vector<std::vector<double>> negs;
      for (int n = 0; n < 5; ++n) negs.push_back(random_vec(rng, 8, 1.0));
      const auto g = sgns_gradient(u, v, negs);
      auto check = [&](std::vector<double>& x, const std::vector<double>& analytic) {
        for (std::size_t i = 0; i < x.size(); ++i) {
          const double keep = x[i];
          x[i] = keep + h;
          const double up = sgns_loss(u, v, negs);
          x[i] = keep - h;
          const double down = sgns_loss(u, v, negs);
          x[i] = keep;
          const double numeric = (up - down) / (2 * h);
          const double rel = std::fabs(numeric - analytic[i]) / std::max(1e-8, std::fabs(numeric) + std::fabs(analytic[i]));
          worst = std::max(worst, rel);
        }
      };
      check(u, g.u);
      check(v, g.v);
      for (std::size_t n = 0; n < negs.size(); ++n) check(negs[n], g.negs[n]);
    }
    CHECK(worst < 1e-4);
  }

  TEST_CASE("config validation") {
    TrainConfig c;
    CHECK_NOTHROW(c.validate());
    c.epochs = 0;
    CHECK_THROWS_AS(c.validate(), InvalidArgumentError);
    c = {};
    c.dim = 1;
    CHECK_THROWS_AS(c.validate(), InvalidArgumentError);
    c = {};
    c.learning_rate = 0;
    CHECK_THROWS_AS(c.validate(), InvalidArgumentError);
    c = {};
    c.negatives = 0;
    CHECK_THROWS_AS(c.validate(), InvalidArgumentError);
    c.allow_zero_negatives = true;
    CHECK_NOTHROW(c.validate());
    CHECK(lr_schedule_from_string(to_string(LrSchedule::constant)) == LrSchedule::constant);
    CHECK_THROWS_AS(lr_schedule_from_string("cosine"), InvalidArgumentError);
  }

  TEST_CASE("two always-together packages align") {
    const auto corpus = pair_corpus(50);
    const auto vocab = build_vocabulary(corpus, 1);
    const auto stats = build_pair_stats(corpus, vocab);
    TrainConfig cfg;
    cfg.dim = 8;
    cfg.epochs = 200;
    cfg.negatives = 0;
    cfg.allow_zero_negatives = true;
    cfg.sampler.allow_fallback = false;
    const auto model = train(stats, vocab, cfg);
    const int a = *vocab.find("a"), b = *vocab.find("b");
    CHECK(cosine(model.target(a), model.context(b)) > 0.9);
    CHECK(cosine(model.target(b), model.context(a)) > 0.9);
  }

  TEST_CASE("training is deterministic, finite, and reduces loss") {
    SyntheticConfig sc;
    sc.files = 800;
    const auto corpus = make_synthetic_corpus(sc);
    const auto vocab = build_vocabulary(corpus, 1);
    const auto stats = build_pair_stats(corpus, vocab);
    TrainConfig cfg;
    cfg.dim = 16;
    cfg.epochs = 4;
    const auto m1 = train(stats, vocab, cfg);
    const auto m2 = train(stats, vocab, cfg);
    REQUIRE(m1.target_matrix().size() == vocab.size() * 16);
    CHECK(std::equal(m1.target_matrix().begin(), m1.target_matrix().end(), m2.target_matrix().begin()));
    CHECK(std::equal(m1.context_matrix().begin(), m1.context_matrix().end(), m2.context_matrix().begin()));
    for (float x : m1.target_matrix()) REQUIRE(std::isfinite(x));
    REQUIRE(m1.log().epoch_losses.size() == 4);
    CHECK(m1.log().epoch_losses.back() <= m1.log().epoch_losses.front());

    cfg.seed = 43;
    const auto m3 = train(stats, vocab, cfg);
    CHECK_FALSE(std::equal(m1.target_matrix().begin(), m1.target_matrix().end(), m3.target_matrix().begin()));
  }

  TEST_CASE("initialisation range") {
    Corpus c = pair_corpus(2);
    c.records.push_back({"x", {"c", "d"}});
    const auto vocab = build_vocabulary(c, 1);
    const auto m = random_model(vocab, 10, 5);
    for (float x : m.target_matrix()) {
      CHECK(x >= -0.05f);
      CHECK(x <= 0.05f);
    }
  }

  TEST_CASE("cosine examples and properties") {
    const std::vector<double> x{1, 0}, y{0, 1};
    CHECK(cosine(x, x) == 1.0);
    CHECK(cosine(x, y) == 0.0);
    const std::vector<double> a{1, 2, 3}, b{4, 5, 6};
    CHECK(cosine(a, b) == doctest::Approx(32.0 / (std::sqrt(14.0) * std::sqrt(77.0))).epsilon(1e-15));
    CHECK(cosine(a, b) == doctest::Approx(0.974631846).epsilon(1e-9));
    CHECK_THROWS_AS(cosine(std::vector<double>{0, 0}, x), ZeroVectorError);
    CHECK_THROWS_AS(cosine(a, x), DimensionError);

    Rng rng(3);
    for (int i = 0; i < 200; ++i) {
      const auto p = random_vec(rng, 6, 2.0);
      const auto q = random_vec(rng, 6, 2.0);
      const double alpha = rng.uniform(0.01, 100), beta = rng.uniform(0.01, 100);
      std::vector<double> ps = p, qs = q;
      for (auto& t : ps) t *= alpha;
      for (auto& t : qs) t *= beta;
      const double c = cosine(p, q);
      CHECK(std::fabs(cosine(ps, qs) - c) < 1e-12);
      CHECK(c <= 1.0);
      CHECK(c >= -1.0);
    }
  }

  TEST_CASE("projection examples") {
    const auto m = model_from_rows({{1.0f, 0.0f}, {0.0f, 1.0f}, {0.3f, -0.7f}});
    auto single = project_out_of_sample({{{"p2", 5}}}, m);
    CHECK(single.vector[0] == static_cast<double>(0.3f));
    CHECK(single.vector[1] == static_cast<double>(-0.7f));

    const auto hand = project_out_of_sample({{{"p0", 3}, {"p1", 1}}}, m);
    CHECK(std::fabs(hand.vector[0] - 0.75) < 1e-12);
    CHECK(std::fabs(hand.vector[1] - 0.25) < 1e-12);

    const auto sym = project_out_of_sample({{{"p0", 1}, {"p1", 1}}}, m);
    CHECK(sym.vector[0] == 0.5);
    CHECK(sym.vector[1] == 0.5);

    const auto dropped = project_out_of_sample({{{"p0", 3}, {"ghost", 9}, {"p1", 1}}}, m);
    CHECK(dropped.dropped_neighbors == 1);
    CHECK(dropped.vector == hand.vector);

    CHECK_THROWS_AS(project_out_of_sample({{{"ghost", 1}}}, m), NoKnownNeighborsError);
    CHECK_THROWS_AS(project_out_of_sample({{}}, m), InvalidArgumentError);
    CHECK_THROWS_AS(project_out_of_sample({{{"p0", 0}}}, m), InvalidArgumentError);
  }

  TEST_CASE("projection is a convex combination") {
    const auto m = oracle::random_model(11, 40, 6, 0);
    Rng rng(99);
    for (int trial = 0; trial < 1000; ++trial) {
      ProjectionRequest req;
      const int n = 1 + static_cast<int>(rng.below(6));
      for (int i = 0; i < n; ++i) {
        req.neighbors.emplace_back(m.vocab().name(static_cast<int>(rng.below(40))),
                                   1 + static_cast<std::int64_t>(rng.below(20)));
      }
      const auto p = project_out_of_sample(req, m);
      for (int c = 0; c < 6; ++c) {
        double lo = 1e300, hi = -1e300;
        for (const auto& [name, w] : req.neighbors) {
          const double x = m.target(*m.vocab().find(name))[static_cast<std::size_t>(c)];
          lo = std::min(lo, x);
          hi = std::max(hi, x);
        }
        CHECK(p.vector[static_cast<std::size_t>(c)] >= lo - 1e-12);
        CHECK(p.vector[static_cast<std::size_t>(c)] <= hi + 1e-12);
      }
    }
  }

  TEST_CASE("inserting a projected package") {
    const auto m = model_from_rows({{1.0f, 0.0f}, {0.0f, 1.0f}});
    const auto p = project_out_of_sample({{{"p0", 3}, {"p1", 1}}}, m);
    const auto grown = with_inserted(m, "newpkg", p.vector, 4);
    REQUIRE(grown.rows() == 3);
    const int id = *grown.vocab().find("newpkg");
    CHECK(id == 2);
    CHECK(grown.target(id)[0] == 0.75f);
    CHECK(grown.context(id)[0] == 0.0f);
    CHECK(grown.vocab().freq(id) == 4);
    CHECK_THROWS_AS(with_inserted(m, "p0", p.vector), InvalidArgumentError);
    CHECK_THROWS_AS(with_inserted(m, "bad", std::vector<double>{1.0}), DimensionError);
  }
}
