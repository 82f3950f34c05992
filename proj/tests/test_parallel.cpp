#include <doctest.h>

#include <atomic>
#include <stdexcept>

#include "cascadefuse/dataset.hpp"
#include "cascadefuse/error.hpp"
#include "cascadefuse/parallel.hpp"
#include "toy.hpp"

using namespace cascadefuse;

namespace {

struct ThreadGuard {
  int saved = parallel::max_threads();
  explicit ThreadGuard(int n) { parallel::set_threads(n); }
  ~ThreadGuard() { parallel::set_threads(saved); }
};

}  // namespace

TEST_SUITE("parallel") {
  TEST_CASE("kernels agree with their serial references") {
    ThreadGuard guard(4);
    const auto data = generate_synthetic(4, 3);

    const auto grid = hourly_grid(47);
    const auto si = parallel::infectiousness_serial(data.stories, grid);
    const auto oi = parallel::infectiousness_omp(data.stories, grid);
    REQUIRE(si.size() == oi.size());
    for (std::size_t i = 0; i < si.size(); ++i) CHECK(si[i].values == oi[i].values);

    FeatureConfig fc;
    fc.vocab_size = 50;
    fc.seq_len = 6;
    const auto feat = Featurizer::fit(data.stories, fc);
    const auto sf = parallel::featurize_serial(feat, data.stories);
    CHECK(sf == parallel::featurize_omp(feat, data.stories));

    auto cfg = testutil::toy_config();
    cfg.vocab_size = feat.vocab.size();
    cfg.seq_len = 6;
    cfg.temporal_len = 47;
    const FusionModel model(cfg);
    const auto params = model.init_parameters(2);
    CHECK(parallel::predict_serial(model, params, sf) == parallel::predict_omp(model, params, sf));

    const auto profile = InfectiousnessProfile::constant(2e-3);
    const auto followers = FollowerSampler::lognormal(30, 1);
    const auto ss = parallel::simulate_serial(profile, followers, 6 * 3600.0, 17, 6);
    CHECK(ss == parallel::simulate_omp(profile, followers, 6 * 3600.0, 17, 6));
    CHECK(ss[0] == simulate_hawkes(profile, followers, 6 * 3600.0, derive_seed(17, 0)));
  }

  TEST_CASE("the lowest failing index is rethrown") {
    ThreadGuard guard(4);
    std::atomic<int> ran{0};
    try {
      parallel::for_each_index(64, [&](std::size_t i) {
        ++ran;
        if (i == 9 || i == 40) throw std::runtime_error("boom " + std::to_string(i));
      });
      FAIL("expected an exception");
    } catch (const std::runtime_error& e) {
      CHECK(std::string(e.what()) == "boom 9");
    }
    CHECK(ran == 64);
  }

  TEST_CASE("thread count resolution") {
    CHECK(parallel::resolve_threads(3) == 3);
    CHECK_THROWS_AS(parallel::resolve_threads(0), Error);
    CHECK(parallel::resolve_threads(std::nullopt) >= 1);
  }
}
