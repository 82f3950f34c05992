#include <doctest.h>

#include <cmath>
#include <limits>

#include "cascadefuse/error.hpp"
#include "cascadefuse/model.hpp"
#include "cascadefuse/training.hpp"
#include "gradcheck.hpp"
#include "toy.hpp"

using namespace cascadefuse;
using doctest::Approx;

TEST_SUITE("fusion_model") {
  TEST_CASE("concatenated width per variant") {
    ModelConfig c = testutil::toy_config();
    c.hidden_l = c.hidden_u = 16;
    c.hidden_s = 32;
    CHECK(c.concat_dim() == 16 + 16 + 32 + 32);
    c.variant = Variant::NoCim;
    CHECK(c.concat_dim() == 16 + 16 + 32);
    c.variant = Variant::NoTime;
    CHECK(c.concat_dim() == 16 + 16 + 32);
    c.variant = Variant::Freq;
    CHECK(c.concat_dim() == 16 + 16 + 32 + 32);
    c.variant = Variant::Full;
    c.hidden_u = 8;
    CHECK_THROWS_AS(c.validate(), Error);
    c.variant = Variant::NoCim;
    CHECK_NOTHROW(c.validate());
  }

  TEST_CASE("forward shapes and output distribution") {
    for (Variant v : {Variant::Full, Variant::NoCim, Variant::NoTime, Variant::Freq})
      for (std::size_t tau : {2u, 4u}) {
        auto cfg = testutil::toy_config(v);
        cfg.tau = tau;
        const FusionModel model(cfg);
        const auto params = model.init_parameters(5);
        for (std::size_t real : {1u, 2u, 3u}) {
          nn::Tape tape(false);
          const auto pass = model.forward(tape, params, testutil::toy_bundle(cfg, real, real));
          CHECK(tape.value(pass.f1).size() == cfg.concat_dim());
          CHECK(tape.value(pass.f2).size() == cfg.f2_dim());
          const auto& z = tape.value(pass.probs);
          REQUIRE(z.size() == tau);
          double sum = 0;
          for (double p : z.data()) {
            CHECK(p >= 0);
            sum += p;
          }
          CHECK(std::abs(sum - 1) < 1e-9);
          CHECK(pass.cim.has_value() == cfg.uses_cim());
        }
      }
  }

  TEST_CASE("no_time never reads the temporal stream") {
    auto cfg = testutil::toy_config(Variant::NoTime);
    const FusionModel model(cfg);
    const auto params = model.init_parameters(1);
    auto bundle = testutil::toy_bundle(cfg, 3, 4);
    const auto clean = model.predict(params, bundle);
    bundle.temporal = std::vector<double>(47, std::numeric_limits<double>::quiet_NaN());
    CHECK(model.predict(params, bundle) == clean);
    bundle.temporal = std::vector<double>{1e300};
    CHECK(model.predict(params, bundle) == clean);
  }

  TEST_CASE("config mismatches are rejected") {
    auto cfg = testutil::toy_config();
    const FusionModel model(cfg);
    const auto params = model.init_parameters(1);
    auto b = testutil::toy_bundle(cfg, 3, 1);
    auto short_seq = b;
    short_seq.mask.pop_back();
    CHECK_THROWS_AS(model.predict(params, short_seq), Error);
    auto no_temporal = b;
    no_temporal.temporal.reset();
    CHECK_THROWS_AS(model.predict(params, no_temporal), Error);
    auto wrong_k = b;
    wrong_k.linguistic[0].dim = 9;
    CHECK_THROWS_AS(model.predict(params, wrong_k), Error);
    auto wrong_s = b;
    wrong_s.temporal->push_back(0);
    CHECK_THROWS_AS(model.predict(params, wrong_s), Error);
    auto empty = testutil::toy_bundle(cfg, 0, 1);
    CHECK_THROWS_AS(model.predict(params, empty), Error);
    auto bad_label = b;
    bad_label.label = Label::Debunking;
    CHECK_THROWS_AS(model.predict(params, bad_label), Error);
  }

  TEST_CASE("full model gradients match finite differences") {
    for (Variant v : {Variant::Full, Variant::NoCim, Variant::NoTime})
      for (std::size_t real : {3u, 2u}) {
        auto cfg = testutil::toy_config(v);
        cfg.tau = 4;
        const FusionModel model(cfg);
        auto params = model.init_parameters(11);
        testutil::randomize(params, 12, -0.8, 0.8);
        const auto bundle = testutil::toy_bundle(cfg, real, 13, Label::Unverified);
        const auto r = testutil::check_gradients(params, [&](nn::Tape& t) {
          std::mt19937_64 rng(77);
          const auto pass = model.forward(t, params, bundle, true, &rng);
          return nn::cross_entropy(t, pass.probs, label_index(bundle.label));
        });
        INFO(to_string(v) << " real=" << real << " worst " << r.worst);
        CHECK(r.max_rel_error < 1e-4);
        CHECK(r.checked == params.scalar_count());
      }
  }

  TEST_CASE("config JSON round trip") {
    auto cfg = testutil::toy_config(Variant::Freq);
    cfg.gate_form = nn::GateForm::Standard;
    cfg.seed = 1234567890123ULL;
    const auto back = ModelConfig::from_json(nlohmann::json::parse(cfg.to_json().dump()));
    CHECK(back.to_json() == cfg.to_json());
    CHECK_THROWS_AS(ModelConfig::from_json(nlohmann::json{{"variant", "huge"}}), Error);
  }
}

TEST_SUITE("training") {
  TEST_CASE("early stopping contract") {
    EarlyStopping stop(10, 1e-6);
    std::size_t epoch = 0;
    for (; epoch < 100 && !stop.should_stop(); ++epoch) stop.observe(epoch < 20 ? 1.0 - 0.01 * epoch : 0.81);
    CHECK(epoch == 30);
    CHECK(stop.best_epoch() == 20);
    CHECK(stop.best_loss() == Approx(0.81));

    EarlyStopping tiny(2, 1e-6);
    tiny.observe(1.0);
    CHECK(!tiny.observe(1.0 - 5e-7));
    CHECK(!tiny.observe(1.0 - 9e-7));
    CHECK(tiny.should_stop());
  }

  TEST_CASE("metrics from a hand confusion matrix") {
    // Six stories: truth (0,0,0,1,1,1), predictions (0,0,1,1,1,1).
    const auto r = report_from_predictions(
        2, {0, 0, 0, 1, 1, 1}, {{0.9, 0.1}, {0.6, 0.4}, {0.2, 0.8}, {0.3, 0.7}, {0.1, 0.9}, {0.45, 0.55}});
    CHECK(r.confusion == std::vector<std::vector<std::size_t>>{{2, 1}, {0, 3}});
    CHECK(r.accuracy == Approx(5.0 / 6));
    CHECK(r.per_class_f1[0] == Approx(0.8));
    CHECK(r.per_class_f1[1] == Approx(6.0 / 7));
    const double loss = -(std::log(0.9) + std::log(0.6) + std::log(0.2) + std::log(0.7) + std::log(0.9) +
                          std::log(0.55)) / 6;
    CHECK(r.loss == Approx(loss));

    const auto perfect = report_from_confusion({{3, 0, 0, 0}, {0, 2, 0, 0}, {0, 0, 0, 0}, {0, 0, 0, 1}});
    CHECK(perfect.accuracy == 1);
    CHECK(perfect.per_class_f1 == std::vector<double>{1, 1, 0, 1});
    CHECK_THROWS_AS(report_from_confusion({{0, 0}, {0, 0}}), Error);
    CHECK_THROWS_AS(report_from_predictions(2, {}, {}), Error);
  }

  struct ToyData {
    std::vector<FeatureBundle> train, val;
  };

  ToyData toy_data(const ModelConfig& cfg) {
    ToyData d;
    for (std::uint64_t k = 0; k < 24; ++k) {
      const Label label = k % 2 ? Label::Fake : Label::True;
      auto b = testutil::toy_bundle(cfg, 1 + k % 3, 100 + k, label);
      // Make the temporal stream carry the label.
      if (b.temporal)
        for (double& x : *b.temporal) x = label == Label::Fake ? std::abs(x) : -std::abs(x);
      (k < 16 ? d.train : d.val).push_back(b);
    }
    return d;
  }

  TEST_CASE("training is deterministic and returns the best epoch") {
    auto cfg = testutil::toy_config();
    cfg.max_epochs = 15;
    cfg.patience = 4;
    const auto data = toy_data(cfg);
    const FusionModel model(cfg);
    const auto a = train(model, data.train, data.val);
    const auto b = train(model, data.train, data.val);
    REQUIRE(a.history.epochs.size() == b.history.epochs.size());
    for (std::size_t i = 0; i < a.history.epochs.size(); ++i) {
      CHECK(a.history.epochs[i].train_loss == b.history.epochs[i].train_loss);
      CHECK(a.history.epochs[i].val_loss == b.history.epochs[i].val_loss);
    }
    double best = 1e300;
    for (const auto& e : a.history.epochs) best = std::min(best, e.val_loss);
    CHECK(a.history.best_val_loss == best);
    CHECK(evaluate(model, a.params, data.val).loss == Approx(best).epsilon(1e-12));
    CHECK(a.history.epochs.size() <= cfg.max_epochs);
    if (a.history.stopped_early) CHECK(a.history.epochs.size() == a.history.best_epoch + cfg.patience);
  }

  TEST_CASE("training honors the epoch cap and rejects empty splits") {
    auto cfg = testutil::toy_config();
    cfg.max_epochs = 3;
    cfg.patience = 100;
    const auto data = toy_data(cfg);
    const FusionModel model(cfg);
    const auto r = train(model, data.train, data.val);
    CHECK(r.history.epochs.size() == 3);
    CHECK(!r.history.stopped_early);
    CHECK_THROWS_AS(train(model, {}, data.val), Error);
    CHECK_THROWS_AS(train(model, data.train, {}), Error);
    CHECK_THROWS_AS(evaluate(model, r.params, {}), Error);
  }

  TEST_CASE("minibatches average gradients") {
    auto cfg = testutil::toy_config();
    cfg.max_epochs = 2;
    cfg.batch_size = 4;
    const auto data = toy_data(cfg);
    const auto r = train(FusionModel(cfg), data.train, data.val);
    CHECK(r.history.epochs.size() == 2);
    for (const auto& e : r.history.epochs) CHECK(std::isfinite(e.train_loss));
  }

  TEST_CASE("grid search") {
    auto cfg = testutil::toy_config();
    cfg.max_epochs = 6;
    const auto data = toy_data(cfg);
    GridSpace single{{4}, {4}, {2}, 3};
    const auto one = grid_search(data.train, data.val, cfg, single);
    CHECK(one.cells.size() == 1);
    CHECK(one.best == 0);
    CHECK(one.best_config.hidden_l == 4);
    CHECK(one.best_config.max_epochs == 6);

    GridSpace two{{2, 4}, {2}, {1}, 4};
    const auto r = grid_search(data.train, data.val, cfg, two);
    REQUIRE(r.cells.size() == 2);
    const auto& a = r.cells[0];
    const auto& b = r.cells[1];
    const std::size_t expected =
        a.val_accuracy != b.val_accuracy ? (a.val_accuracy > b.val_accuracy ? 0 : 1)
        : a.val_loss != b.val_loss       ? (a.val_loss < b.val_loss ? 0 : 1)
                                         : 0;
    CHECK(r.best == expected);
    CHECK_THROWS_AS(grid_search(data.train, data.val, cfg, GridSpace{{}, {4}, {1}, 3}), Error);
  }
}
