#include "cascadefuse/experiment.hpp"

#include "cascadefuse/error.hpp"
#include "cascadefuse/parallel.hpp"

namespace cascadefuse {

ModelConfig resolve_model_config(ModelConfig model, const Featurizer& featurizer, LabelSet label_set) {
  model.vocab_size = featurizer.vocab.size();
  model.seq_len = featurizer.config.seq_len;
  model.temporal_len = model.uses_time() ? featurizer.config.grid_hours.size() : 0;
  model.tau = class_count(label_set);
  if (model.uses_time() && featurizer.config.temporal != temporal_kind_for(model.variant))
    throw Error(ErrorCode::ConfigMismatch, "featurizer temporal stream does not match variant " + to_string(model.variant));
  return model;
}

FeatureConfig feature_config_for(FeatureConfig features, Variant variant) {
  features.temporal = temporal_kind_for(variant);
  return features;
}

nlohmann::json ExperimentResult::report_json() const {
  nlohmann::json doc{{"model", model.to_json()},
                     {"history", history.to_json()},
                     {"validation", validation.to_json()},
                     {"test", test.to_json()}};
  if (grid) {
    nlohmann::json cells = nlohmann::json::array();
    for (const auto& c : grid->cells)
      cells.push_back({{"hidden_lu", c.config.hidden_l},
                       {"hidden_s", c.config.hidden_s},
                       {"f2_divisor", c.config.f2_divisor},
                       {"concat_dim", c.config.concat_dim()},
                       {"val_accuracy", c.val_accuracy},
                       {"val_loss", c.val_loss},
                       {"epochs", c.epochs}});
    doc["grid"] = {{"cells", cells}, {"best", grid->best}};
  }
  return doc;
}

ExperimentResult run_experiment(const DatasetManifest& data, const FeatureConfig& features, const ModelConfig& model,
                                const ExperimentOptions& options) {
  if (!data.has_split()) throw Error(ErrorCode::ConfigMismatch, "dataset has no train/val/test split");
  const auto train_stories = data.subset(Split::Train);
  const auto val_stories = data.subset(Split::Val);
  const auto test_stories = data.subset(Split::Test);
  if (train_stories.empty() || val_stories.empty() || test_stories.empty())
    throw Error(ErrorCode::EmptyDataset, "every split needs at least one story");

  ExperimentResult r;
  r.featurizer = Featurizer::fit(train_stories, feature_config_for(features, model.variant));
  r.model = resolve_model_config(model, r.featurizer, data.label_set);
  const auto train_set = parallel::featurize_omp(r.featurizer, train_stories);
  const auto val_set = parallel::featurize_omp(r.featurizer, val_stories);
  const auto test_set = parallel::featurize_omp(r.featurizer, test_stories);

  if (options.grid) {
    r.grid = grid_search(train_set, val_set, r.model, *options.grid, [&](const GridCell& c) {
      if (options.progress)
        options.progress("grid cell E=" + std::to_string(c.config.hidden_l) + " Es=" + std::to_string(c.config.hidden_s) +
                         " f2/" + std::to_string(c.config.f2_divisor) + ": val acc " + std::to_string(c.val_accuracy));
    });
    r.model = r.grid->best_config;
  }

  const FusionModel fm(r.model);
  auto trained = train(fm, train_set, val_set, [&](const EpochRecord& e) {
    if (options.progress)
      options.progress("epoch " + std::to_string(e.epoch) + " train " + std::to_string(e.train_loss) + " val " +
                       std::to_string(e.val_loss) + " acc " + std::to_string(e.val_accuracy));
  });
  r.params = std::move(trained.params);
  r.history = std::move(trained.history);
  r.validation = evaluate(fm, r.params, val_set);
  r.test = evaluate(fm, r.params, test_set);
  return r;
}

std::vector<AblationRow> ablate(const DatasetManifest& data, const FeatureConfig& features, const ModelConfig& model,
                                const std::vector<Variant>& variants, const ExperimentOptions& options) {
  std::vector<AblationRow> rows;
  for (Variant v : variants) {
    ModelConfig cfg = model;
    cfg.variant = v;
    rows.push_back({v, run_experiment(data, features, cfg, options).test});
  }
  return rows;
}

std::vector<SweepPoint> timeframe_sweep(const DatasetManifest& data, const std::vector<std::size_t>& days,
                                        const FeatureConfig& features, const ModelConfig& model,
                                        const ExperimentOptions& options) {
  std::vector<SweepPoint> out;
  for (std::size_t d : days) {
    if (d > 6) throw Error(ErrorCode::InvalidParams, "sweep days must lie in 0..6");
    ModelConfig cfg = model;
    FeatureConfig fc = features;
    if (d == 0) {
      cfg.variant = Variant::NoTime;
    } else {
      if (!cfg.uses_time()) cfg.variant = Variant::Full;
      fc.grid_hours = grid_for_days(d);
    }
    const auto result = run_experiment(data, fc, cfg, options);
    out.push_back({d, cfg.variant, result.model.temporal_len, result.test});
  }
  return out;
}

}  // namespace cascadefuse
