#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cascadefuse/dataset.hpp"
#include "cascadefuse/features.hpp"
#include "cascadefuse/model.hpp"
#include "cascadefuse/training.hpp"

namespace cascadefuse {

/// Dimensions the data dictates (K, T, T^s, tau, temporal kind) filled into
/// the requested configurations.
ModelConfig resolve_model_config(ModelConfig model, const Featurizer& featurizer, LabelSet label_set);
FeatureConfig feature_config_for(FeatureConfig features, Variant variant);

struct ExperimentOptions {
  std::optional<GridSpace> grid;  ///< run grid search before the final training
  std::function<void(const std::string&)> progress;
};

struct ExperimentResult {
  Featurizer featurizer;
  ModelConfig model;
  nn::ParameterSet params;
  TrainHistory history;
  EvalReport validation;
  EvalReport test;
  std::optional<GridSearchResult> grid;

  nlohmann::json report_json() const;
};

/// Fits the featurizer on the train split, trains on train/val and scores the
/// test split. The manifest must carry a split.
ExperimentResult run_experiment(const DatasetManifest& data, const FeatureConfig& features, const ModelConfig& model,
                                const ExperimentOptions& options = {});

struct AblationRow {
  Variant variant;
  EvalReport test;
};

std::vector<AblationRow> ablate(const DatasetManifest& data, const FeatureConfig& features, const ModelConfig& model,
                                const std::vector<Variant>& variants, const ExperimentOptions& options = {});

struct SweepPoint {
  std::size_t days = 0;
  Variant variant = Variant::Full;
  std::size_t temporal_len = 0;
  EvalReport test;
};

/// Day d uses grid hours 1..(24d - 1); d = 0 runs variant no_time.
std::vector<SweepPoint> timeframe_sweep(const DatasetManifest& data, const std::vector<std::size_t>& days,
                                        const FeatureConfig& features, const ModelConfig& model,
                                        const ExperimentOptions& options = {});

}  // namespace cascadefuse
