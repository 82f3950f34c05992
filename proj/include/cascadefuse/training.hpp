#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include <json.hpp>

#include "cascadefuse/features.hpp"
#include "cascadefuse/model.hpp"
#include "cascadefuse/nn/params.hpp"

namespace cascadefuse {

struct EpochRecord {
  std::size_t epoch = 0;  ///< 1-based
  double train_loss = 0;
  double val_loss = 0;
  double val_accuracy = 0;
};

struct TrainHistory {
  std::vector<EpochRecord> epochs;
  std::size_t best_epoch = 0;
  double best_val_loss = 0;
  bool stopped_early = false;

  nlohmann::json to_json() const;
};

/// Tracks validation loss; an epoch counts as an improvement only when it
/// beats the best loss so far by more than `min_delta`.
class EarlyStopping {
 public:
  EarlyStopping(std::size_t patience, double min_delta) : patience_(patience), min_delta_(min_delta) {}

  /// Returns true when `val_loss` is a new best.
  bool observe(double val_loss);
  bool should_stop() const { return stale_ >= patience_; }
  std::size_t best_epoch() const { return best_epoch_; }
  double best_loss() const { return best_loss_; }

 private:
  std::size_t patience_;
  double min_delta_;
  std::size_t epoch_ = 0;
  std::size_t best_epoch_ = 0;
  double best_loss_ = 0;
  std::size_t stale_ = 0;
};

struct EvalReport {
  std::size_t tau = 0;
  double accuracy = 0;
  std::vector<double> per_class_f1;
  std::vector<std::vector<std::size_t>> confusion;  ///< [truth][predicted]
  double loss = 0;                                  ///< mean cross-entropy

  nlohmann::json to_json() const;
};

/// Metrics from a confusion matrix (loss left at 0). F1 is 0 when P + R = 0.
EvalReport report_from_confusion(std::vector<std::vector<std::size_t>> confusion);
/// Argmax predictions (first maximum wins) plus mean cross-entropy.
EvalReport report_from_predictions(std::size_t tau, const std::vector<std::size_t>& truth,
                                   const std::vector<std::vector<double>>& probs);

/// Dropout off. Throws EmptyDataset.
EvalReport evaluate(const FusionModel& model, const nn::ParameterSet& params, const std::vector<FeatureBundle>& data);

struct TrainResult {
  nn::ParameterSet params;  ///< weights of the best validation epoch
  TrainHistory history;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

/// Seeded shuffle each epoch, AdaDelta updates over batches of
/// config.batch_size stories, validation loss after every epoch, early
/// stopping on it. Throws EmptyDataset when either split is empty.
TrainResult train(const FusionModel& model, const std::vector<FeatureBundle>& train_set,
                  const std::vector<FeatureBundle>& val_set, const EpochCallback& on_epoch = {});

/// Candidate dimensions. Each cell is (E^l = E^u, E^s, f2 divisor).
struct GridSpace {
  std::vector<std::size_t> hidden_lu{16, 32, 64, 128};
  std::vector<std::size_t> hidden_s{16, 32, 64, 128};
  std::vector<std::size_t> f2_divisors{1, 2, 4, 8};
  std::size_t cell_epoch_cap = 50;

  std::size_t size() const { return hidden_lu.size() * hidden_s.size() * f2_divisors.size(); }
};

struct GridCell {
  ModelConfig config;
  double val_accuracy = 0;
  double val_loss = 0;
  std::size_t epochs = 0;
};

struct GridSearchResult {
  std::vector<GridCell> cells;  ///< in enumeration order
  std::size_t best = 0;         ///< index into cells
  /// Winning dimensions with the caller's full epoch budget restored.
  ModelConfig best_config;
};

/// Trains every cell with the reduced epoch cap. Cell k uses seed
/// derive_seed(base.seed, k). Picks the highest validation accuracy, then the
/// lower validation loss, then the smaller E^con. Throws EmptySpace.
GridSearchResult grid_search(const std::vector<FeatureBundle>& train_set, const std::vector<FeatureBundle>& val_set,
                             const ModelConfig& base, const GridSpace& space,
                             const std::function<void(const GridCell&)>& on_cell = {});

}  // namespace cascadefuse
