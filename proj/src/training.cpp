#include "cascadefuse/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "cascadefuse/error.hpp"
#include "cascadefuse/hawkes.hpp"
#include "cascadefuse/nn/adadelta.hpp"
#include "cascadefuse/parallel.hpp"

namespace cascadefuse {

nlohmann::json TrainHistory::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& e : epochs)
    rows.push_back(
        {{"epoch", e.epoch}, {"train_loss", e.train_loss}, {"val_loss", e.val_loss}, {"val_accuracy", e.val_accuracy}});
  return {{"epochs", rows}, {"best_epoch", best_epoch}, {"best_val_loss", best_val_loss}, {"stopped_early", stopped_early}};
}

bool EarlyStopping::observe(double val_loss) {
  ++epoch_;
  if (epoch_ == 1 || val_loss < best_loss_ - min_delta_) {
    best_loss_ = val_loss;
    best_epoch_ = epoch_;
    stale_ = 0;
    return true;
  }
  ++stale_;
  return false;
}

nlohmann::json EvalReport::to_json() const {
  nlohmann::json f1 = nlohmann::json::object();
  for (std::size_t k = 0; k < per_class_f1.size(); ++k)
    f1[std::string(to_string(static_cast<Label>(k)))] = per_class_f1[k];
  return {{"classes", tau}, {"accuracy", accuracy}, {"per_class_f1", f1}, {"confusion", confusion}, {"loss", loss}};
}

EvalReport report_from_confusion(std::vector<std::vector<std::size_t>> confusion) {
  EvalReport r;
  r.tau = confusion.size();
  std::size_t total = 0, correct = 0;
  for (std::size_t i = 0; i < r.tau; ++i) {
    if (confusion[i].size() != r.tau) throw Error(ErrorCode::ShapeMismatch, "confusion matrix must be square");
    correct += confusion[i][i];
    for (auto c : confusion[i]) total += c;
  }
  if (total == 0) throw Error(ErrorCode::EmptyDataset, "no predictions to score");
  r.accuracy = static_cast<double>(correct) / static_cast<double>(total);
  r.per_class_f1.assign(r.tau, 0.0);
  for (std::size_t k = 0; k < r.tau; ++k) {
    std::size_t predicted = 0, actual = 0;
    for (std::size_t i = 0; i < r.tau; ++i) {
      predicted += confusion[i][k];
      actual += confusion[k][i];
    }
    const double p = predicted ? static_cast<double>(confusion[k][k]) / static_cast<double>(predicted) : 0.0;
    const double rc = actual ? static_cast<double>(confusion[k][k]) / static_cast<double>(actual) : 0.0;
    r.per_class_f1[k] = p + rc > 0 ? 2 * p * rc / (p + rc) : 0.0;
  }
  r.confusion = std::move(confusion);
  return r;
}

EvalReport report_from_predictions(std::size_t tau, const std::vector<std::size_t>& truth,
                                   const std::vector<std::vector<double>>& probs) {
  if (truth.empty()) throw Error(ErrorCode::EmptyDataset, "no stories to evaluate");
  if (truth.size() != probs.size()) throw Error(ErrorCode::ShapeMismatch, "truth and prediction counts differ");
  std::vector<std::vector<std::size_t>> confusion(tau, std::vector<std::size_t>(tau, 0));
  double loss = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (probs[i].size() != tau || truth[i] >= tau) throw Error(ErrorCode::InvalidClass, "prediction outside class range");
    const auto arg = static_cast<std::size_t>(std::max_element(probs[i].begin(), probs[i].end()) - probs[i].begin());
    ++confusion[truth[i]][arg];
    loss -= std::log(std::max(probs[i][truth[i]], 1e-12));
  }
  EvalReport r = report_from_confusion(std::move(confusion));
  r.loss = loss / static_cast<double>(truth.size());
  return r;
}

EvalReport evaluate(const FusionModel& model, const nn::ParameterSet& params, const std::vector<FeatureBundle>& data) {
  if (data.empty()) throw Error(ErrorCode::EmptyDataset, "no stories to evaluate");
  const auto probs = parallel::predict_omp(model, params, data);
  std::vector<std::size_t> truth;
  truth.reserve(data.size());
  for (const auto& b : data) truth.push_back(label_index(b.label));
  return report_from_predictions(model.config().tau, truth, probs);
}

TrainResult train(const FusionModel& model, const std::vector<FeatureBundle>& train_set,
                  const std::vector<FeatureBundle>& val_set, const EpochCallback& on_epoch) {
  if (train_set.empty()) throw Error(ErrorCode::EmptyDataset, "empty training set");
  if (val_set.empty()) throw Error(ErrorCode::EmptyDataset, "empty validation set");
  const ModelConfig& cfg = model.config();
  for (const auto& b : train_set) model.check_bundle(b);
  for (const auto& b : val_set) model.check_bundle(b);

  TrainResult result{model.init_parameters(derive_seed(cfg.seed, 0)), {}};
  nn::ParameterSet params = result.params;
  std::mt19937_64 shuffle_rng(derive_seed(cfg.seed, 1));
  std::mt19937_64 dropout_rng(derive_seed(cfg.seed, 2));
  const nn::AdaDelta optimizer{cfg.rho, cfg.eps, cfg.lr};
  EarlyStopping stopper(cfg.patience, cfg.min_delta);

  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  params.zero_grad();

  for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double train_loss = 0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t stop = std::min(order.size(), start + cfg.batch_size);
      for (std::size_t k = start; k < stop; ++k)
        train_loss += model.accumulate_gradients(params, train_set[order[k]], dropout_rng);
      if (stop - start > 1) {
        const double scale = 1.0 / static_cast<double>(stop - start);
        for (auto& p : params)
          for (double& g : p.grad.data()) g *= scale;
      }
      optimizer.step(params);
    }
    const EvalReport val = evaluate(model, params, val_set);
    const EpochRecord record{epoch, train_loss / static_cast<double>(order.size()), val.loss, val.accuracy};
    result.history.epochs.push_back(record);
    if (!std::isfinite(val.loss)) throw Error(ErrorCode::NonFinite, "validation loss diverged at epoch " + std::to_string(epoch));
    if (stopper.observe(val.loss)) result.params.copy_values_from(params);
    if (on_epoch) on_epoch(record);
    if (stopper.should_stop()) {
      result.history.stopped_early = epoch < cfg.max_epochs;
      break;
    }
  }
  result.history.best_epoch = stopper.best_epoch();
  result.history.best_val_loss = stopper.best_loss();
  return result;
}

GridSearchResult grid_search(const std::vector<FeatureBundle>& train_set, const std::vector<FeatureBundle>& val_set,
                             const ModelConfig& base, const GridSpace& space,
                             const std::function<void(const GridCell&)>& on_cell) {
  if (space.size() == 0) throw Error(ErrorCode::EmptySpace, "grid search space is empty");
  GridSearchResult out;
  std::size_t index = 0;
  for (std::size_t lu : space.hidden_lu)
    for (std::size_t s : space.hidden_s)
      for (std::size_t div : space.f2_divisors) {
        ModelConfig cfg = base;
        cfg.hidden_l = cfg.hidden_u = lu;
        cfg.hidden_s = s;
        cfg.f2_divisor = div;
        cfg.seed = derive_seed(base.seed, index++);
        cfg.max_epochs = std::min(base.max_epochs, space.cell_epoch_cap);
        const FusionModel model(cfg);
        const auto trained = train(model, train_set, val_set);
        const auto& best = trained.history.epochs[trained.history.best_epoch - 1];
        out.cells.push_back({cfg, best.val_accuracy, best.val_loss, trained.history.epochs.size()});
        if (on_cell) on_cell(out.cells.back());
      }
  for (std::size_t k = 1; k < out.cells.size(); ++k) {
    const auto& a = out.cells[k];
    const auto& b = out.cells[out.best];
    if (a.val_accuracy != b.val_accuracy) {
      if (a.val_accuracy > b.val_accuracy) out.best = k;
    } else if (a.val_loss != b.val_loss) {
      if (a.val_loss < b.val_loss) out.best = k;
    } else if (a.config.concat_dim() < b.config.concat_dim()) {
      out.best = k;
    }
  }
  out.best_config = out.cells[out.best].config;
  out.best_config.max_epochs = base.max_epochs;
  return out;
}

}  // namespace cascadefuse
