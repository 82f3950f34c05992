#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "cascadefuse/cascade.hpp"
#include "cascadefuse/nn/tensor.hpp"
#include "cascadefuse/point_process.hpp"

namespace cascadefuse {

using nn::SparseVector;

inline constexpr std::size_t kUserFeatureCount = 8;
inline constexpr std::size_t kScaledUserFeatures = 6;
using UserVector = std::array<double, kUserFeatureCount>;

enum class TermRanking { MaxTfIdf, SumTfIdf };

/// Top-K terms with smoothed idf = ln((1 + N) / (1 + df)) + 1 over N posts.
class Vocabulary {
 public:
  Vocabulary() = default;
  Vocabulary(std::vector<std::string> terms, std::vector<double> idf);

  std::size_t size() const { return terms_.size(); }
  const std::vector<std::string>& terms() const { return terms_; }
  const std::vector<double>& idf() const { return idf_; }
  std::optional<std::size_t> find(const std::string& term) const;

 private:
  std::vector<std::string> terms_;
  std::vector<double> idf_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Each inner vector is one document (post). Ranks terms by the max (or sum)
/// of tf-idf over documents, ties broken lexicographically. Throws EmptyCorpus.
Vocabulary build_vocabulary(const std::vector<std::vector<std::string>>& documents, std::size_t k,
                            TermRanking ranking = TermRanking::MaxTfIdf);
/// Tokenizes every post of `stories`.
Vocabulary build_vocabulary(const std::vector<NewsStory>& stories, std::size_t k,
                            TermRanking ranking = TermRanking::MaxTfIdf);

/// tf (raw count) x idf per vocabulary term; out-of-vocabulary tokens dropped.
SparseVector vectorize_post(const std::vector<std::string>& tokens, const Vocabulary& vocab);

/// Standardizes the six count/length features; the two flags pass through.
struct UserScaler {
  std::array<double, kScaledUserFeatures> mean{};
  std::array<double, kScaledUserFeatures> stddev{1, 1, 1, 1, 1, 1};

  static UserScaler fit(const std::vector<UserProfile>& profiles);
  static UserScaler fit(const std::vector<NewsStory>& stories, std::size_t posts_per_story);
  UserVector transform(const UserProfile& profile) const;
};

UserVector user_vector(const UserProfile& profile, const UserScaler& scaler);

/// Single mean/std pair applied to every temporal value.
struct TemporalScaler {
  double mean = 0;
  double stddev = 1;
};

enum class TemporalKind { Infectiousness, PostCounts, None };

struct FeatureConfig {
  std::size_t seq_len = 30;
  std::vector<double> grid_hours = hourly_grid(47);
  TemporalKind temporal = TemporalKind::Infectiousness;
  std::size_t vocab_size = 5000;
  TermRanking ranking = TermRanking::MaxTfIdf;
  KernelParams kernel{};
};

/// Model input for one story. `linguistic`, `users` and `mask` all have
/// seq_len rows; padded rows are zero with mask 0.
struct FeatureBundle {
  std::string story_id;
  std::vector<SparseVector> linguistic;
  std::vector<UserVector> users;
  std::vector<std::uint8_t> mask;
  std::optional<std::vector<double>> temporal;
  Label label = Label::True;

  std::size_t real_length() const;
  bool operator==(const FeatureBundle&) const = default;
};

/// First seq_len posts in time order plus the temporal stream selected by
/// config.temporal (unscaled).
FeatureBundle build_bundle(const NewsStory& story, const Vocabulary& vocab, const UserScaler& scaler,
                           const FeatureConfig& config);

/// Vocabulary, user scaler and temporal scaler fitted on a training split.
struct Featurizer {
  FeatureConfig config;
  Vocabulary vocab;
  UserScaler users;
  TemporalScaler temporal;

  static Featurizer fit(const std::vector<NewsStory>& training, const FeatureConfig& config);
  /// build_bundle followed by temporal standardization.
  FeatureBundle featurize(const NewsStory& story) const;

  nlohmann::json to_json() const;
  static Featurizer from_json(const nlohmann::json& doc);
};

inline constexpr int kFeaturizerFormatVersion = 1;

std::string to_string(TemporalKind kind);
TemporalKind parse_temporal_kind(const std::string& text);

}  // namespace cascadefuse
