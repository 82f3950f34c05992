#include "cascadefuse/features.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "cascadefuse/error.hpp"
#include "cascadefuse/text.hpp"

namespace cascadefuse {

Vocabulary::Vocabulary(std::vector<std::string> terms, std::vector<double> idf)
    : terms_(std::move(terms)), idf_(std::move(idf)) {
  if (terms_.size() != idf_.size()) throw Error(ErrorCode::ShapeMismatch, "vocabulary terms and idf differ in length");
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (!index_.emplace(terms_[i], i).second)
      throw Error(ErrorCode::InvalidParams, "duplicate vocabulary term '" + terms_[i] + "'");
    if (!(idf_[i] >= 0)) throw Error(ErrorCode::InvalidParams, "idf must be >= 0");
  }
}

std::optional<std::size_t> Vocabulary::find(const std::string& term) const {
  const auto it = index_.find(term);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Vocabulary build_vocabulary(const std::vector<std::vector<std::string>>& documents, std::size_t k,
                            TermRanking ranking) {
  if (documents.empty()) throw Error(ErrorCode::EmptyCorpus, "vocabulary needs at least one training post");
  std::map<std::string, std::size_t> doc_freq;
  std::vector<std::map<std::string, std::size_t>> counts(documents.size());
  for (std::size_t d = 0; d < documents.size(); ++d) {
    for (const auto& tok : documents[d]) ++counts[d][tok];
    for (const auto& [term, _] : counts[d]) ++doc_freq[term];
  }
  const double n = static_cast<double>(documents.size());
  std::map<std::string, double> idf;
  for (const auto& [term, df] : doc_freq) idf[term] = std::log((1.0 + n) / (1.0 + static_cast<double>(df))) + 1.0;

  std::map<std::string, double> score;
  for (const auto& doc : counts)
    for (const auto& [term, tf] : doc) {
      const double w = static_cast<double>(tf) * idf[term];
      double& s = score[term];
      s = ranking == TermRanking::MaxTfIdf ? std::max(s, w) : s + w;
    }

  std::vector<std::pair<std::string, double>> ranked(score.begin(), score.end());
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (ranked.size() > k) ranked.resize(k);

  std::vector<std::string> terms;
  std::vector<double> weights;
  for (auto& [term, _] : ranked) {
    weights.push_back(idf[term]);
    terms.push_back(term);
  }
  return Vocabulary(std::move(terms), std::move(weights));
}

Vocabulary build_vocabulary(const std::vector<NewsStory>& stories, std::size_t k, TermRanking ranking) {
  std::vector<std::vector<std::string>> docs;
  for (const auto& story : stories)
    for (const auto& post : story.posts) docs.push_back(tokenize(post.text));
  return build_vocabulary(docs, k, ranking);
}

SparseVector vectorize_post(const std::vector<std::string>& tokens, const Vocabulary& vocab) {
  std::map<std::uint32_t, double> tf;
  for (const auto& tok : tokens)
    if (const auto idx = vocab.find(tok)) tf[static_cast<std::uint32_t>(*idx)] += 1.0;
  SparseVector out;
  out.dim = vocab.size();
  for (const auto& [idx, count] : tf) {
    out.index.push_back(idx);
    out.value.push_back(count * vocab.idf()[idx]);
  }
  return out;
}

namespace {

std::array<double, kScaledUserFeatures> raw_counts(const UserProfile& u) {
  return {u.desc_len, u.name_len, u.followers, u.follows, u.post_count, u.account_age_days};
}

}  // namespace

UserScaler UserScaler::fit(const std::vector<UserProfile>& profiles) {
  UserScaler s;
  if (profiles.empty()) return s;
  const double n = static_cast<double>(profiles.size());
  for (const auto& p : profiles) {
    const auto v = raw_counts(p);
    for (std::size_t j = 0; j < kScaledUserFeatures; ++j) s.mean[j] += v[j] / n;
  }
  std::array<double, kScaledUserFeatures> var{};
  for (const auto& p : profiles) {
    const auto v = raw_counts(p);
    for (std::size_t j = 0; j < kScaledUserFeatures; ++j) var[j] += (v[j] - s.mean[j]) * (v[j] - s.mean[j]) / n;
  }
  for (std::size_t j = 0; j < kScaledUserFeatures; ++j) s.stddev[j] = var[j] > 0 ? std::sqrt(var[j]) : 1.0;
  return s;
}

UserScaler UserScaler::fit(const std::vector<NewsStory>& stories, std::size_t posts_per_story) {
  std::vector<UserProfile> profiles;
  for (const auto& story : stories)
    for (std::size_t i = 0; i < story.posts.size() && i < posts_per_story; ++i) profiles.push_back(story.posts[i].user);
  return fit(profiles);
}

UserVector UserScaler::transform(const UserProfile& profile) const {
  const auto v = raw_counts(profile);
  UserVector out{};
  for (std::size_t j = 0; j < kScaledUserFeatures; ++j) out[j] = (v[j] - mean[j]) / stddev[j];
  out[6] = profile.verified ? 1.0 : 0.0;
  out[7] = profile.geo ? 1.0 : 0.0;
  return out;
}

UserVector user_vector(const UserProfile& profile, const UserScaler& scaler) { return scaler.transform(profile); }

std::size_t FeatureBundle::real_length() const {
  return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), std::uint8_t{1}));
}

FeatureBundle build_bundle(const NewsStory& story, const Vocabulary& vocab, const UserScaler& scaler,
                           const FeatureConfig& config) {
  if (config.seq_len == 0) throw Error(ErrorCode::ConfigMismatch, "sequence length must be > 0");
  FeatureBundle b;
  b.story_id = story.id;
  b.label = story.label;
  b.linguistic.assign(config.seq_len, SparseVector{vocab.size(), {}, {}});
  b.users.assign(config.seq_len, UserVector{});
  b.mask.assign(config.seq_len, 0);
  const std::size_t real = std::min(config.seq_len, story.posts.size());
  for (std::size_t i = 0; i < real; ++i) {
    const Post& post = story.posts[i];
    b.linguistic[i] = vectorize_post(tokenize(post.text), vocab);
    b.users[i] = scaler.transform(post.user);
    b.mask[i] = 1;
  }
  switch (config.temporal) {
    case TemporalKind::Infectiousness:
      b.temporal = infectiousness_series(story, config.grid_hours, config.kernel).values;
      break;
    case TemporalKind::PostCounts:
      b.temporal = post_count_series(story, config.grid_hours);
      break;
    case TemporalKind::None:
      break;
  }
  return b;
}

Featurizer Featurizer::fit(const std::vector<NewsStory>& training, const FeatureConfig& config) {
  if (training.empty()) throw Error(ErrorCode::EmptyCorpus, "featurizer needs training stories");
  Featurizer f;
  f.config = config;
  // The corpus is the posts the model actually reads: the first seq_len of each story.
  std::vector<std::vector<std::string>> docs;
  for (const auto& story : training)
    for (std::size_t i = 0; i < story.posts.size() && i < config.seq_len; ++i) docs.push_back(tokenize(story.posts[i].text));
  f.vocab = build_vocabulary(docs, config.vocab_size, config.ranking);
  f.users = UserScaler::fit(training, config.seq_len);
  if (config.temporal != TemporalKind::None) {
    std::vector<double> values;
    for (const auto& story : training) {
      const auto series = config.temporal == TemporalKind::Infectiousness
                               ? infectiousness_series(story, config.grid_hours, config.kernel).values
                               : post_count_series(story, config.grid_hours);
      values.insert(values.end(), series.begin(), series.end());
    }
    double mean = 0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double var = 0;
    for (double v : values) var += (v - mean) * (v - mean);
    var /= static_cast<double>(values.size());
    f.temporal = {mean, var > 0 ? std::sqrt(var) : 1.0};
  }
  return f;
}

FeatureBundle Featurizer::featurize(const NewsStory& story) const {
  FeatureBundle b = build_bundle(story, vocab, users, config);
  if (b.temporal)
    for (double& v : *b.temporal) v = (v - temporal.mean) / temporal.stddev;
  return b;
}

std::string to_string(TemporalKind kind) {
  switch (kind) {
    case TemporalKind::Infectiousness: return "infectiousness";
    case TemporalKind::PostCounts: return "post_counts";
    case TemporalKind::None: return "none";
  }
  return "none";
}

TemporalKind parse_temporal_kind(const std::string& text) {
  if (text == "infectiousness") return TemporalKind::Infectiousness;
  if (text == "post_counts") return TemporalKind::PostCounts;
  if (text == "none") return TemporalKind::None;
  throw Error(ErrorCode::ParseError, "unknown temporal kind '" + text + "'");
}

nlohmann::json Featurizer::to_json() const {
  using nlohmann::json;
  return json{{"format_version", kFeaturizerFormatVersion},
              {"config",
               {{"seq_len", config.seq_len},
                {"grid_hours", config.grid_hours},
                {"temporal", to_string(config.temporal)},
                {"vocab_size", config.vocab_size},
                {"ranking", config.ranking == TermRanking::MaxTfIdf ? "max" : "sum"},
                {"kernel", {{"c", config.kernel.c}, {"s0", config.kernel.s0}, {"theta", config.kernel.theta}}}}},
              {"vocabulary", {{"terms", vocab.terms()}, {"idf", vocab.idf()}}},
              {"user_scaler", {{"mean", users.mean}, {"std", users.stddev}}},
              {"temporal_scaler", {{"mean", temporal.mean}, {"std", temporal.stddev}}}};
}

Featurizer Featurizer::from_json(const nlohmann::json& doc) {
  try {
    if (doc.at("format_version").get<int>() != kFeaturizerFormatVersion)
      throw Error(ErrorCode::ParseError, "unsupported featurizer format version");
    Featurizer f;
    const auto& c = doc.at("config");
    f.config.seq_len = c.at("seq_len").get<std::size_t>();
    f.config.grid_hours = c.at("grid_hours").get<std::vector<double>>();
    f.config.temporal = parse_temporal_kind(c.at("temporal").get<std::string>());
    f.config.vocab_size = c.at("vocab_size").get<std::size_t>();
    f.config.ranking = c.at("ranking").get<std::string>() == "sum" ? TermRanking::SumTfIdf : TermRanking::MaxTfIdf;
    f.config.kernel = {c.at("kernel").at("c").get<double>(), c.at("kernel").at("s0").get<double>(),
                       c.at("kernel").at("theta").get<double>()};
    f.vocab = Vocabulary(doc.at("vocabulary").at("terms").get<std::vector<std::string>>(),
                         doc.at("vocabulary").at("idf").get<std::vector<double>>());
    f.users.mean = doc.at("user_scaler").at("mean").get<std::array<double, kScaledUserFeatures>>();
    f.users.stddev = doc.at("user_scaler").at("std").get<std::array<double, kScaledUserFeatures>>();
    f.temporal = {doc.at("temporal_scaler").at("mean").get<double>(), doc.at("temporal_scaler").at("std").get<double>()};
    return f;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("featurizer artifact: ") + e.what());
  }
}

}  // namespace cascadefuse
