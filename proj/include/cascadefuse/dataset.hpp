#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cascadefuse/cascade.hpp"
#include "cascadefuse/hawkes.hpp"

namespace cascadefuse {

enum class Split { Train, Val, Test };

std::string_view to_string(Split split);
std::optional<Split> parse_split(std::string_view text);

/// Stories plus their declared label set and (optionally) a split assignment.
struct DatasetManifest {
  std::vector<NewsStory> stories;
  LabelSet label_set = LabelSet::Binary;
  std::map<std::string, Split> split;  ///< empty until assigned
  std::uint64_t seed = 0;              ///< seed of the split; not persisted

  bool has_split() const { return !split.empty(); }
  std::vector<NewsStory> subset(Split which) const;
  std::size_t count(Split which) const;
  bool operator==(const DatasetManifest& other) const {
    return stories == other.stories && label_set == other.label_set && split == other.split;
  }
};

nlohmann::json story_to_json(const NewsStory& story);
/// Parses the fields of one story; the label is checked later by the loader.
NewsStory story_from_json(const nlohmann::json& doc);

/// JSON Lines, one story per line. Blank lines are skipped. Lines may carry
/// "classes" (2 or 4) and "split" ("train", "val", "test"). Every story is
/// validated. Throws ParseError (with the line number), MixedLabelSets,
/// UnknownLabel and the validate_story errors.
DatasetManifest read_dataset(std::istream& in);
DatasetManifest load_dataset(const std::string& path);
void write_dataset(const DatasetManifest& manifest, std::ostream& out);
void save_dataset(const DatasetManifest& manifest, const std::string& path);

struct SplitOptions {
  double test_fraction = 0.25;  ///< 3:1 train+val : test
  double val_fraction = 0.15;   ///< of the train+val portion
  std::uint64_t seed = 0;
  bool stratified = true;
};

/// Seeded shuffle, then test = round(test_fraction n) clamped to [1, n - 1]
/// and val = round(val_fraction (n - test)) per stratum (one stratum per
/// label when stratified). Throws TooFewStories when a stratum has < 2 stories.
DatasetManifest split_dataset(DatasetManifest manifest, const SplitOptions& options);

/// Generator settings for labelled synthetic cascades. Real stories follow
/// a decaying infectiousness profile, fake ones add a second upsurge.
struct SyntheticSpec {
  double base_rate = 0.0126;       ///< infectiousness at h = 0
  double base_jitter = 0.2;        ///< log-sd of the per-story base rate
  double decay_hours = 10;
  double floor = 0.15;             ///< long-run fraction of the base rate
  double bump_hour = 22;
  double bump_hour_jitter = 2;     ///< uniform +- hours
  double bump_width_hours = 4;
  double bump_amplitude = 1.5;     ///< relative to the base rate
  double horizon_hours = 144;
  double step_hours = 0.25;        ///< profile knot spacing
  FollowerSampler reshare_followers = FollowerSampler::lognormal(30, 1.0);
  FollowerSampler seed_followers = FollowerSampler::lognormal(20000, 0.5);
  std::size_t max_events = 20000;
  double text_overlap = 0.8;       ///< 1 = one shared token distribution
  std::size_t shared_words = 400;
  std::size_t class_words = 200;
  std::size_t min_words = 5;
  std::size_t max_words = 15;

  double real_profile(double hours, double base) const;
  double fake_profile(double hours, double base, double bump_hour) const;

  nlohmann::json to_json() const;
  /// Missing keys keep their defaults. Follower distributions use the
  /// FollowerSampler::parse syntax.
  static SyntheticSpec from_json(const nlohmann::json& doc);
};

/// n_per_class real then n_per_class fake stories, binary label set, no split.
DatasetManifest generate_synthetic(std::size_t n_per_class, std::uint64_t seed, const SyntheticSpec& spec = {});

}  // namespace cascadefuse
