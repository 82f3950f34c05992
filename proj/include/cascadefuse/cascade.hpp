#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cascadefuse {

/// Profile attributes of the account behind a post. Counts are stored as
/// doubles so that scaled or averaged profiles stay representable.
struct UserProfile {
  double desc_len = 0;
  double name_len = 0;
  double followers = 0;
  double follows = 0;
  double post_count = 0;
  double account_age_days = 0;
  bool verified = false;
  bool geo = false;

  bool operator==(const UserProfile&) const = default;
};

struct Post {
  double t = 0;          ///< seconds since the story's first post
  double followers = 0;  ///< audience size of the post
  std::string text;
  UserProfile user;

  bool operator==(const Post&) const = default;
};

enum class Label : int { True = 0, Fake = 1, Unverified = 2, Debunking = 3 };

/// Binary datasets use {true, fake}; four-class ones add unverified and debunking.
enum class LabelSet : int { Binary = 2, FourClass = 4 };

constexpr std::size_t class_count(LabelSet set) { return static_cast<std::size_t>(set); }
constexpr std::size_t label_index(Label label) { return static_cast<std::size_t>(label); }
bool contains(LabelSet set, Label label);

std::string_view to_string(Label label);
std::string_view to_string(LabelSet set);
/// Accepts the canonical names plus the common aliases used by public
/// releases ("real", "false", "rumor", "non-rumor", "0", "1"...).
std::optional<Label> parse_label(std::string_view text);
std::optional<LabelSet> parse_label_set(std::string_view text);

struct NewsStory {
  std::string id;
  Label label = Label::True;
  std::vector<Post> posts;

  bool operator==(const NewsStory&) const = default;
};

/// Sorts posts by time (stable), rebases so the earliest post sits at t = 0,
/// and checks the label against `label_set`. Throws Error with EmptyStory,
/// NegativeTime, UnknownLabel or InvalidParams.
NewsStory validate_story(NewsStory candidate, LabelSet label_set = LabelSet::FourClass);

/// Posts with t <= horizon, order preserved. The source post always survives.
NewsStory truncate_story(const NewsStory& story, double horizon_seconds);

}  // namespace cascadefuse
