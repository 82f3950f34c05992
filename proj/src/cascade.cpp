#include "cascadefuse/cascade.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "cascadefuse/error.hpp"

namespace cascadefuse {

bool contains(LabelSet set, Label label) { return label_index(label) < class_count(set); }

std::string_view to_string(Label label) {
  switch (label) {
    case Label::True: return "true";
    case Label::Fake: return "fake";
    case Label::Unverified: return "unverified";
    case Label::Debunking: return "debunking";
  }
  return "?";
}

std::string_view to_string(LabelSet set) {
  return set == LabelSet::Binary ? "binary" : "four-class";
}

std::optional<Label> parse_label(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "true" || lower == "real" || lower == "0" || lower == "non-rumor" ||
      lower == "non_rumor" || lower == "nonrumor")
    return Label::True;
  if (lower == "fake" || lower == "false" || lower == "1" || lower == "rumor") return Label::Fake;
  if (lower == "unverified") return Label::Unverified;
  if (lower == "debunking" || lower == "debunking of fake") return Label::Debunking;
  return std::nullopt;
}

std::optional<LabelSet> parse_label_set(std::string_view text) {
  if (text == "binary" || text == "2") return LabelSet::Binary;
  if (text == "four-class" || text == "4") return LabelSet::FourClass;
  return std::nullopt;
}

namespace {

void check_count(double value, const char* field, const std::string& id) {
  if (!std::isfinite(value) || value < 0)
    throw Error(ErrorCode::InvalidParams,
                "story '" + id + "': field '" + field + "' must be a finite count >= 0");
}

}  // namespace

NewsStory validate_story(NewsStory candidate, LabelSet label_set) {
  if (candidate.posts.empty())
    throw Error(ErrorCode::EmptyStory, "story '" + candidate.id + "' has no posts");
  if (!contains(label_set, candidate.label))
    throw Error(ErrorCode::UnknownLabel, "story '" + candidate.id + "': label '" +
                                             std::string(to_string(candidate.label)) +
                                             "' is not in the " +
                                             std::string(to_string(label_set)) + " label set");
  for (const Post& post : candidate.posts) {
    if (!std::isfinite(post.t) || post.t < 0)
      throw Error(ErrorCode::NegativeTime, "story '" + candidate.id + "' has a post at t = " +
                                               std::to_string(post.t));
    check_count(post.followers, "followers", candidate.id);
    const UserProfile& u = post.user;
    check_count(u.desc_len, "desc_len", candidate.id);
    check_count(u.name_len, "name_len", candidate.id);
    check_count(u.followers, "user.followers", candidate.id);
    check_count(u.follows, "follows", candidate.id);
    check_count(u.post_count, "posts", candidate.id);
    check_count(u.account_age_days, "account_age_days", candidate.id);
  }

  std::stable_sort(candidate.posts.begin(), candidate.posts.end(),
                   [](const Post& a, const Post& b) { return a.t < b.t; });
  const double origin = candidate.posts.front().t;
  if (origin != 0)
    for (Post& post : candidate.posts) post.t -= origin;
  return candidate;
}

NewsStory truncate_story(const NewsStory& story, double horizon_seconds) {
  if (!(horizon_seconds >= 0))
    throw Error(ErrorCode::InvalidParams, "truncation horizon must be >= 0");
  NewsStory out{story.id, story.label, {}};
  for (const Post& post : story.posts)
    if (post.t <= horizon_seconds) out.posts.push_back(post);
  return out;
}

}  // namespace cascadefuse
