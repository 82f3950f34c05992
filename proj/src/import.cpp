#include "cascadefuse/import.hpp"

#include <filesystem>
#include <fstream>
#include <map>
#include <regex>
#include <sstream>

#include "cascadefuse/error.hpp"
#include "cascadefuse/log.hpp"

namespace cascadefuse {

namespace fs = std::filesystem;
using nlohmann::json;

ImportFormat parse_import_format(const std::string& text) {
  if (text == "weibo") return ImportFormat::Weibo;
  if (text == "twitter15" || text == "twitter16" || text == "twitter") return ImportFormat::Twitter;
  throw Error(ErrorCode::UsageError, "unknown import format '" + text + "' (weibo, twitter15, twitter16)");
}

namespace {

std::ifstream open(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "'");
  return in;
}

double number(const json& obj, const char* key) {
  if (!obj.contains(key) || obj.at(key).is_null()) return 0;
  const auto& v = obj.at(key);
  if (v.is_boolean()) return v.get<bool>() ? 1 : 0;
  if (v.is_string()) {
    try {
      return std::stod(v.get<std::string>());
    } catch (const std::exception&) {
      return 0;
    }
  }
  return v.get<double>();
}

std::size_t utf8_length(const std::string& s) {
  std::size_t n = 0;
  for (unsigned char c : s) n += (c & 0xC0) != 0x80;
  return n;
}

std::string text_of(const json& obj, const char* key) {
  return obj.contains(key) && obj.at(key).is_string() ? obj.at(key).get<std::string>() : std::string();
}

}  // namespace

DatasetManifest import_weibo(const std::string& root) {
  const fs::path base(root);
  auto index = open(base / "Weibo.txt");
  DatasetManifest m;
  m.label_set = LabelSet::Binary;
  std::string line;
  std::size_t skipped = 0;
  for (std::size_t lineno = 1; std::getline(index, line); ++lineno) {
    std::istringstream fields(line);
    std::string eid_field, label_field;
    if (!(fields >> eid_field >> label_field)) continue;
    if (eid_field.rfind("eid:", 0) != 0 || label_field.rfind("label:", 0) != 0)
      throw ParseError(lineno, "expected 'eid:ID label:L'");
    const std::string eid = eid_field.substr(4);
    const std::string label = label_field.substr(6);
    const fs::path posts_path = base / "Weibo" / (eid + ".json");
    if (!fs::exists(posts_path)) {
      ++skipped;
      continue;
    }
    json posts;
    try {
      auto in = open(posts_path);
      posts = json::parse(in);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::ParseError, posts_path.string() + ": " + e.what());
    }
    NewsStory story;
    story.id = eid;
    story.label = label == "1" ? Label::Fake : Label::True;
    if (label != "0" && label != "1") throw ParseError(lineno, "Weibo labels are 0 or 1");
    for (const auto& p : posts) {
      Post post;
      post.t = number(p, "t");
      post.text = text_of(p, "text");
      post.followers = number(p, "followers_count");
      post.user.followers = post.followers;
      post.user.follows = number(p, "friends_count");
      post.user.post_count = number(p, "statuses_count");
      post.user.verified = number(p, "verified") != 0;
      post.user.geo = number(p, "user_geo_enabled") != 0;
      post.user.name_len = static_cast<double>(utf8_length(text_of(p, "username")));
      post.user.desc_len = static_cast<double>(utf8_length(text_of(p, "user_description")));
      const double created = number(p, "user_created_at");
      post.user.account_age_days = created > 0 ? std::max(0.0, (post.t - created) / 86400.0) : 0.0;
      story.posts.push_back(std::move(post));
    }
    if (story.posts.empty()) {
      ++skipped;
      continue;
    }
    m.stories.push_back(validate_story(std::move(story), m.label_set));
  }
  if (skipped) warn("weibo import: skipped " + std::to_string(skipped) + " events without post files");
  if (m.stories.empty()) throw Error(ErrorCode::EmptyDataset, "no Weibo events found under '" + root + "'");
  return m;
}

DatasetManifest import_twitter(const std::string& root) {
  const fs::path base(root);
  std::map<std::string, std::string> source_text;
  {
    auto in = open(base / "source_tweets.txt");
    std::string line;
    while (std::getline(in, line)) {
      const auto tab = line.find('\t');
      if (tab == std::string::npos) continue;
      source_text[line.substr(0, tab)] = line.substr(tab + 1);
    }
  }
  static const std::regex edge(R"(\[([^\]]*)\]\s*->\s*\[([^\]]*)\])");
  static const std::regex triple(R"(^\s*'?([^',]*)'?\s*,\s*'?([^',]*)'?\s*,\s*'?([^',]*)'?\s*$)");

  DatasetManifest m;
  m.label_set = LabelSet::FourClass;
  auto labels = open(base / "label.txt");
  std::string line;
  std::size_t skipped = 0;
  for (std::size_t lineno = 1; std::getline(labels, line); ++lineno) {
    if (line.empty() || line == "\r") continue;
    const auto colon = line.find(':');
    if (colon == std::string::npos) throw ParseError(lineno, "expected 'label:tweet_id'");
    const std::string name = line.substr(0, colon);
    std::string id = line.substr(colon + 1);
    while (!id.empty() && (id.back() == '\r' || id.back() == ' ')) id.pop_back();
    NewsStory story;
    story.id = id;
    if (name == "non-rumor") story.label = Label::True;
    else if (name == "false") story.label = Label::Fake;
    else if (name == "unverified") story.label = Label::Unverified;
    else if (name == "true") story.label = Label::Debunking;
    else throw ParseError(lineno, "unknown Twitter label '" + name + "'");

    const fs::path tree_path = base / "tree" / (id + ".txt");
    if (!fs::exists(tree_path)) {
      ++skipped;
      continue;
    }
    const std::string text = source_text.count(id) ? source_text[id] : std::string();
    auto tree = open(tree_path);
    std::string edge_line;
    for (std::size_t tl = 1; std::getline(tree, edge_line); ++tl) {
      std::smatch match;
      if (!std::regex_search(edge_line, match, edge)) continue;
      const std::string parent = match[1].str();
      const std::string child = match[2].str();
      std::smatch fields;
      if (!std::regex_match(child, fields, triple))
        throw Error(ErrorCode::ParseError, tree_path.string() + " line " + std::to_string(tl) + ": bad node");
      Post post;
      try {
        post.t = std::stod(fields[3].str()) * 60.0;
      } catch (const std::exception&) {
        throw Error(ErrorCode::ParseError, tree_path.string() + " line " + std::to_string(tl) + ": bad delay");
      }
      const bool is_root = parent.find("ROOT") != std::string::npos;
      // Retweets repeat the source id; replies have their own ids and no text in the release.
      post.text = is_root || fields[2].str() == id ? text : std::string();
      post.followers = 1;
      post.user.followers = 1;
      if (is_root) story.posts.insert(story.posts.begin(), std::move(post));
      else story.posts.push_back(std::move(post));
    }
    if (story.posts.empty()) {
      ++skipped;
      continue;
    }
    for (auto& p : story.posts) p.t = std::max(p.t, 0.0);
    m.stories.push_back(validate_story(std::move(story), m.label_set));
  }
  if (skipped) warn("twitter import: skipped " + std::to_string(skipped) + " stories without trees");
  if (m.stories.empty()) throw Error(ErrorCode::EmptyDataset, "no Twitter stories found under '" + root + "'");
  warn("twitter import: the release has no audience sizes; followers set to 1 for every post");
  return m;
}

DatasetManifest import_dataset(ImportFormat format, const std::string& root) {
  return format == ImportFormat::Weibo ? import_weibo(root) : import_twitter(root);
}

}  // namespace cascadefuse
