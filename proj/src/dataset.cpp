#include "cascadefuse/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "cascadefuse/error.hpp"

namespace cascadefuse {

using nlohmann::json;

std::string_view to_string(Split split) {
  switch (split) {
    case Split::Train: return "train";
    case Split::Val: return "val";
    case Split::Test: return "test";
  }
  return "?";
}

std::optional<Split> parse_split(std::string_view text) {
  if (text == "train") return Split::Train;
  if (text == "val" || text == "validation") return Split::Val;
  if (text == "test") return Split::Test;
  return std::nullopt;
}

std::vector<NewsStory> DatasetManifest::subset(Split which) const {
  std::vector<NewsStory> out;
  for (const auto& s : stories)
    if (auto it = split.find(s.id); it != split.end() && it->second == which) out.push_back(s);
  return out;
}

std::size_t DatasetManifest::count(Split which) const {
  return static_cast<std::size_t>(
      std::count_if(split.begin(), split.end(), [&](const auto& kv) { return kv.second == which; }));
}

json story_to_json(const NewsStory& story) {
  json posts = json::array();
  for (const auto& p : story.posts) {
    const auto& u = p.user;
    posts.push_back({{"t", p.t},
                     {"followers", p.followers},
                     {"text", p.text},
                     {"user",
                      {{"desc_len", u.desc_len},
                       {"name_len", u.name_len},
                       {"followers", u.followers},
                       {"follows", u.follows},
                       {"posts", u.post_count},
                       {"account_age_days", u.account_age_days},
                       {"verified", u.verified ? 1 : 0},
                       {"geo", u.geo ? 1 : 0}}}});
  }
  return {{"id", story.id}, {"label", std::string(to_string(story.label))}, {"posts", posts}};
}

namespace {

bool read_flag(const json& v) {
  if (v.is_boolean()) return v.get<bool>();
  const double x = v.get<double>();
  if (x != 0 && x != 1) throw Error(ErrorCode::InvalidParams, "flags must be 0 or 1");
  return x == 1;
}

double number_or(const json& obj, const char* key, double fallback) {
  return obj.contains(key) ? obj.at(key).get<double>() : fallback;
}

}  // namespace

NewsStory story_from_json(const json& doc) {
  NewsStory story;
  story.id = doc.at("id").is_string() ? doc.at("id").get<std::string>() : doc.at("id").dump();
  const auto label_text = doc.at("label").is_string() ? doc.at("label").get<std::string>() : doc.at("label").dump();
  const auto label = parse_label(label_text);
  if (!label) throw Error(ErrorCode::UnknownLabel, "story '" + story.id + "': unknown label '" + label_text + "'");
  story.label = *label;
  for (const auto& p : doc.at("posts")) {
    Post post;
    post.t = p.at("t").get<double>();
    post.followers = number_or(p, "followers", 0);
    post.text = p.contains("text") ? p.at("text").get<std::string>() : std::string();
    if (p.contains("user")) {
      const auto& u = p.at("user");
      post.user.desc_len = number_or(u, "desc_len", 0);
      post.user.name_len = number_or(u, "name_len", 0);
      post.user.followers = number_or(u, "followers", post.followers);
      post.user.follows = number_or(u, "follows", 0);
      post.user.post_count = number_or(u, "posts", 0);
      post.user.account_age_days = number_or(u, "account_age_days", 0);
      post.user.verified = u.contains("verified") && read_flag(u.at("verified"));
      post.user.geo = u.contains("geo") && read_flag(u.at("geo"));
    } else {
      post.user.followers = post.followers;
    }
    story.posts.push_back(std::move(post));
  }
  return story;
}

DatasetManifest read_dataset(std::istream& in) {
  struct Pending {
    NewsStory story;
    std::optional<LabelSet> declared;
    std::optional<Split> split;
    std::size_t line;
  };
  std::vector<Pending> pending;
  std::string text;
  for (std::size_t line = 1; std::getline(in, text); ++line) {
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    json doc;
    try {
      doc = json::parse(text);
    } catch (const json::exception& e) {
      throw ParseError(line, e.what());
    }
    Pending p{{}, std::nullopt, std::nullopt, line};
    try {
      p.story = story_from_json(doc);
      if (doc.contains("classes")) {
        const auto& c = doc.at("classes");
        p.declared = parse_label_set(c.is_string() ? c.get<std::string>() : c.dump());
        if (!p.declared) throw ParseError(line, "'classes' must be 2 or 4");
      }
      if (doc.contains("split")) {
        p.split = parse_split(doc.at("split").get<std::string>());
        if (!p.split) throw ParseError(line, "'split' must be train, val or test");
      }
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw Error(e.code(), "line " + std::to_string(line) + ": " + e.what());
    } catch (const json::exception& e) {
      throw ParseError(line, e.what());
    }
    pending.push_back(std::move(p));
  }
  if (pending.empty()) throw Error(ErrorCode::EmptyDataset, "dataset has no stories");

  // Label set: explicit declarations must agree with each other and with the
  // labels present; otherwise four-class labels imply the four-class set.
  std::optional<LabelSet> declared;
  bool needs_four = false;
  for (const auto& p : pending) {
    if (p.declared) {
      if (declared && *declared != *p.declared)
        throw Error(ErrorCode::MixedLabelSets, "line " + std::to_string(p.line) + " declares a different label set");
      declared = p.declared;
    }
    needs_four = needs_four || !contains(LabelSet::Binary, p.story.label);
  }
  DatasetManifest m;
  m.label_set = declared.value_or(needs_four ? LabelSet::FourClass : LabelSet::Binary);
  if (m.label_set == LabelSet::Binary && needs_four)
    throw Error(ErrorCode::MixedLabelSets, "binary dataset contains four-class labels");

  std::set<std::string> seen;
  std::size_t with_split = 0;
  for (auto& p : pending) {
    try {
      p.story = validate_story(std::move(p.story), m.label_set);
    } catch (const Error& e) {
      throw Error(e.code(), "line " + std::to_string(p.line) + ": " + e.what());
    }
    if (!seen.insert(p.story.id).second) throw ParseError(p.line, "duplicate story id '" + p.story.id + "'");
    if (p.split) {
      m.split[p.story.id] = *p.split;
      ++with_split;
    }
    m.stories.push_back(std::move(p.story));
  }
  if (with_split != 0 && with_split != m.stories.size())
    throw Error(ErrorCode::ParseError, "either every story or none must carry a split");
  return m;
}

DatasetManifest load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path + "'");
  return read_dataset(in);
}

void write_dataset(const DatasetManifest& m, std::ostream& out) {
  for (const auto& story : m.stories) {
    json doc = story_to_json(story);
    doc["classes"] = static_cast<int>(class_count(m.label_set));
    if (auto it = m.split.find(story.id); it != m.split.end()) doc["split"] = std::string(to_string(it->second));
    out << doc.dump() << '\n';
  }
}

void save_dataset(const DatasetManifest& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write '" + path + "'");
  write_dataset(m, out);
  if (!out) throw Error(ErrorCode::IoError, "failed writing '" + path + "'");
}

DatasetManifest split_dataset(DatasetManifest m, const SplitOptions& options) {
  if (!(options.test_fraction > 0 && options.test_fraction < 1) ||
      !(options.val_fraction >= 0 && options.val_fraction < 1))
    throw Error(ErrorCode::InvalidParams, "split fractions must lie in (0, 1)");
  std::map<int, std::vector<std::size_t>> strata;
  for (std::size_t i = 0; i < m.stories.size(); ++i)
    strata[options.stratified ? static_cast<int>(m.stories[i].label) : 0].push_back(i);

  m.split.clear();
  m.seed = options.seed;
  for (auto& [key, members] : strata) {
    const std::size_t n = members.size();
    if (n < 2)
      throw Error(ErrorCode::TooFewStories,
                  options.stratified ? "class '" + std::string(to_string(static_cast<Label>(key))) + "' has fewer than 2 stories"
                                     : std::string("need at least 2 stories"));
    std::mt19937_64 rng(derive_seed(options.seed, static_cast<std::uint64_t>(key)));
    std::shuffle(members.begin(), members.end(), rng);
    const auto test = std::clamp<std::size_t>(
        static_cast<std::size_t>(std::llround(options.test_fraction * static_cast<double>(n))), 1, n - 1);
    const auto val = std::min<std::size_t>(
        static_cast<std::size_t>(std::llround(options.val_fraction * static_cast<double>(n - test))), n - test - 1);
    for (std::size_t k = 0; k < n; ++k)
      m.split[m.stories[members[k]].id] = k < test ? Split::Test : (k < test + val ? Split::Val : Split::Train);
  }
  return m;
}

double SyntheticSpec::real_profile(double hours, double base) const {
  return base * (floor + (1.0 - floor) * std::exp(-hours / decay_hours));
}

double SyntheticSpec::fake_profile(double hours, double base, double peak_hour) const {
  const double z = (hours - peak_hour) / bump_width_hours;
  return real_profile(hours, base) + base * bump_amplitude * std::exp(-0.5 * z * z);
}

namespace {

std::string sampler_spec(const FollowerSampler& s) {
  std::ostringstream out;
  out.precision(17);
  switch (s.kind) {
    case FollowerSampler::Kind::Constant: out << "const:" << s.a; break;
    case FollowerSampler::Kind::LogNormal: out << "lognormal:" << std::exp(s.a) << ':' << s.b; break;
    case FollowerSampler::Kind::UniformInt: out << "uniform:" << s.a << ':' << s.b; break;
  }
  return out.str();
}

std::string make_word(char prefix, std::size_t k) {
  std::string digits = std::to_string(k);
  return std::string(1, prefix) + std::string(digits.size() < 3 ? 3 - digits.size() : 0, '0') + digits;
}

}  // namespace

json SyntheticSpec::to_json() const {
  return {{"base_rate", base_rate},
          {"base_jitter", base_jitter},
          {"decay_hours", decay_hours},
          {"floor", floor},
          {"bump_hour", bump_hour},
          {"bump_hour_jitter", bump_hour_jitter},
          {"bump_width_hours", bump_width_hours},
          {"bump_amplitude", bump_amplitude},
          {"horizon_hours", horizon_hours},
          {"step_hours", step_hours},
          {"reshare_followers", sampler_spec(reshare_followers)},
          {"seed_followers", sampler_spec(seed_followers)},
          {"max_events", max_events},
          {"text_overlap", text_overlap},
          {"shared_words", shared_words},
          {"class_words", class_words},
          {"min_words", min_words},
          {"max_words", max_words}};
}

SyntheticSpec SyntheticSpec::from_json(const json& doc) {
  SyntheticSpec s;
  try {
    auto take = [&](const char* key, auto& field) {
      if (doc.contains(key)) field = doc.at(key).get<std::decay_t<decltype(field)>>();
    };
    take("base_rate", s.base_rate);
    take("base_jitter", s.base_jitter);
    take("decay_hours", s.decay_hours);
    take("floor", s.floor);
    take("bump_hour", s.bump_hour);
    take("bump_hour_jitter", s.bump_hour_jitter);
    take("bump_width_hours", s.bump_width_hours);
    take("bump_amplitude", s.bump_amplitude);
    take("horizon_hours", s.horizon_hours);
    take("step_hours", s.step_hours);
    take("max_events", s.max_events);
    take("text_overlap", s.text_overlap);
    take("shared_words", s.shared_words);
    take("class_words", s.class_words);
    take("min_words", s.min_words);
    take("max_words", s.max_words);
    if (doc.contains("reshare_followers"))
      s.reshare_followers = FollowerSampler::parse(doc.at("reshare_followers").get<std::string>());
    if (doc.contains("seed_followers"))
      s.seed_followers = FollowerSampler::parse(doc.at("seed_followers").get<std::string>());
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("synthetic spec: ") + e.what());
  }
  if (!(s.text_overlap >= 0 && s.text_overlap <= 1) || s.min_words == 0 || s.min_words > s.max_words ||
      s.shared_words == 0 || s.class_words == 0 || !(s.horizon_hours > 0) || !(s.step_hours > 0) ||
      !(s.decay_hours > 0) || !(s.bump_width_hours > 0) || !(s.base_rate >= 0))
    throw Error(ErrorCode::InvalidParams, "synthetic generator settings out of range");
  return s;
}

DatasetManifest generate_synthetic(std::size_t n_per_class, std::uint64_t seed, const SyntheticSpec& spec) {
  if (n_per_class == 0) throw Error(ErrorCode::InvalidParams, "n_per_class must be >= 1");
  DatasetManifest m;
  m.label_set = LabelSet::Binary;
  m.seed = seed;

  for (int cls = 0; cls < 2; ++cls) {
    const Label label = cls == 0 ? Label::True : Label::Fake;
    for (std::size_t k = 0; k < n_per_class; ++k) {
      const std::uint64_t story_seed = derive_seed(seed, static_cast<std::uint64_t>(cls) * n_per_class + k);
      std::mt19937_64 rng(story_seed);
      std::normal_distribution<double> normal(0.0, 1.0);
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      const double base = spec.base_rate * std::exp(spec.base_jitter * normal(rng));
      const double peak = spec.bump_hour + spec.bump_hour_jitter * (2 * unit(rng) - 1);
      const auto profile = InfectiousnessProfile::tabulate(
          [&](double h) { return label == Label::True ? spec.real_profile(h, base) : spec.fake_profile(h, base, peak); },
          spec.horizon_hours, spec.step_hours);

      SimulationOptions options;
      options.max_events = spec.max_events;
      options.seed_followers = spec.seed_followers.sample(rng);
      NewsStory story;
      for (std::uint64_t attempt = 0;; ++attempt) {
        try {
          story = simulate_hawkes(profile, spec.reshare_followers, spec.horizon_hours * kSecondsPerHour,
                                  derive_seed(story_seed, attempt + 1), options);
          break;
        } catch (const Error& e) {
          if (e.code() != ErrorCode::ExplodingCascade || attempt >= 16) throw;
        }
      }
      story.id = std::string(cls == 0 ? "real-" : "fake-") + std::to_string(k);
      story.label = label;

      std::uniform_int_distribution<std::size_t> length(spec.min_words, spec.max_words);
      std::uniform_int_distribution<std::size_t> shared(0, spec.shared_words - 1);
      std::uniform_int_distribution<std::size_t> own(0, spec.class_words - 1);
      std::lognormal_distribution<double> follows(std::log(200.0), 1.0), posts(std::log(2000.0), 1.2);
      std::uniform_int_distribution<int> desc(0, 160), name(3, 20), age(30, 3650);
      for (auto& post : story.posts) {
        const std::size_t words = length(rng);
        std::string text;
        for (std::size_t w = 0; w < words; ++w) {
          if (!text.empty()) text += ' ';
          text += unit(rng) < spec.text_overlap ? make_word('w', shared(rng)) : make_word(cls == 0 ? 'a' : 'b', own(rng));
        }
        post.text = std::move(text);
        post.user.desc_len = desc(rng);
        post.user.name_len = name(rng);
        post.user.followers = post.followers;
        post.user.follows = std::round(follows(rng));
        post.user.post_count = std::round(posts(rng));
        post.user.account_age_days = age(rng);
        post.user.verified = unit(rng) < 0.05;
        post.user.geo = unit(rng) < 0.2;
      }
      m.stories.push_back(validate_story(std::move(story), m.label_set));
    }
  }
  return m;
}

}  // namespace cascadefuse
