#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include <unistd.h>

#include "cascadefuse/dataset.hpp"
#include "cascadefuse/error.hpp"
#include "cascadefuse/import.hpp"
#include "cascadefuse/point_process.hpp"
#include "oracles.hpp"

using namespace cascadefuse;
namespace fs = std::filesystem;

namespace {

NewsStory small_story(const std::string& id, Label label, std::size_t posts = 2) {
  NewsStory s{id, label, {}};
  for (std::size_t i = 0; i < posts; ++i) s.posts.push_back(Post{60.0 * i, 10.0 + i, "word " + id, {}});
  return s;
}

DatasetManifest many(std::size_t n, LabelSet set = LabelSet::Binary) {
  DatasetManifest m;
  m.label_set = set;
  for (std::size_t i = 0; i < n; ++i)
    m.stories.push_back(small_story("s" + std::to_string(i), static_cast<Label>(i % class_count(set))));
  return m;
}

fs::path temp_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("cascadefuse_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

void write_file(const fs::path& p, const std::string& text) {
  fs::create_directories(p.parent_path());
  std::ofstream(p) << text;
}

}  // namespace

TEST_SUITE("dataset") {
  TEST_CASE("three line dataset loads") {
    std::istringstream in(
        R"({"id":"a","label":"true","posts":[{"t":0,"followers":5,"text":"hi","user":{}}]})"
        "\n\n"
        R"({"id":"b","label":"fake","posts":[{"t":10,"followers":5,"text":"x"},{"t":4,"followers":1,"text":"y"}]})"
        "\n"
        R"({"id":"c","label":"true","posts":[{"t":0,"followers":2,"text":"z","user":{"verified":1,"geo":true}}]})"
        "\n");
    const auto m = read_dataset(in);
    REQUIRE(m.stories.size() == 3);
    CHECK(m.label_set == LabelSet::Binary);
    CHECK(!m.has_split());
    CHECK(m.stories[1].posts[0].t == 0);
    CHECK(m.stories[1].posts[1].t == 6);
    CHECK(m.stories[2].posts[0].user.verified);
    CHECK(m.stories[2].posts[0].user.geo);
  }

  TEST_CASE("malformed line reports its number") {
    std::istringstream in(R"({"id":"a","label":"true","posts":[{"t":0,"followers":5}]})"
                          "\n{not json\n");
    try {
      read_dataset(in);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 2);
    }
  }

  TEST_CASE("conflicting label sets are rejected") {
    std::istringstream declared(
        R"({"id":"a","label":"true","classes":"binary","posts":[{"t":0,"followers":5}]})"
        "\n"
        R"({"id":"b","label":"true","classes":"four-class","posts":[{"t":0,"followers":5}]})"
        "\n");
    CHECK_THROWS_WITH_AS(read_dataset(declared), doctest::Contains("MixedLabelSets"), Error);
    std::istringstream implied(
        R"({"id":"a","label":"unverified","classes":"binary","posts":[{"t":0,"followers":5}]})"
        "\n");
    CHECK_THROWS_AS(read_dataset(implied), Error);
  }

  TEST_CASE("duplicates and partial splits are rejected") {
    std::istringstream dup(R"({"id":"a","label":"true","posts":[{"t":0,"followers":5}]})"
                           "\n"
                           R"({"id":"a","label":"true","posts":[{"t":0,"followers":5}]})"
                           "\n");
    CHECK_THROWS_AS(read_dataset(dup), ParseError);
    std::istringstream partial(R"({"id":"a","label":"true","split":"train","posts":[{"t":0,"followers":5}]})"
                               "\n"
                               R"({"id":"b","label":"true","posts":[{"t":0,"followers":5}]})"
                               "\n");
    CHECK_THROWS_AS(read_dataset(partial), Error);
  }

  TEST_CASE("write then read is lossless") {
    auto m = split_dataset(generate_synthetic(3, 9), SplitOptions{0.25, 0.15, 4, true});
    m.stories[0].posts[0].user.account_age_days = 0.1 + 1e-17;
    m.stories[0].posts[0].text = "quote \" and unicode \xE5\xBE\xAE\xE5\x8D\x9A";
    std::ostringstream first;
    write_dataset(m, first);
    std::istringstream in(first.str());
    const auto back = read_dataset(in);
    CHECK(back == m);
    std::ostringstream second;
    write_dataset(back, second);
    CHECK(second.str() == first.str());
  }

  TEST_CASE("plain split sizes") {
    auto m = split_dataset(many(100), SplitOptions{0.25, 0.15, 3, false});
    CHECK(m.count(Split::Test) == 25);
    CHECK(m.count(Split::Val) == 11);
    CHECK(m.count(Split::Train) == 64);
    const auto again = split_dataset(many(100), SplitOptions{0.25, 0.15, 3, false});
    CHECK(again.split == m.split);
    const auto other = split_dataset(many(100), SplitOptions{0.25, 0.15, 4, false});
    CHECK(other.split != m.split);
  }

  TEST_CASE("stratified split keeps class proportions") {
    auto m = many(4, LabelSet::FourClass);
    CHECK_THROWS_AS(split_dataset(m, SplitOptions{}), Error);
    for (std::size_t n : {10u, 37u, 101u}) {
      auto d = split_dataset(many(n, LabelSet::FourClass), SplitOptions{0.25, 0.15, 8, true});
      for (Split s : {Split::Train, Split::Val, Split::Test}) {
        std::vector<double> counts(4, 0), totals(4, 0);
        for (const auto& story : d.stories) {
          totals[label_index(story.label)] += 1;
          if (d.split.at(story.id) == s) counts[label_index(story.label)] += 1;
        }
        const double share = static_cast<double>(d.count(s)) / static_cast<double>(n);
        for (std::size_t c = 0; c < 4; ++c) CHECK(std::abs(counts[c] - share * totals[c]) <= 1.0 + 1e-9);
      }
      for (Split s : {Split::Train, Split::Test}) CHECK(d.count(s) > 0);
    }
  }

  TEST_CASE("synthetic corpus is deterministic and balanced") {
    const auto a = generate_synthetic(6, 21);
    const auto b = generate_synthetic(6, 21);
    CHECK(a == b);
    std::size_t fake = 0;
    for (const auto& s : a.stories) fake += s.label == Label::Fake;
    CHECK(a.stories.size() == 12);
    CHECK(fake == 6);
    CHECK(!(generate_synthetic(6, 22) == a));
    for (const auto& s : a.stories) CHECK_NOTHROW(validate_story(s, LabelSet::Binary));
  }

  TEST_CASE("synthetic profiles: late bump for fake, decay for real") {
    const SyntheticSpec spec;
    const double base = spec.base_rate;
    const double real_late =
        testutil::simpson([&](double h) { return spec.real_profile(h, base); }, 18, 30, 240);
    const double fake_late =
        testutil::simpson([&](double h) { return spec.fake_profile(h, base, spec.bump_hour); }, 18, 30, 240);
    CHECK(fake_late > 1.5 * real_late);
    for (double h = 0; h < 144; h += 0.5) CHECK(spec.real_profile(h + 0.5, base) < spec.real_profile(h, base));

    // The same ordering survives simulation and estimation.
    const auto m = generate_synthetic(50, 5);
    const auto grid = hourly_grid(47);
    double real_mass = 0, fake_mass = 0;
    std::size_t reals = 0, decaying = 0;
    for (const auto& story : m.stories) {
      const auto series = infectiousness_series(story, grid);
      double late = 0;
      for (std::size_t h = 17; h < 30; ++h) late += series.values[h];
      (story.label == Label::Fake ? fake_mass : real_mass) += late;
      if (story.label != Label::True) continue;
      ++reals;
      // Least-squares slope over hours 2..47.
      std::vector<double> x, y;
      for (std::size_t h = 1; h < grid.size(); ++h) {
        x.push_back(grid[h]);
        y.push_back(series.values[h]);
      }
      const double mx = std::accumulate(x.begin(), x.end(), 0.0) / x.size();
      const double my = std::accumulate(y.begin(), y.end(), 0.0) / y.size();
      double sxy = 0, sxx = 0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
      }
      decaying += sxy / sxx < 0;
    }
    CHECK(fake_mass > real_mass);
    CHECK(static_cast<double>(decaying) >= 0.9 * static_cast<double>(reals));
  }

  TEST_CASE("generator settings JSON round trip and validation") {
    SyntheticSpec s;
    s.text_overlap = 0.25;
    s.bump_hour = 30;
    const auto back = SyntheticSpec::from_json(s.to_json());
    CHECK(back.to_json() == s.to_json());
    CHECK_THROWS_AS(SyntheticSpec::from_json(nlohmann::json{{"text_overlap", 2}}), Error);
  }
}

TEST_SUITE("import") {
  TEST_CASE("weibo layout") {
    const auto dir = temp_dir("weibo");
    write_file(dir / "Weibo.txt", "eid:100 label:1\teid 5 6\neid:200 label:0\neid:300 label:0\n");
    write_file(dir / "Weibo" / "100.json",
               R"([{"t":100000,"text":"src","followers_count":900,"friends_count":3,"statuses_count":7,)"
               R"("verified":true,"user_geo_enabled":false,"user_created_at":13600,"username":"ab",)"
               R"("user_description":"hello"},{"t":100600,"text":"rt","followers_count":10}])");
    write_file(dir / "Weibo" / "200.json", R"([{"t":5,"text":"other","followers_count":1}])");
    const auto m = import_weibo(dir.string());
    REQUIRE(m.stories.size() == 2);
    const auto& s = m.stories[0];
    CHECK(s.id == "100");
    CHECK(s.label == Label::Fake);
    CHECK(m.stories[1].label == Label::True);
    REQUIRE(s.posts.size() == 2);
    CHECK(s.posts[0].t == 0);
    CHECK(s.posts[1].t == 600);
    CHECK(s.posts[0].followers == 900);
    CHECK(s.posts[0].user.follows == 3);
    CHECK(s.posts[0].user.post_count == 7);
    CHECK(s.posts[0].user.verified);
    CHECK(s.posts[0].user.name_len == 2);
    CHECK(s.posts[0].user.desc_len == 5);
    CHECK(s.posts[0].user.account_age_days == doctest::Approx(1.0));
    fs::remove_all(dir);
    CHECK_THROWS_AS(import_weibo(dir.string()), Error);
  }

  TEST_CASE("twitter layout") {
    const auto dir = temp_dir("twitter");
    write_file(dir / "label.txt", "false:11\nnon-rumor:22\ntrue:33\n");
    write_file(dir / "source_tweets.txt", "11\tsource text\n22\tanother\n");
    write_file(dir / "tree" / "11.txt",
               "['ROOT', 'ROOT', '0.0']->['u1', '11', '0.0']\n"
               "['u1', '11', '0.0']->['u2', '11', '2.5']\n"
               "['u1', '11', '0.0']->['u3', '99', '1.0']\n");
    write_file(dir / "tree" / "22.txt", "['ROOT', 'ROOT', '0.0']->['u9', '22', '0.0']\n");
    const auto m = import_twitter(dir.string());
    CHECK(m.label_set == LabelSet::FourClass);
    REQUIRE(m.stories.size() == 2);
    const auto& s = m.stories[0];
    CHECK(s.label == Label::Fake);
    CHECK(m.stories[1].label == Label::True);
    REQUIRE(s.posts.size() == 3);
    CHECK(s.posts[0].text == "source text");
    CHECK(s.posts[1].t == 60);
    CHECK(s.posts[1].text.empty());
    CHECK(s.posts[2].t == 150);
    CHECK(s.posts[2].text == "source text");
    for (const auto& p : s.posts) CHECK(p.followers == 1);
    CHECK(parse_import_format("twitter16") == ImportFormat::Twitter);
    CHECK_THROWS_AS(parse_import_format("pheme"), Error);
    fs::remove_all(dir);
  }
}
