#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "cascadefuse/cli.hpp"
#include "cascadefuse/dataset.hpp"
#include "json.hpp"

using namespace cascadefuse;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_command(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("usage errors and help") {
    CHECK(run({}).code == 2);
    CHECK(run({"frobnicate"}).code == 2);
    CHECK(run({"validate"}).code == 2);
    CHECK(run({"--threads", "0", "validate", "--input", "x"}).code == 2);
    const auto help = run({"--help"});
    CHECK(help.code == 0);
    CHECK(help.out.find("generate-synthetic") != std::string::npos);
    CHECK(run({"validate", "--input", "/nonexistent/file.jsonl"}).code == 1);
  }

  TEST_CASE("pipeline round trip") {
    const fs::path dir = fs::temp_directory_path() / ("cascadefuse_cli_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    const std::string data = (dir / "syn.jsonl").string();

    auto r = run({"--quiet", "--seed", "5", "generate-synthetic", "--n-per-class", "6", "--out", data});
    REQUIRE(r.code == 0);
    const auto m = load_dataset(data);
    CHECK(m.stories.size() == 12);
    CHECK(m.has_split());

    r = run({"validate", "--input", data});
    CHECK(r.code == 0);
    CHECK(r.out.find("12") != std::string::npos);

    const std::string csv = (dir / "s.csv").string();
    r = run({"infectiousness", "--input", data, "--grid-hours", "5", "--out", csv});
    CHECK(r.code == 0);
    const std::string text = slurp(csv);
    CHECK(text.rfind("story_id,label,hour,s_h", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 1 + 12 * 5);

    const std::vector<std::string> small{"--epochs", "2", "--hidden", "4", "--hidden-s", "4", "--vocab-size", "20",
                                         "--seq-len", "4"};
    const std::string ckpt = (dir / "model.ckpt").string();
    std::vector<std::string> train{"--quiet", "train", "--input", data, "--out", ckpt};
    train.insert(train.end(), small.begin(), small.end());
    r = run(train);
    REQUIRE_MESSAGE(r.code == 0, r.err);
    CHECK(fs::exists(ckpt + ".history.json"));
    const auto report = nlohmann::json::parse(slurp(ckpt + ".report.json"));
    CHECK(report.contains("test"));

    const std::string eval_out = (dir / "eval.json").string();
    r = run({"eval", "--input", data, "--model", ckpt, "--split", "test", "--out", eval_out});
    REQUIRE_MESSAGE(r.code == 0, r.err);
    const auto eval = nlohmann::json::parse(slurp(eval_out));
    CHECK(eval.at("accuracy").get<double>() == report.at("test").at("accuracy").get<double>());

    r = run({"eval", "--input", data, "--model", ckpt, "--split", "sideways"});
    CHECK(r.code == 2);

    const std::string sim = (dir / "sim.jsonl").string();
    r = run({"simulate", "--profile", "const:0.002", "--followers", "const:20", "--horizon-hours", "3", "--count",
             "3", "--out", sim});
    CHECK(r.code == 0);
    CHECK(load_dataset(sim).stories.size() == 3);
    CHECK(run({"simulate", "--profile", "wobbly", "--out", sim}).code == 2);

    const std::string sweep = (dir / "sweep.csv").string();
    std::vector<std::string> sweep_args{"--quiet", "sweep", "--input", data, "--days", "0,1", "--out", sweep};
    sweep_args.insert(sweep_args.end(), small.begin(), small.end());
    r = run(sweep_args);
    REQUIRE_MESSAGE(r.code == 0, r.err);
    const auto sweep_text = slurp(sweep);
    CHECK(sweep_text.rfind("days,variant,temporal_len,accuracy", 0) == 0);
    CHECK(sweep_text.find("\n0,no_time,0,") != std::string::npos);
    CHECK(sweep_text.find("\n1,full,23,") != std::string::npos);
    fs::remove_all(dir);
  }
}
