#include "cascadefuse/cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "cascadefuse/dataset.hpp"
#include "cascadefuse/error.hpp"
#include "cascadefuse/experiment.hpp"
#include "cascadefuse/hawkes.hpp"
#include "cascadefuse/import.hpp"
#include "cascadefuse/log.hpp"
#include "cascadefuse/parallel.hpp"

namespace cascadefuse {

using nlohmann::json;

namespace {

struct Common {
  std::optional<int> threads;
  std::uint64_t seed = 1;
  bool quiet = false;
};

struct ModelFlags {
  std::string config_path;
  std::string variant;
  std::optional<std::size_t> epochs, patience, hidden, hidden_s, f2_divisor, seq_len, grid_hours, vocab_size, batch_size;
  std::optional<double> dropout;
  std::string gate_form;
  bool grid_search = false;
  std::size_t grid_epochs = 50;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON file mirroring the model configuration")->check(CLI::ExistingFile);
    cmd->add_option("--variant", variant, "full, no_cim, no_time or freq");
    cmd->add_option("--epochs", epochs, "maximum training epochs");
    cmd->add_option("--patience", patience, "early-stopping patience in epochs");
    cmd->add_option("--hidden", hidden, "linguistic/user GRU width");
    cmd->add_option("--hidden-s", hidden_s, "temporal GRU width");
    cmd->add_option("--f2-divisor", f2_divisor, "second dense layer width = concat width / divisor");
    cmd->add_option("--seq-len", seq_len, "posts read per story");
    cmd->add_option("--grid-hours", grid_hours, "temporal grid length in hours");
    cmd->add_option("--vocab-size", vocab_size, "vocabulary size K");
    cmd->add_option("--batch-size", batch_size, "stories per update");
    cmd->add_option("--dropout", dropout, "dropout rate");
    cmd->add_option("--gate-form", gate_form, "multiplicative or standard");
    cmd->add_flag("--grid-search", grid_search, "select dimensions on the validation split first");
    cmd->add_option("--grid-epochs", grid_epochs, "epoch cap per grid cell");
  }

  std::pair<FeatureConfig, ModelConfig> resolve(std::uint64_t seed) const {
    FeatureConfig fc;
    ModelConfig mc;
    mc.seed = seed;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      json doc;
      try {
        doc = json::parse(in);
      } catch (const json::exception& e) {
        throw Error(ErrorCode::ParseError, config_path + ": " + e.what());
      }
      mc = ModelConfig::from_json(doc, mc);
      if (doc.contains("seq_len")) fc.seq_len = doc.at("seq_len").get<std::size_t>();
      if (doc.contains("grid_hours")) fc.grid_hours = hourly_grid(doc.at("grid_hours").get<std::size_t>());
      if (doc.contains("vocab_size")) fc.vocab_size = doc.at("vocab_size").get<std::size_t>();
      if (doc.contains("ranking"))
        fc.ranking = doc.at("ranking").get<std::string>() == "sum" ? TermRanking::SumTfIdf : TermRanking::MaxTfIdf;
    }
    if (!variant.empty()) mc.variant = parse_variant(variant);
    if (epochs) mc.max_epochs = *epochs;
    if (patience) mc.patience = *patience;
    if (hidden) mc.hidden_l = mc.hidden_u = *hidden;
    if (hidden_s) mc.hidden_s = *hidden_s;
    if (f2_divisor) mc.f2_divisor = *f2_divisor;
    if (seq_len) fc.seq_len = *seq_len;
    if (grid_hours) fc.grid_hours = hourly_grid(*grid_hours);
    if (vocab_size) fc.vocab_size = *vocab_size;
    if (batch_size) mc.batch_size = *batch_size;
    if (dropout) mc.dropout = *dropout;
    if (!gate_form.empty()) {
      if (gate_form != "multiplicative" && gate_form != "standard")
        throw Error(ErrorCode::UsageError, "--gate-form must be multiplicative or standard");
      mc.gate_form = gate_form == "multiplicative" ? nn::GateForm::Multiplicative : nn::GateForm::Standard;
    }
    mc.seq_len = fc.seq_len;
    return {fc, mc};
  }

  ExperimentOptions options(const Common& common, std::ostream& err) const {
    ExperimentOptions o;
    if (grid_search) {
      GridSpace space;
      space.cell_epoch_cap = grid_epochs;
      o.grid = space;
    }
    if (!common.quiet) o.progress = [&err](const std::string& line) { err << line << '\n'; };
    return o;
  }
};

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');)
    if (!item.empty()) out.push_back(item);
  return out;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write '" + path + "'");
  return out;
}

void write_json(const json& doc, const std::string& path, std::ostream& fallback) {
  if (path.empty() || path == "-") {
    fallback << doc.dump(2) << '\n';
    return;
  }
  auto out = open_out(path);
  out << doc.dump(2) << '\n';
}

/// Loads a dataset and assigns the default stratified split when it has none.
DatasetManifest load_split(const std::string& path, std::uint64_t seed) {
  auto m = load_dataset(path);
  if (!m.has_split()) m = split_dataset(std::move(m), SplitOptions{0.25, 0.15, seed, true});
  return m;
}

InfectiousnessProfile parse_profile(const std::string& spec, const SyntheticSpec& synthetic) {
  if (spec.rfind("const:", 0) == 0) return InfectiousnessProfile::constant(std::stod(spec.substr(6)));
  if (spec == "synthetic-real")
    return InfectiousnessProfile::tabulate([&](double h) { return synthetic.real_profile(h, synthetic.base_rate); },
                                           synthetic.horizon_hours, synthetic.step_hours);
  if (spec == "synthetic-fake")
    return InfectiousnessProfile::tabulate(
        [&](double h) { return synthetic.fake_profile(h, synthetic.base_rate, synthetic.bump_hour); },
        synthetic.horizon_hours, synthetic.step_hours);
  if (spec.rfind("csv:", 0) == 0) {
    std::ifstream in(spec.substr(4));
    if (!in) throw Error(ErrorCode::IoError, "cannot open profile '" + spec.substr(4) + "'");
    std::vector<double> hours, values;
    std::string line;
    for (std::size_t n = 1; std::getline(in, line); ++n) {
      const auto comma = line.find(',');
      if (comma == std::string::npos) continue;
      try {
        hours.push_back(std::stod(line.substr(0, comma)));
        values.push_back(std::stod(line.substr(comma + 1)));
      } catch (const std::exception&) {
        if (n == 1) continue;  // header
        throw ParseError(n, "expected 'hour,value'");
      }
    }
    return InfectiousnessProfile::piecewise_linear(std::move(hours), std::move(values));
  }
  throw Error(ErrorCode::UsageError,
              "bad --profile '" + spec + "' (const:V, csv:PATH, synthetic-real or synthetic-fake)");
}

json checkpoint_manifest(const ExperimentResult& r, LabelSet label_set) {
  return {{"model", r.model.to_json()},
          {"featurizer", r.featurizer.to_json()},
          {"classes", class_count(label_set)},
          {"best_epoch", r.history.best_epoch}};
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multi-modal fake news detection from cascades, text and users", "cascadefuse"};
  app.require_subcommand(1, 1);
  app.fallthrough();
  Common common;
  app.add_option("--threads", common.threads, "worker threads (fallback: CASCADEFUSE_THREADS)");
  app.add_option("--seed", common.seed, "base seed for every random stream");
  app.add_flag("--quiet", common.quiet, "suppress progress and warnings");

  std::string input, output;

  auto* validate = app.add_subcommand("validate", "check a JSONL dataset and summarize it");
  validate->add_option("--input", input)->required();

  auto* simulate = app.add_subcommand("simulate", "simulate cascades from an infectiousness profile");
  std::string profile_spec = "synthetic-real", followers_spec = "lognormal:30:1", label_text = "true";
  std::optional<double> seed_followers;
  double horizon_hours = 48;
  std::size_t count = 1;
  simulate->add_option("--profile", profile_spec, "const:V, csv:PATH, synthetic-real or synthetic-fake");
  simulate->add_option("--followers", followers_spec, "const:N, lognormal:MEDIAN:SIGMA or uniform:LO:HI");
  simulate->add_option("--seed-followers", seed_followers, "audience of the source post");
  simulate->add_option("--horizon-hours", horizon_hours);
  simulate->add_option("--count", count);
  simulate->add_option("--label", label_text);
  simulate->add_option("--out", output)->required();

  auto* generate = app.add_subcommand("generate-synthetic", "write a labelled synthetic dataset");
  std::size_t n_per_class = 100;
  std::string spec_path;
  std::optional<double> text_overlap;
  bool no_split = false;
  generate->add_option("--n-per-class", n_per_class);
  generate->add_option("--spec", spec_path, "generator settings (JSON)")->check(CLI::ExistingFile);
  generate->add_option("--text-overlap", text_overlap, "1 = texts carry no class signal");
  generate->add_flag("--no-split", no_split, "leave the split unassigned");
  generate->add_option("--out", output)->required();

  auto* series = app.add_subcommand("infectiousness", "per-story hourly infectiousness as CSV");
  std::size_t grid_hours = 47;
  std::string kind = "infectiousness";
  series->add_option("--input", input)->required();
  series->add_option("--grid-hours", grid_hours);
  series->add_option("--kind", kind, "infectiousness or counts");
  series->add_option("--out", output);

  ModelFlags flags;
  auto* featurize = app.add_subcommand("featurize", "fit features on the train split and dump bundles");
  featurize->add_option("--input", input)->required();
  featurize->add_option("--out", output);
  flags.attach(featurize);

  auto* train_cmd = app.add_subcommand("train", "train a model and write a checkpoint");
  std::string history_path, report_path;
  train_cmd->add_option("--input", input)->required();
  train_cmd->add_option("--out", output, "checkpoint path")->required();
  train_cmd->add_option("--history", history_path, "history JSON (default: <out>.history.json)");
  train_cmd->add_option("--report", report_path, "validation/test report JSON (default: <out>.report.json)");
  flags.attach(train_cmd);

  auto* eval_cmd = app.add_subcommand("eval", "score a checkpoint on one split");
  std::string model_path, split_name = "test";
  eval_cmd->add_option("--input", input)->required();
  eval_cmd->add_option("--model", model_path)->required();
  eval_cmd->add_option("--split", split_name, "train, val, test or all");
  eval_cmd->add_option("--out", output);

  auto* ablate_cmd = app.add_subcommand("ablate", "compare model variants on one split");
  std::string variants_text = "full,no_cim,no_time,freq";
  ablate_cmd->add_option("--input", input)->required();
  ablate_cmd->add_option("--variants", variants_text);
  ablate_cmd->add_option("--out", output);
  flags.attach(ablate_cmd);

  auto* sweep_cmd = app.add_subcommand("sweep", "accuracy against the temporal observation window");
  std::string days_text = "0,1,2,3,4,5,6";
  sweep_cmd->add_option("--input", input)->required();
  sweep_cmd->add_option("--days", days_text);
  sweep_cmd->add_option("--out", output);
  flags.attach(sweep_cmd);

  auto* import_cmd = app.add_subcommand("import", "convert a public release layout to JSONL");
  std::string format, root;
  bool import_split = false;
  import_cmd->add_option("--format", format, "weibo, twitter15 or twitter16")->required();
  import_cmd->add_option("--dir", root)->required()->check(CLI::ExistingDirectory);
  import_cmd->add_flag("--split", import_split, "assign the default stratified split");
  import_cmd->add_option("--out", output)->required();

  std::vector<std::string> argv_storage{"cascadefuse"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_storage) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n' << app.help();
    return 2;
  }

  try {
    parallel::set_threads(parallel::resolve_threads(common.threads));
    if (common.quiet) set_warnings_enabled(false);

    if (*validate) {
      const auto m = load_dataset(input);
      std::size_t posts = 0;
      std::vector<std::size_t> per_class(class_count(m.label_set), 0);
      for (const auto& s : m.stories) {
        posts += s.posts.size();
        ++per_class[label_index(s.label)];
      }
      out << m.stories.size() << " stories, " << posts << " posts, label set " << to_string(m.label_set) << '\n';
      for (std::size_t k = 0; k < per_class.size(); ++k)
        out << "  " << to_string(static_cast<Label>(k)) << ": " << per_class[k] << '\n';
      if (m.has_split())
        out << "  split: train " << m.count(Split::Train) << ", val " << m.count(Split::Val) << ", test "
            << m.count(Split::Test) << '\n';
    } else if (*simulate) {
      const auto label = parse_label(label_text);
      if (!label) throw Error(ErrorCode::UsageError, "unknown --label '" + label_text + "'");
      const auto profile = parse_profile(profile_spec, SyntheticSpec{});
      SimulationOptions options;
      options.seed_followers = seed_followers;
      auto stories = parallel::simulate_omp(profile, FollowerSampler::parse(followers_spec),
                                            horizon_hours * kSecondsPerHour, common.seed, count, options);
      DatasetManifest m;
      m.label_set = contains(LabelSet::Binary, *label) ? LabelSet::Binary : LabelSet::FourClass;
      for (auto& s : stories) {
        s.label = *label;
        m.stories.push_back(validate_story(std::move(s), m.label_set));
      }
      save_dataset(m, output);
      out << "wrote " << m.stories.size() << " cascades to " << output << '\n';
    } else if (*generate) {
      SyntheticSpec spec;
      if (!spec_path.empty()) {
        std::ifstream in(spec_path);
        try {
          spec = SyntheticSpec::from_json(json::parse(in));
        } catch (const json::exception& e) {
          throw Error(ErrorCode::ParseError, spec_path + ": " + e.what());
        }
      }
      if (text_overlap) spec.text_overlap = *text_overlap;
      auto m = generate_synthetic(n_per_class, common.seed, spec);
      if (!no_split) m = split_dataset(std::move(m), SplitOptions{0.25, 0.15, common.seed, true});
      save_dataset(m, output);
      out << "wrote " << m.stories.size() << " stories to " << output << '\n';
    } else if (*series) {
      if (kind != "infectiousness" && kind != "counts")
        throw Error(ErrorCode::UsageError, "--kind must be infectiousness or counts");
      const auto m = load_dataset(input);
      const auto grid = hourly_grid(grid_hours);
      std::vector<std::vector<double>> values(m.stories.size());
      if (kind == "counts") {
        for (std::size_t i = 0; i < m.stories.size(); ++i) values[i] = post_count_series(m.stories[i], grid);
      } else {
        const auto s = parallel::infectiousness_omp(m.stories, grid);
        for (std::size_t i = 0; i < s.size(); ++i) values[i] = s[i].values;
      }
      std::ofstream file;
      if (!output.empty()) file = open_out(output);
      std::ostream& csv = output.empty() ? out : file;
      csv.precision(17);
      csv << "story_id,label,hour," << (kind == "counts" ? "posts" : "s_h") << '\n';
      for (std::size_t i = 0; i < m.stories.size(); ++i)
        for (std::size_t k = 0; k < grid.size(); ++k)
          csv << m.stories[i].id << ',' << to_string(m.stories[i].label) << ',' << grid[k] << ',' << values[i][k] << '\n';
    } else if (*featurize) {
      const auto m = load_split(input, common.seed);
      const auto [fc, mc] = flags.resolve(common.seed);
      const auto featurizer = Featurizer::fit(m.subset(Split::Train), feature_config_for(fc, mc.variant));
      const auto bundles = parallel::featurize_omp(featurizer, m.stories);
      json rows = json::array();
      for (const auto& b : bundles) {
        json ling = json::array();
        for (const auto& l : b.linguistic) ling.push_back({{"index", l.index}, {"value", l.value}});
        json row{{"id", b.story_id}, {"label", std::string(to_string(b.label))}, {"mask", b.mask},
                 {"linguistic", ling}, {"users", b.users}};
        if (b.temporal) row["temporal"] = *b.temporal;
        rows.push_back(std::move(row));
      }
      write_json({{"featurizer", featurizer.to_json()}, {"bundles", rows}}, output, out);
    } else if (*train_cmd) {
      const auto m = load_split(input, common.seed);
      const auto [fc, mc] = flags.resolve(common.seed);
      const auto r = run_experiment(m, fc, mc, flags.options(common, err));
      nn::save_checkpoint(r.params, output, checkpoint_manifest(r, m.label_set));
      write_json(r.history.to_json(), history_path.empty() ? output + ".history.json" : history_path, out);
      write_json(r.report_json(), report_path.empty() ? output + ".report.json" : report_path, out);
      out << "best epoch " << r.history.best_epoch << ", val acc " << r.validation.accuracy << ", test acc "
          << r.test.accuracy << '\n';
    } else if (*eval_cmd) {
      json manifest;
      const auto params = nn::load_checkpoint(model_path, &manifest);
      const auto featurizer = Featurizer::from_json(manifest.at("featurizer"));
      const auto cfg = ModelConfig::from_json(manifest.at("model"));
      const FusionModel model(cfg);
      std::vector<NewsStory> stories;
      if (split_name == "all") {
        stories = load_dataset(input).stories;
      } else {
        const auto which = parse_split(split_name);
        if (!which) throw Error(ErrorCode::UsageError, "--split must be train, val, test or all");
        stories = load_split(input, common.seed).subset(*which);
      }
      const auto report = evaluate(model, params, parallel::featurize_omp(featurizer, stories));
      write_json(report.to_json(), output, out);
    } else if (*ablate_cmd) {
      const auto m = load_split(input, common.seed);
      const auto [fc, mc] = flags.resolve(common.seed);
      std::vector<Variant> variants;
      for (const auto& v : split_list(variants_text)) variants.push_back(parse_variant(v));
      const auto rows = ablate(m, fc, mc, variants, flags.options(common, err));
      std::ofstream file;
      if (!output.empty()) file = open_out(output);
      std::ostream& csv = output.empty() ? out : file;
      csv << "variant,accuracy";
      for (std::size_t k = 0; k < class_count(m.label_set); ++k) csv << ",f1_" << to_string(static_cast<Label>(k));
      csv << '\n';
      for (const auto& row : rows) {
        csv << to_string(row.variant) << ',' << row.test.accuracy;
        for (double f : row.test.per_class_f1) csv << ',' << f;
        csv << '\n';
      }
    } else if (*sweep_cmd) {
      const auto m = load_split(input, common.seed);
      const auto [fc, mc] = flags.resolve(common.seed);
      std::vector<std::size_t> days;
      for (const auto& d : split_list(days_text)) {
        try {
          days.push_back(static_cast<std::size_t>(std::stoul(d)));
        } catch (const std::exception&) {
          throw Error(ErrorCode::UsageError, "--days takes a comma-separated list of integers");
        }
      }
      const auto points = timeframe_sweep(m, days, fc, mc, flags.options(common, err));
      std::ofstream file;
      if (!output.empty()) file = open_out(output);
      std::ostream& csv = output.empty() ? out : file;
      csv << "days,variant,temporal_len,accuracy\n";
      for (const auto& p : points)
        csv << p.days << ',' << to_string(p.variant) << ',' << p.temporal_len << ',' << p.test.accuracy << '\n';
    } else if (*import_cmd) {
      auto m = import_dataset(parse_import_format(format), root);
      if (import_split) m = split_dataset(std::move(m), SplitOptions{0.25, 0.15, common.seed, true});
      save_dataset(m, output);
      out << "imported " << m.stories.size() << " stories (" << to_string(m.label_set) << ") to " << output << '\n';
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.code() == ErrorCode::UsageError ? 2 : 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

int run_command(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run_command(args, std::cout, std::cerr);
}

}  // namespace cascadefuse
