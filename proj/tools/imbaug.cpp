#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "imbaug/app/config.hpp"
#include "imbaug/app/run.hpp"
#include "imbaug/app/synthbench.hpp"
#include "imbaug/data/csv.hpp"
#include "imbaug/error.hpp"
#include "imbaug/log.hpp"
#include "imbaug/nn/checkpoint.hpp"
#include "imbaug/pipeline/run_store.hpp"

namespace fs = std::filesystem;
using namespace imbaug;

namespace {

struct Flags {
  std::string config_file;
  std::string data;
  std::string out;
  std::string method;
  std::string run_name;
  std::string workdir;
  std::vector<std::string> sets;
  std::uint64_t seed = 0;
  bool seed_given = false;
  bool verbose = false;
};

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorKind::io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void dump(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), ErrorKind::io, "cannot write " + path.string());
  out << text;
}

// defaults < IMBAUG_OUT_ROOT < workdir snapshot < --config < --set < explicit flags
app::RunConfig resolve(const Flags& f, bool use_snapshot) {
  app::RunConfig cfg;
  if (const char* root = std::getenv("IMBAUG_OUT_ROOT"); root && *root) cfg.out = root;
  if (use_snapshot && !f.workdir.empty() && fs::exists(fs::path(f.workdir) / "config.txt"))
    cfg = app::load_config_file(fs::path(f.workdir) / "config.txt", cfg);
  if (!f.config_file.empty()) cfg = app::load_config_file(f.config_file, cfg);
  std::map<std::string, std::string> kv;
  for (const auto& s : f.sets) {
    const auto eq = s.find('=');
    require(eq != std::string::npos, ErrorKind::config, "--set expects key=value, got '" + s + "'");
    kv[std::string(data::trim(std::string_view(s).substr(0, eq)))] =
        std::string(data::trim(std::string_view(s).substr(eq + 1)));
  }
  cfg = app::config_from_kv(kv, cfg);
  if (!f.data.empty()) cfg.data = f.data;
  if (!f.out.empty()) cfg.out = f.out;
  if (!f.method.empty()) cfg.method = pipeline::parse_method(f.method);
  if (!f.run_name.empty()) cfg.run_name = f.run_name;
  if (f.seed_given) cfg.seed = f.seed;
  cfg.validate();
  return cfg;
}

fs::path workdir_of(const Flags& f, const app::RunConfig& cfg) {
  return f.workdir.empty() ? cfg.run_dir() : fs::path(f.workdir);
}

pipeline::AugmentOutput augment_stage(const app::RunConfig& cfg, const fs::path& dir,
                                      const app::Prepared& prepared, bool train_only) {
  const auto levels = app::augmentation_levels(cfg, prepared);
  auto acfg = cfg.augment_config();
  acfg.train_only = train_only;
  if (fs::exists(dir / "san.ckpt"))
    acfg.san_model = san::SanModel::from_checkpoint(nn::load_checkpoint(dir / "san.ckpt"));
  if (!train_only) {
    for (const auto& e : fs::directory_iterator(dir)) {
      const auto name = e.path().filename().string();
      if (!name.starts_with("scgan_") || !name.ends_with(".ckpt")) continue;
      auto m = gan::ScganModel::from_checkpoint(nn::load_checkpoint(e.path()));
      acfg.scgan_models.emplace(m.class_name, std::move(m));
    }
  }
  return pipeline::build_augmented(prepared.train, levels, acfg);
}

int cmd_run_all(const Flags& f) {
  const auto cfg = resolve(f, false);
  const auto outcome = app::run_all(cfg);
  std::cout << outcome.stages.text() << '\n' << eval::summary_text(outcome.report);
  std::cout << "run directory: " << outcome.dir.string() << '\n';
  return 0;
}

int cmd_preprocess(const Flags& f) {
  const auto cfg = resolve(f, false);
  const auto dir = workdir_of(f, cfg);
  const auto prepared = app::prepare(cfg);
  app::save_prepared(dir, prepared);
  dump(dir / "config.txt", pipeline::format_key_values(app::config_to_kv(cfg)));
  std::cout << prepared.ingest.summary() << '\n'
            << "train rows " << prepared.train.rows() << ", test rows " << prepared.test.rows()
            << "\nwritten to " << dir.string() << '\n';
  return 0;
}

int cmd_levels(const Flags& f, const std::string& input) {
  const auto cfg = resolve(f, true);
  level::LevelPartition levels;
  fs::path dir;
  if (!input.empty()) {
    auto c = cfg;
    c.data = input;
    const auto loaded = app::load_input(c);
    levels = level::level_classes(loaded.dataset.counts(), loaded.dataset.label_names, cfg.thresholds);
    if (!f.workdir.empty()) dir = f.workdir;
  } else {
    dir = workdir_of(f, cfg);
    levels = app::augmentation_levels(cfg, app::load_prepared(dir));
  }
  std::cout << level::level_report_text(levels);
  if (!dir.empty()) {
    fs::create_directories(dir);
    dump(dir / "levels.txt", level::level_report_text(levels));
    level::write_level_report_csv(dir / "levels.csv", levels);
  }
  return 0;
}

int cmd_train_models(const Flags& f, bool gan_too) {
  const auto cfg = resolve(f, true);
  const auto dir = workdir_of(f, cfg);
  const auto prepared = app::load_prepared(dir);
  if (!gan_too) {
    auto c = cfg;
    c.method = pipeline::Method::s2cgan;
    const auto trained =
        pipeline::fit_san(prepared.train, app::augmentation_levels(c, prepared), c.augment_config());
    nn::save_checkpoint(dir / "san.ckpt", trained.model.to_checkpoint());
    std::string csv = "epoch,loss\n";
    for (std::size_t i = 0; i < trained.epoch_loss.size(); ++i)
      csv += std::to_string(i + 1) + "," + data::format_double(trained.epoch_loss[i]) + "\n";
    dump(dir / "san_loss.csv", csv);
    std::cout << "SAN trained for " << trained.epoch_loss.size() << " epochs -> "
              << (dir / "san.ckpt").string() << '\n';
    return 0;
  }
  require(fs::exists(dir / "san.ckpt"), ErrorKind::state, "train-scgan needs san.ckpt (run train-san first)");
  auto c = cfg;
  c.method = pipeline::Method::s2cgan;
  const auto out = augment_stage(c, dir, prepared, true);
  for (const auto& m : out.scgan) {
    nn::save_checkpoint(dir / ("scgan_" + pipeline::file_stem(m.class_name) + ".ckpt"), m.to_checkpoint());
    std::cout << "GAN for class '" << m.class_name << "' trained\n";
  }
  for (const auto& [name, hist] : out.report.scgan_loss) {
    std::string csv = "epoch,discriminator,generator\n";
    for (std::size_t i = 0; i < hist.discriminator.size(); ++i)
      csv += std::to_string(i + 1) + "," + data::format_double(hist.discriminator[i]) + "," +
             data::format_double(hist.generator[i]) + "\n";
    dump(dir / ("scgan_loss_" + pipeline::file_stem(name) + ".csv"), csv);
  }
  return 0;
}

int cmd_augment(const Flags& f) {
  const auto cfg = resolve(f, true);
  const auto dir = workdir_of(f, cfg);
  const auto prepared = app::load_prepared(dir);
  try {
    const auto out = augment_stage(cfg, dir, prepared, false);
    data::write_dataset(dir / "augmented.csv", out.augmented.data, "Label",
                        out.augmented.provenance_strings());
    dump(dir / "stage_report.txt", out.report.text());
    std::cout << out.report.text() << "augmented rows: " << out.augmented.data.rows() << '\n';
  } catch (const pipeline::PipelineError& e) {
    data::write_dataset(dir / "augmented_partial.csv", e.partial().data, "Label",
                        e.partial().provenance_strings());
    throw;
  }
  return 0;
}

int cmd_train_clf(const Flags& f) {
  const auto cfg = resolve(f, true);
  const auto dir = workdir_of(f, cfg);
  const auto prepared = app::load_prepared(dir);
  data::Dataset train = prepared.train;
  if (fs::exists(dir / "augmented.csv"))
    train = pipeline::load_augmented(dir / "augmented.csv", prepared.full_levels.names).data;
  else
    log::warn("no augmented.csv in " + dir.string() + "; training on the original split");
  const auto trained = pipeline::train_classifier(train, cfg.classifier_config());
  nn::save_checkpoint(dir / "classifier.ckpt", trained.model.to_checkpoint());
  std::string csv = "epoch,loss\n";
  for (std::size_t i = 0; i < trained.epoch_loss.size(); ++i)
    csv += std::to_string(i + 1) + "," + data::format_double(trained.epoch_loss[i]) + "\n";
  dump(dir / "classifier_loss.csv", csv);
  std::cout << "classifier trained on " << train.rows() << " rows for " << trained.epoch_loss.size()
            << " epochs\n";
  return 0;
}

int cmd_eval(const Flags& f) {
  const auto cfg = resolve(f, true);
  const auto dir = workdir_of(f, cfg);
  const auto prepared = app::load_prepared(dir);
  const auto model =
      pipeline::ClassifierModel::from_checkpoint(nn::load_checkpoint(dir / "classifier.ckpt"));
  const auto report = app::evaluate_classifier(model, prepared.test, prepared.test_fingerprint,
                                               std::string(pipeline::to_string(cfg.method)), cfg.beta);
  eval::write_report(dir / "metrics", report);
  dump(dir / "summary.txt", eval::summary_text(report));
  std::cout << eval::summary_text(report);
  return 0;
}

int cmd_compare(const std::vector<std::string>& runs, const std::string& out) {
  std::vector<fs::path> dirs(runs.begin(), runs.end());
  const auto table = app::compare_runs(dirs);
  std::cout << eval::delta_text(table);
  if (!out.empty()) {
    fs::create_directories(out);
    eval::write_delta_csv(fs::path(out) / "delta.csv", table);
    dump(fs::path(out) / "delta.txt", eval::delta_text(table));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App cli{"Imbalanced intrusion-detection data augmentation"};
  cli.require_subcommand(1);
  Flags f;
  cli.add_option("--config", f.config_file, "key = value configuration file");
  cli.add_option("--seed", f.seed, "master seed")->each([&](const std::string&) { f.seed_given = true; });
  cli.add_option("--out", f.out, "output root (default: $IMBAUG_OUT_ROOT or ./runs)");
  cli.add_option("--method", f.method, "baseline | ros | smote | s2cgan");
  cli.add_option("--data", f.data, "input CSV, directory of CSVs, or comma-separated list");
  cli.add_option("--run-name", f.run_name, "run directory name under --out");
  cli.add_option("--workdir", f.workdir, "run directory for stage commands (default: <out>/<run-name>)");
  cli.add_option("--set", f.sets, "override a config key (key=value), repeatable");
  cli.add_flag("-v,--verbose", f.verbose, "print progress messages");

  auto* run_all = cli.add_subcommand("run-all", "every stage end to end");
  auto* preprocess = cli.add_subcommand("preprocess", "load, map labels, split, normalize");
  auto* levels = cli.add_subcommand("levels", "imbalance ratios and ample/scarce/rare levels");
  std::string levels_input;
  levels->add_option("input", levels_input, "CSV to level (default: the prepared training split)");
  auto* train_san = cli.add_subcommand("train-san", "train the Siamese autoencoder");
  auto* train_scgan = cli.add_subcommand("train-scgan", "train one conditional GAN per scarce class");
  auto* augment = cli.add_subcommand("augment", "build the augmented training set");
  auto* train_clf = cli.add_subcommand("train-clf", "train the classifier");
  auto* evaluate = cli.add_subcommand("eval", "score the classifier on the held-out split");
  auto* compare = cli.add_subcommand("compare", "per-class deltas of several runs against the baseline");
  std::vector<std::string> compare_runs;
  std::string compare_out;
  compare->add_option("runs", compare_runs, "run directories")->required();
  compare->add_option("-o,--output", compare_out, "directory for delta.csv / delta.txt");

  auto* synth = cli.add_subcommand("synthbench", "write a synthetic imbalanced dataset");
  app::SynthSpec spec;
  std::string spec_file, synth_out = "synthbench.csv", counts_text, names_text;
  synth->add_option("--spec", spec_file, "key = value spec file");
  synth->add_option("--counts", counts_text, "per-class sample counts, e.g. 20000,150,12");
  synth->add_option("--names", names_text, "per-class names");
  synth->add_option("--dim", spec.dim, "feature count");
  synth->add_option("--components", spec.components, "Gaussian components per class");
  synth->add_option("--noise", spec.noise, "per-feature standard deviation");
  synth->add_option("--separation", spec.separation, "minority offset from the majority components");
  synth->add_option("-o,--output", synth_out, "output CSV");

  for (auto* sub : cli.get_subcommands({})) sub->fallthrough();

  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return cli.exit(e);
  }
  log::set_verbose(f.verbose);

  try {
    if (*run_all) return cmd_run_all(f);
    if (*preprocess) return cmd_preprocess(f);
    if (*levels) return cmd_levels(f, levels_input);
    if (*train_san) return cmd_train_models(f, false);
    if (*train_scgan) return cmd_train_models(f, true);
    if (*augment) return cmd_augment(f);
    if (*train_clf) return cmd_train_clf(f);
    if (*evaluate) return cmd_eval(f);
    if (*compare) return cmd_compare(compare_runs, compare_out);
    if (*synth) {
      if (!spec_file.empty()) {
        const auto dim = spec.dim;
        spec = app::synth_spec_from_text(slurp(spec_file), spec);
        if (synth->count("--dim")) spec.dim = dim;
      }
      std::string kv;
      if (!counts_text.empty()) kv += "counts = " + counts_text + "\n";
      if (!names_text.empty()) kv += "names = " + names_text + "\n";
      spec = app::synth_spec_from_text(kv, spec);
      if (f.seed_given) spec.seed = f.seed;
      const auto ds = app::synthesize_benchmark(spec);
      data::write_dataset(synth_out, ds);
      std::cout << "wrote " << ds.rows() << " rows to " << synth_out << '\n';
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "imbaug: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "imbaug: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
