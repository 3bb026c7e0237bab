#include "imbaug/pipeline/run_store.hpp"

#include <fstream>
#include <sstream>

#include "imbaug/data/csv.hpp"
#include "imbaug/error.hpp"

namespace imbaug::pipeline {
namespace fs = std::filesystem;

namespace {

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), ErrorKind::io, "cannot write " + path.string());
  out << text;
  require(out.good(), ErrorKind::io, "write failed for " + path.string());
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorKind::io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::vector<std::string>> read_csv_rows(const fs::path& path, const std::string& header) {
  std::istringstream in(read_text(path));
  std::string line;
  require(static_cast<bool>(std::getline(in, line)) && data::trim(line) == header, ErrorKind::format,
          "unexpected header in " + path.string());
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (data::trim(line).empty()) continue;
    auto fields = data::split_csv_line(line);
    std::vector<std::string> row(fields.begin(), fields.end());
    rows.push_back(std::move(row));
  }
  return rows;
}

double number(const std::string& s, const fs::path& path) {
  const auto v = data::parse_double(s);
  require(v.has_value(), ErrorKind::format, "bad number '" + s + "' in " + path.string());
  return *v;
}

std::string loss_csv(const std::vector<double>& loss) {
  std::string out = "epoch,loss\n";
  for (std::size_t i = 0; i < loss.size(); ++i)
    out += std::to_string(i + 1) + "," + data::format_double(loss[i]) + "\n";
  return out;
}

std::vector<double> read_loss_csv(const fs::path& path) {
  std::vector<double> loss;
  for (const auto& r : read_csv_rows(path, "epoch,loss")) {
    require(r.size() == 2, ErrorKind::format, "bad row in " + path.string());
    loss.push_back(number(r[1], path));
  }
  return loss;
}

}  // namespace

std::string file_stem(const std::string& class_name) {
  std::string out;
  for (char ch : class_name) {
    const bool ok = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') || (ch >= '0' && ch <= '9') ||
                    ch == '-' || ch == '_';
    out += ok ? ch : '_';
  }
  return out.empty() ? "_" : out;
}

std::map<std::string, std::string> parse_key_values(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string uncommented = line.substr(0, line.find('#'));
    const auto body = data::trim(uncommented);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    require(eq != std::string_view::npos, ErrorKind::config,
            "line " + std::to_string(lineno) + ": expected key = value");
    const auto key = std::string(data::trim(body.substr(0, eq)));
    require(!key.empty(), ErrorKind::config, "line " + std::to_string(lineno) + ": empty key");
    kv[key] = std::string(data::trim(body.substr(eq + 1)));
  }
  return kv;
}

std::string format_key_values(const std::map<std::string, std::string>& kv) {
  std::string out;
  for (const auto& [k, v] : kv) out += k + " = " + v + "\n";
  return out;
}

AugmentedDataset load_augmented(const fs::path& path, const std::vector<std::string>& known_labels) {
  data::LoadOptions opts;
  opts.known_labels = known_labels;
  opts.drop_non_finite = false;
  auto loaded = data::load_dataset(path, opts);
  require(loaded.report.dropped() == 0, ErrorKind::format,
          "augmented file " + path.string() + " has malformed rows");

  AugmentedDataset out;
  out.data = std::move(loaded.dataset);
  std::istringstream in(read_text(path));
  std::string line;
  std::getline(in, line);
  const auto header = data::split_csv_line(line);
  require(!header.empty() && data::trim(header.back()) == "Provenance", ErrorKind::format,
          path.string() + " has no trailing Provenance column");
  while (std::getline(in, line)) {
    if (data::trim(line).empty()) continue;
    const auto fields = data::split_csv_line(line);
    out.provenance.push_back(parse_provenance(data::trim(fields.back())));
  }
  require(out.provenance.size() == out.data.rows(), ErrorKind::format,
          "provenance column length mismatch in " + path.string());
  return out;
}

void save_run(const fs::path& dir, const RunArtifacts& run) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  require(!ec, ErrorKind::io, "cannot create " + dir.string() + ": " + ec.message());
  write_text(dir / "manifest.txt", "imbaug-run " + std::to_string(kRunFormatVersion) + "\n");
  if (!run.config.empty()) write_text(dir / "config.txt", format_key_values(run.config));
  if (run.levels) {
    write_text(dir / "levels.txt", level::level_report_text(*run.levels));
    level::write_level_report_csv(dir / "levels.csv", *run.levels);
  }
  if (run.normalization) data::save_normalization(dir / "normalization.csv", *run.normalization);
  if (run.split_fingerprint) write_text(dir / "split_fingerprint.txt", std::to_string(*run.split_fingerprint) + "\n");
  if (run.san) nn::save_checkpoint(dir / "san.ckpt", run.san->to_checkpoint());
  for (const auto& m : run.scgan)
    nn::save_checkpoint(dir / ("scgan_" + file_stem(m.class_name) + ".ckpt"), m.to_checkpoint());
  if (run.classifier) nn::save_checkpoint(dir / "classifier.ckpt", run.classifier->to_checkpoint());
  if (run.augmented)
    data::write_dataset(dir / "augmented.csv", run.augmented->data, "Label",
                        run.augmented->provenance_strings());
  if (run.stage_report) {
    const auto& rep = *run.stage_report;
    write_text(dir / "stage_report.txt", rep.text());
    std::string csv = "stage,class,seconds,generated,accepted\n";
    for (const auto& e : rep.entries)
      csv += e.stage + "," + e.class_name + "," + data::format_double(e.seconds) + "," +
             std::to_string(e.generated) + "," + std::to_string(e.accepted) + "\n";
    write_text(dir / "stage_report.csv", csv);
    if (!rep.san_loss.empty()) write_text(dir / "san_loss.csv", loss_csv(rep.san_loss));
    for (const auto& [name, hist] : rep.scgan_loss) {
      std::string out = "epoch,discriminator,generator\n";
      for (std::size_t i = 0; i < hist.discriminator.size(); ++i)
        out += std::to_string(i + 1) + "," + data::format_double(hist.discriminator[i]) + "," +
               data::format_double(hist.generator[i]) + "\n";
      write_text(dir / ("scgan_loss_" + file_stem(name) + ".csv"), out);
    }
  }
  if (!run.classifier_loss.empty())
    write_text(dir / "classifier_loss.csv", loss_csv(run.classifier_loss));
}

RunArtifacts load_run(const fs::path& dir) {
  require(fs::is_directory(dir), ErrorKind::io, "run directory " + dir.string() + " does not exist");
  const auto manifest = dir / "manifest.txt";
  require(fs::exists(manifest), ErrorKind::format, dir.string() + " is not a run directory");
  const std::string expect = "imbaug-run " + std::to_string(kRunFormatVersion);
  const auto got = std::string(data::trim(read_text(manifest)));
  require(got == expect, ErrorKind::format,
          "run format '" + got + "' is not supported (expected '" + expect + "')");

  RunArtifacts run;
  if (fs::exists(dir / "config.txt")) run.config = parse_key_values(read_text(dir / "config.txt"));
  if (fs::exists(dir / "levels.csv")) run.levels = level::read_level_report_csv(dir / "levels.csv");
  if (fs::exists(dir / "normalization.csv"))
    run.normalization = data::load_normalization(dir / "normalization.csv");
  if (fs::exists(dir / "split_fingerprint.txt")) {
    const auto text = std::string(data::trim(read_text(dir / "split_fingerprint.txt")));
    try {
      run.split_fingerprint = std::stoull(text);
    } catch (const std::exception&) {
      fail(ErrorKind::format, "bad split fingerprint in " + dir.string());
    }
  }
  if (fs::exists(dir / "san.ckpt"))
    run.san = san::SanModel::from_checkpoint(nn::load_checkpoint(dir / "san.ckpt"));
  if (fs::exists(dir / "classifier.ckpt"))
    run.classifier = ClassifierModel::from_checkpoint(nn::load_checkpoint(dir / "classifier.ckpt"));

  std::vector<std::string> names;
  if (run.levels) names = run.levels->names;
  else if (run.classifier) names = run.classifier->label_names;
  std::vector<fs::path> gan_files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const auto fname = entry.path().filename().string();
    if (fname.starts_with("scgan_") && fname.ends_with(".ckpt")) gan_files.push_back(entry.path());
  }
  std::vector<gan::ScganModel> gans;
  for (const auto& p : gan_files) gans.push_back(gan::ScganModel::from_checkpoint(nn::load_checkpoint(p)));
  // class id order when the dictionary is known, file name order otherwise
  std::stable_sort(gans.begin(), gans.end(), [&](const auto& a, const auto& b) {
    const auto ia = std::find(names.begin(), names.end(), a.class_name) - names.begin();
    const auto ib = std::find(names.begin(), names.end(), b.class_name) - names.begin();
    return ia != ib ? ia < ib : a.class_name < b.class_name;
  });
  run.scgan = std::move(gans);

  if (fs::exists(dir / "augmented.csv")) run.augmented = load_augmented(dir / "augmented.csv", names);
  if (fs::exists(dir / "stage_report.csv")) {
    StageReport rep;
    const auto path = dir / "stage_report.csv";
    for (const auto& r : read_csv_rows(path, "stage,class,seconds,generated,accepted")) {
      require(r.size() == 5, ErrorKind::format, "bad row in " + path.string());
      rep.entries.push_back({r[0], r[1], number(r[2], path),
                             static_cast<std::size_t>(number(r[3], path)),
                             static_cast<std::size_t>(number(r[4], path))});
    }
    if (fs::exists(dir / "san_loss.csv")) rep.san_loss = read_loss_csv(dir / "san_loss.csv");
    for (const auto& m : run.scgan) {
      const auto p = dir / ("scgan_loss_" + file_stem(m.class_name) + ".csv");
      if (!fs::exists(p)) continue;
      gan::LossHistory hist;
      for (const auto& r : read_csv_rows(p, "epoch,discriminator,generator")) {
        require(r.size() == 3, ErrorKind::format, "bad row in " + p.string());
        hist.discriminator.push_back(number(r[1], p));
        hist.generator.push_back(number(r[2], p));
      }
      rep.scgan_loss[m.class_name] = std::move(hist);
    }
    run.stage_report = std::move(rep);
  }
  if (fs::exists(dir / "classifier_loss.csv")) run.classifier_loss = read_loss_csv(dir / "classifier_loss.csv");
  return run;
}

}  // namespace imbaug::pipeline
