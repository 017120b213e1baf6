#include "ovoscope/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <string>

#include "CLI11.hpp"
#include "ovoscope/error.hpp"
#include "ovoscope/pipeline.hpp"
#include "ovoscope/synthgen.hpp"

namespace ovoscope::cli {
namespace {

namespace fs = std::filesystem;

struct GlobalOptions {
  std::uint64_t seed = 1;
  int threshold = kDefaultThreshold;
  std::string enhance = "clahe-he";
  std::string tiles = "8x8";
  double alpha = 40.0;
  double smax = 4.0;
  double c = 1.0;
  bool standardize = false;
  std::size_t threads = 1;
  double kkt_tol = 1e-3;
  std::size_t max_passes = 200;
};

ClaheConfig parse_clahe(const GlobalOptions& g) {
  ClaheConfig cfg;
  const auto x = g.tiles.find_first_of("xX");
  try {
    std::size_t used = 0;
    if (x == std::string::npos) {
      cfg.tiles_x = cfg.tiles_y = std::stoul(g.tiles, &used);
      if (used != g.tiles.size()) throw std::invalid_argument(g.tiles);
    } else {
      const std::string cols = g.tiles.substr(0, x), rows = g.tiles.substr(x + 1);
      cfg.tiles_x = std::stoul(cols, &used);
      if (used != cols.size()) throw std::invalid_argument(g.tiles);
      cfg.tiles_y = std::stoul(rows, &used);
      if (used != rows.size()) throw std::invalid_argument(g.tiles);
    }
  } catch (const std::logic_error&) {
    throw InvalidArgument("--tiles expects COLSxROWS, e.g. 8x8");
  }
  cfg.alpha = g.alpha;
  cfg.s_max = g.smax;
  cfg.validate();
  return cfg;
}

PipelineConfig pipeline_config(const GlobalOptions& g) {
  PipelineConfig cfg;
  if (g.threshold < 0 || g.threshold > 255) {
    throw InvalidArgument("--threshold must lie in [0, 255]");
  }
  cfg.threshold = static_cast<std::uint8_t>(g.threshold);
  cfg.clahe = parse_clahe(g);
  cfg.enhance = parse_enhance_mode(g.enhance);
  cfg.svm.c = g.c;
  cfg.svm.standardize = g.standardize;
  cfg.svm.seed = g.seed;
  cfg.svm.kkt_tol = g.kkt_tol;
  cfg.svm.max_passes = g.max_passes;
  cfg.svm.validate();
  cfg.split_seed = g.seed;
  cfg.threads = std::max<std::size_t>(1, g.threads);
  return cfg;
}

std::string read_text(const fs::path& path) {
  const auto bytes = read_file(path);
  return std::string(bytes.begin(), bytes.end());
}

void write_text(const fs::path& path, const std::string& text) {
  write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

int failure_code(const std::vector<ExtractFailure>& failures) {
  if (failures.empty()) return kOk;
  for (const auto& f : failures) {
    if (f.io) return kIo;
  }
  return kValidation;
}

void log_failures(const std::vector<ExtractFailure>& failures, std::ostream& err) {
  for (const auto& f : failures) {
    err << "skipped " << f.path << ": " << f.message << "\n";
  }
}

// Combines outcome codes: hard failures win over the convergence warning.
int worst(int a, int b) {
  auto rank = [](int code) { return code == kConvergenceWarning ? 1 : code == kOk ? 0 : 2; };
  if (rank(a) != rank(b)) return rank(a) > rank(b) ? a : b;
  return std::max(a, b);
}

struct Trained {
  SvmModel model;
  std::vector<LabeledSample> samples;
};

Trained train_on(const FeatureTable& table, const PipelineConfig& cfg) {
  Trained t{{}, to_samples(table)};
  t.model = train_smo(t.samples, cfg.svm);
  return t;
}

void annotate_predictions(FeatureTable& table, const SvmModel& model) {
  for (auto& row : table.rows) {
    const auto a = row.features.to_array();
    row.predicted = label_from_class(predict(model, std::vector<double>(a.begin(), a.end())));
  }
}

int cmd_synth(const GlobalOptions& g, std::size_t fertile, std::size_t infertile,
              const fs::path& out_dir, bool hard, std::ostream& out) {
  const DatasetManifest m = generate_dataset(fertile, infertile, g.seed, out_dir, hard);
  out << "wrote " << m.entries.size() << " images and " << (out_dir / "manifest.json").string()
      << "\n";
  return kOk;
}

int cmd_preprocess(const GlobalOptions& g, const fs::path& in, const fs::path& out_file,
                   std::ostream& out) {
  const PipelineConfig cfg = pipeline_config(g);
  const GrayImage img = preprocess_one(in, cfg);
  write_file(out_file, encode_pgm(img, true));
  out << "wrote " << out_file.string() << " (" << img.width() << "x" << img.height() << ")\n";
  return kOk;
}

int cmd_extract(const GlobalOptions& g, const fs::path& manifest_path, const fs::path& out_csv,
                std::ostream& out, std::ostream& err) {
  const PipelineConfig cfg = pipeline_config(g);
  const DatasetManifest manifest = load_manifest(manifest_path);
  const ExtractResult res = extract_all(manifest, cfg);
  write_text(out_csv, table_to_csv(res.table));
  log_failures(res.failures, err);
  out << "extracted " << res.table.rows.size() << " of " << manifest.entries.size()
      << " images into " << out_csv.string() << "\n";
  return failure_code(res.failures);
}

int cmd_split(const GlobalOptions& g, const fs::path& in, const fs::path& train_out,
              const fs::path& test_out, double fraction, std::ostream& out) {
  if (in.extension() == ".json") {
    const DatasetManifest m = load_manifest(in);
    const auto parts = split(m, g.seed, fraction);
    auto save = [&](const std::vector<DatasetEntry>& entries, const fs::path& file) {
      DatasetManifest part;
      const fs::path dir = fs::absolute(file).parent_path();
      for (const auto& e : entries) {
        const fs::path rel = fs::absolute(e.path).lexically_relative(dir);
        part.entries.push_back({rel.empty() ? fs::absolute(e.path) : rel, e.label});
      }
      save_manifest(part, file);
    };
    save(parts.train, train_out);
    save(parts.test, test_out);
    out << "train " << parts.train.size() << ", test " << parts.test.size() << "\n";
  } else {
    const FeatureTable table = table_from_csv(read_text(in));
    const auto parts = split(table, g.seed, fraction);
    write_text(train_out, table_to_csv({parts.train}));
    write_text(test_out, table_to_csv({parts.test}));
    out << "train " << parts.train.size() << ", test " << parts.test.size() << "\n";
  }
  return kOk;
}

int report_convergence(const SvmModel& model, std::ostream& err) {
  if (model.converged) return kOk;
  err << "warning: SMO stopped after " << model.passes
      << " passes without reaching the KKT tolerance; model written anyway\n";
  return kConvergenceWarning;
}

int cmd_train(const GlobalOptions& g, const fs::path& features, const fs::path& model_out,
              std::ostream& out, std::ostream& err) {
  const PipelineConfig cfg = pipeline_config(g);
  const FeatureTable table = table_from_csv(read_text(features));
  const Trained t = train_on(table, cfg);
  write_text(model_out, model_to_json(t.model));
  const ScenarioReport resub = run_scenarios(t.model, t.samples, t.samples.size());
  out << "trained on " << t.samples.size() << " samples, " << t.model.support_vectors.size()
      << " support vectors, training accuracy " << format_percent(resub.pooled) << "%\n";
  return report_convergence(t.model, err);
}

int cmd_predict(const fs::path& model_path, const fs::path& features, const fs::path& out_csv,
                std::ostream& out) {
  const SvmModel model = model_from_json(read_text(model_path));
  FeatureTable table = table_from_csv(read_text(features));
  annotate_predictions(table, model);
  write_text(out_csv, table_to_csv(table));
  out << "predicted " << table.rows.size() << " rows into " << out_csv.string() << "\n";
  return kOk;
}

int cmd_eval(const fs::path& model_path, const fs::path& features, const fs::path& report_out,
             std::size_t step, std::ostream& out) {
  const SvmModel model = model_from_json(read_text(model_path));
  const FeatureTable table = table_from_csv(read_text(features));
  const ScenarioReport report = run_scenarios(model, to_samples(table), step);
  write_text(report_out, report_to_json(report));
  out << render_table(report);
  return kOk;
}

int cmd_pipeline(const GlobalOptions& g, const fs::path& manifest_path, const fs::path& out_dir,
                 std::size_t step, double fraction, std::ostream& out, std::ostream& err) {
  PipelineConfig cfg = pipeline_config(g);
  cfg.train_fraction = fraction;
  const DatasetManifest manifest = load_manifest(manifest_path);
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());

  const ExtractResult res = extract_all(manifest, cfg);
  log_failures(res.failures, err);
  write_text(out_dir / "features.csv", table_to_csv(res.table));

  const auto parts = split(res.table, cfg.split_seed, cfg.train_fraction);
  FeatureTable train{parts.train}, test{parts.test};

  const Trained t = train_on(train, cfg);
  write_text(out_dir / "model.json", model_to_json(t.model));
  annotate_predictions(train, t.model);
  annotate_predictions(test, t.model);
  write_text(out_dir / "train.csv", table_to_csv(train));
  write_text(out_dir / "test.csv", table_to_csv(test));

  const ScenarioReport resub = run_scenarios(t.model, t.samples, std::min(step, t.samples.size()));
  write_text(out_dir / "train_report.json", report_to_json(resub));
  const auto test_samples = to_samples(test);
  const ScenarioReport report =
      run_scenarios(t.model, test_samples, std::min(step, test_samples.size()));
  write_text(out_dir / "report.json", report_to_json(report));

  out << "features: " << res.table.rows.size() << " of " << manifest.entries.size()
      << " images; train " << train.rows.size() << ", test " << test.rows.size() << "\n";
  out << "training-set accuracy: " << format_percent(resub.pooled) << "%\n";
  out << "held-out scenarios:\n" << render_table(report);
  return worst(failure_code(res.failures), report_convergence(t.model, err));
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Egg fertility classification from candling images"};
  app.name("ovoscope");
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  app.add_option("--seed", g.seed, "Master seed (synthesis, split, SMO)")->capture_default_str();
  app.add_option("--threshold", g.threshold, "Segmentation threshold")
      ->check(CLI::Range(0, 255))
      ->capture_default_str();
  app.add_option("--enhance", g.enhance, "none|he|clahe|clahe-he")
      ->check(CLI::IsMember({"none", "he", "clahe", "clahe-he"}))
      ->capture_default_str();
  app.add_option("--tiles", g.tiles, "CLAHE tile grid COLSxROWS")->capture_default_str();
  app.add_option("--alpha", g.alpha, "CLAHE clip factor (1-100)")->capture_default_str();
  app.add_option("--smax", g.smax, "CLAHE maximum slope")->capture_default_str();
  app.add_option("--c", g.c, "SVM penalty")->capture_default_str();
  app.add_flag("--standardize", g.standardize, "z-score features before training");
  app.add_option("--threads", g.threads, "Worker threads for image processing")
      ->capture_default_str();
  app.add_option("--kkt-tol", g.kkt_tol, "SMO KKT tolerance")->capture_default_str();
  app.add_option("--max-passes", g.max_passes, "SMO pass limit")->capture_default_str();

  std::size_t n_fertile = 50, n_infertile = 50;
  std::string synth_out;
  bool hard = false;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic candling dataset");
  synth->add_option("--fertile", n_fertile)->capture_default_str();
  synth->add_option("--infertile", n_infertile)->capture_default_str();
  synth->add_option("--out", synth_out, "Output directory")->required();
  synth->add_flag("--hard", hard, "Overlapping classes");

  std::string pre_in, pre_out;
  auto* pre = app.add_subcommand("preprocess", "Crop, grayscale and enhance one image");
  pre->add_option("--in", pre_in)->required();
  pre->add_option("--out", pre_out, "Output PGM")->required();

  std::string ex_manifest, ex_out;
  auto* ex = app.add_subcommand("extract", "Feature table for a manifest");
  ex->add_option("--manifest", ex_manifest)->required();
  ex->add_option("--out", ex_out, "Output CSV")->required();

  std::string sp_in, sp_train, sp_test;
  double fraction = 0.5;
  auto* sp = app.add_subcommand("split", "Stratified train/test split of a manifest or CSV");
  sp->add_option("--in", sp_in, "manifest .json or features .csv")->required();
  sp->add_option("--train", sp_train)->required();
  sp->add_option("--test", sp_test)->required();
  sp->add_option("--train-fraction", fraction)->capture_default_str();

  std::string tr_features, tr_model;
  auto* tr = app.add_subcommand("train", "Train the SVM on a feature CSV");
  tr->add_option("--features", tr_features)->required();
  tr->add_option("--model", tr_model, "Output model JSON")->required();

  std::string pr_model, pr_features, pr_out;
  auto* pr = app.add_subcommand("predict", "Add a predicted column to a feature CSV");
  pr->add_option("--model", pr_model)->required();
  pr->add_option("--features", pr_features)->required();
  pr->add_option("--out", pr_out)->required();

  std::string ev_model, ev_features, ev_report;
  std::size_t step = 10;
  auto* ev = app.add_subcommand("eval", "Incremental scenario evaluation");
  ev->add_option("--model", ev_model)->required();
  ev->add_option("--features", ev_features)->required();
  ev->add_option("--report", ev_report, "Output report JSON")->required();
  ev->add_option("--step", step)->capture_default_str();

  std::string pl_manifest, pl_out;
  auto* pl = app.add_subcommand("pipeline", "extract + split + train + eval");
  pl->add_option("--manifest", pl_manifest)->required();
  pl->add_option("--out", pl_out, "Output directory")->required();
  pl->add_option("--step", step)->capture_default_str();
  pl->add_option("--train-fraction", fraction)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    // Bad global options are rejected whatever the subcommand.
    pipeline_config(g);
    if (*synth) return cmd_synth(g, n_fertile, n_infertile, synth_out, hard, out);
    if (*pre) return cmd_preprocess(g, pre_in, pre_out, out);
    if (*ex) return cmd_extract(g, ex_manifest, ex_out, out, err);
    if (*sp) return cmd_split(g, sp_in, sp_train, sp_test, fraction, out);
    if (*tr) return cmd_train(g, tr_features, tr_model, out, err);
    if (*pr) return cmd_predict(pr_model, pr_features, pr_out, out);
    if (*ev) return cmd_eval(ev_model, ev_features, ev_report, step, out);
    if (*pl) return cmd_pipeline(g, pl_manifest, pl_out, step, fraction, out, err);
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kIo;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kValidation;
  }
  return kUsage;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("ovoscope");
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace ovoscope::cli
