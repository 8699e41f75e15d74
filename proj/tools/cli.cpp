#include "cli.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "lemmings/bag_file.hpp"
#include "lemmings/digest.hpp"
#include "lemmings/errors.hpp"
#include "lemmings/evaluation.hpp"
#include "lemmings/model_file.hpp"
#include "lemmings/musk.hpp"
#include "lemmings/report.hpp"
#include "lemmings/sequence.hpp"

namespace lemmings::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string fmt(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, r.ptr);
}

std::string absolute(const std::string& path) { return fs::absolute(path).lexically_normal().string(); }

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write '" + path + "'");
  out << content;
  if (!out) throw FormatError("write to '" + path + "' failed");
}

// Everything needed to repeat a run: the explicit argument list plus the
// files it read and wrote.
struct Invocation {
  std::vector<std::string> argv;
  std::vector<std::string> inputs;
  std::vector<std::pair<std::string, std::string>> outputs;  // flag, path

  void add(const std::string& flag, const std::string& value) {
    argv.push_back(flag);
    argv.push_back(value);
  }
  void input(const std::string& flag, const std::string& path) {
    add(flag, path);
    inputs.push_back(path);
  }
  void output(const std::string& flag, const std::string& path) {
    add(flag, path);
    outputs.emplace_back(flag, path);
  }
};

// Flags whose value is a file the command writes; rerun --out-dir redirects
// them.
bool is_output_flag(const std::string& flag) {
  return flag == "--output" || flag == "--report" || flag == "--timing" || flag == "--manifest";
}

void write_manifest(const std::string& path, const Invocation& inv) {
  json inputs = json::array();
  for (const std::string& p : inv.inputs) inputs.push_back({{"path", p}, {"sha256", sha256_file(p)}});
  json outputs = json::array();
  for (const auto& [flag, p] : inv.outputs) {
    outputs.push_back({{"flag", flag}, {"path", p}, {"sha256", sha256_file(p)}});
  }
  const json manifest{{"tool", "lemmings"},
                      {"version", LEMMINGS_VERSION},
                      {"command", inv.argv.front()},
                      {"argv", inv.argv},
                      {"inputs", std::move(inputs)},
                      {"outputs", std::move(outputs)}};
  write_file(path, manifest.dump(2) + "\n");
}

std::string resolve_format(const std::string& format, const std::string& input) {
  if (format != "auto") return format;
  const std::string ext = fs::path(input).extension().string();
  return ext == ".data" || ext == ".csv" ? "musk" : "bags";
}

Dataset load_dataset(const std::string& path, const std::string& format) {
  return format == "musk" ? load_musk(path) : load_bags(path);
}

// Flags shared by train and cv.
struct SolverFlags {
  std::string input;
  std::string format = "auto";
  std::string mode;
  std::string solver = "linear";
  std::optional<double> lambda;
  std::optional<std::size_t> iters;
  std::uint64_t seed = 0;
  std::optional<std::size_t> anchors;
  double sigma = 1.0;
  std::string anchor_method = "kmeans";
  bool no_scale = false;

  void attach(CLI::App& app) {
    app.add_option("--input", input, "Dataset file")->required();
    app.add_option("--format", format, "Input format")
        ->check(CLI::IsMember({"auto", "musk", "bags"}))
        ->capture_default_str();
    app.add_option("--mode", mode, "Learning task")
        ->required()
        ->check(CLI::IsMember({"class", "rank"}));
    app.add_option("--solver", solver, "Solver family")
        ->check(CLI::IsMember({"linear", "local"}))
        ->capture_default_str();
    app.add_option("--lambda", lambda, "Regularization weight");
    app.add_option("--iters", iters, "SSGO iterations T (default 50 per training bag)");
    app.add_option("--seed", seed, "Master random seed")->capture_default_str();
    app.add_option("--anchors", anchors, "Number of anchor points K (local solver)");
    app.add_option("--sigma", sigma, "Locality weight (local solver)")->capture_default_str();
    app.add_option("--anchor-method", anchor_method, "Anchor selection (local solver)")
        ->check(CLI::IsMember({"kmeans", "random"}))
        ->capture_default_str();
    app.add_flag("--no-scale", no_scale, "Disable feature standardization");
  }

  // Rejects local-only flags on the linear solver.
  void check_solver_flags(const CLI::App& app) const {
    if (solver == "linear") {
      for (const char* flag : {"--anchors", "--sigma", "--anchor-method"}) {
        if (app.count(flag) > 0) throw UsageError(std::string(flag) + " requires --solver local");
      }
    }
  }

  SolverSpec spec() const {
    SolverSpec s;
    s.solver = solver == "local" ? SolverKind::kLocal : SolverKind::kLinear;
    s.mode = mode == "rank" ? Task::kRanking : Task::kClassification;
    if (lambda) s.lambda = *lambda;
    s.iterations = iters;
    if (anchors) s.anchors = *anchors;
    s.sigma = sigma;
    s.anchor_method = parse_anchor_method(anchor_method);
    s.scale = !no_scale;
    return s;
  }

  void record(Invocation& inv) const {
    inv.input("--input", absolute(input));
    inv.add("--format", resolve_format(format, input));
    inv.add("--mode", mode);
    inv.add("--solver", solver);
    if (lambda) inv.add("--lambda", fmt(*lambda));
    if (iters) inv.add("--iters", std::to_string(*iters));
    inv.add("--seed", std::to_string(seed));
    if (solver == "local") {
      if (anchors) inv.add("--anchors", std::to_string(*anchors));
      inv.add("--sigma", fmt(sigma));
      inv.add("--anchor-method", anchor_method);
    }
    if (no_scale) inv.argv.push_back("--no-scale");
  }
};

// ---------------------------------------------------------------------------
// train

struct TrainCmd {
  SolverFlags flags;
  std::string output;
  std::string manifest;

  void attach(CLI::App& app) {
    flags.attach(app);
    app.get_option("--lambda")->required();
    app.add_option("--output,-o", output, "Model file to write")->required();
    app.add_option("--manifest", manifest, "Run manifest (default <output>.manifest.json)");
  }

  int run(const CLI::App& app, std::ostream& out) {
    flags.check_solver_flags(app);
    if (flags.solver == "local" && !flags.anchors) {
      throw UsageError("--anchors is required with --solver local");
    }
    const Dataset data = load_dataset(flags.input, resolve_format(flags.format, flags.input));
    SolverSpec spec = flags.spec();
    spec.iterations = resolve_iterations(spec, data);
    const TrainedModel trained = train_model(data, spec, flags.seed);
    save_model(trained.model, output);

    Invocation inv;
    inv.argv.push_back("train");
    SolverFlags resolved = flags;
    resolved.iters = spec.iterations;
    resolved.record(inv);
    inv.output("--output", absolute(output));
    const std::string manifest_path = manifest.empty() ? output + ".manifest.json" : manifest;
    inv.add("--manifest", absolute(manifest_path));
    write_manifest(manifest_path, inv);

    out << "iterations " << *spec.iterations << '\n'
        << "final_objective " << fmt(trained.trace.final_objective) << '\n'
        << "violations " << trained.trace.final_violations << '\n'
        << "model " << output << '\n';
    return kExitOk;
  }
};

// ---------------------------------------------------------------------------
// predict

struct PredictCmd {
  std::string model;
  std::string input;
  std::string format = "auto";
  std::string output;
  std::string manifest;

  void attach(CLI::App& app) {
    app.add_option("--model", model, "Model file")->required();
    app.add_option("--input", input, "Bags to score")->required();
    app.add_option("--format", format, "Input format")
        ->check(CLI::IsMember({"auto", "musk", "bags"}))
        ->capture_default_str();
    app.add_option("--output,-o", output, "Scores file (default stdout)");
    app.add_option("--manifest", manifest, "Run manifest (default <output>.manifest.json)");
  }

  int run(std::ostream& out) {
    const Model m = load_model(model);
    const std::string fmt_resolved = resolve_format(format, input);
    const std::vector<Bag> bags = fmt_resolved == "musk" ? load_musk(input).bags() : read_bag_file(input);
    std::ostringstream table;
    if (!bags.empty()) {
      const std::vector<WitnessResult> results = predict(m, bags);
      table << "bag_id\tscore\twitness_index\n";
      for (std::size_t i = 0; i < bags.size(); ++i) {
        table << bags[i].id() << '\t' << fmt(results[i].score) << '\t' << results[i].index << '\n';
      }
    }
    if (output.empty()) {
      out << table.str();
      return kExitOk;
    }
    write_file(output, table.str());
    Invocation inv;
    inv.argv.push_back("predict");
    inv.input("--model", absolute(model));
    inv.input("--input", absolute(input));
    inv.add("--format", fmt_resolved);
    inv.output("--output", absolute(output));
    const std::string manifest_path = manifest.empty() ? output + ".manifest.json" : manifest;
    inv.add("--manifest", absolute(manifest_path));
    write_manifest(manifest_path, inv);
    return kExitOk;
  }
};

// ---------------------------------------------------------------------------
// cv

HyperGrid read_grid(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw FormatError(path + ": " + e.what());
  }
  if (!j.is_object()) throw FormatError(path + ": grid must be a JSON object");
  HyperGrid grid;
  try {
    for (const auto& [key, values] : j.items()) {
      if (!values.is_array()) throw FormatError(path + ": '" + key + "' must be an array");
      if (key == "lambda") {
        grid.lambdas = values.get<std::vector<double>>();
      } else if (key == "anchors") {
        grid.anchors = values.get<std::vector<std::size_t>>();
      } else if (key == "sigma") {
        grid.sigmas = values.get<std::vector<double>>();
      } else if (key == "anchor_method") {
        for (const auto& v : values) grid.methods.push_back(parse_anchor_method(v.get<std::string>()));
      } else {
        throw FormatError(path + ": unknown grid key '" + key + "'");
      }
    }
  } catch (const json::exception& e) {
    throw FormatError(path + ": " + e.what());
  }
  return grid;
}

struct CvCmd {
  SolverFlags flags;
  std::size_t folds = 10;
  std::size_t runs = 5;
  bool no_stratify = false;
  bool loo = false;
  std::string grid;
  std::size_t inner_folds = 3;
  std::size_t jobs = 1;
  std::string report;
  std::string timing;
  std::string manifest;

  void attach(CLI::App& app) {
    flags.attach(app);
    auto* f = app.add_option("--folds", folds, "Outer folds")->capture_default_str();
    auto* r = app.add_option("--runs", runs, "Repetitions with fresh fold splits")->capture_default_str();
    auto* ns = app.add_flag("--no-stratify", no_stratify, "Plain instead of class-stratified folds");
    auto* g = app.add_option("--grid", grid, "JSON grid for inner hyperparameter search");
    app.add_option("--inner-folds", inner_folds, "Folds of the inner grid search")
        ->capture_default_str();
    app.add_flag("--loo", loo, "Leave-one-bag-out")->excludes(f)->excludes(r)->excludes(ns)->excludes(g);
    app.add_option("--jobs,-j", jobs, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
    app.add_option("--report", report, "Structured report (JSON, no timing)");
    app.add_option("--timing", timing, "Report with wall-clock fields (JSON)");
    app.add_option("--manifest", manifest, "Run manifest (default <report>.manifest.json)");
  }

  int run(const CLI::App& app, std::ostream& out) {
    flags.check_solver_flags(app);
    std::optional<HyperGrid> hyper;
    if (!grid.empty()) hyper = read_grid(grid);
    if (!flags.lambda && !(hyper && !hyper->lambdas.empty())) {
      throw UsageError("--lambda is required unless --grid lists lambda");
    }
    if (flags.solver == "local" && !flags.anchors && !(hyper && !hyper->anchors.empty())) {
      throw UsageError("--anchors is required with --solver local unless --grid lists anchors");
    }
    if (hyper && flags.solver == "linear" &&
        (!hyper->anchors.empty() || !hyper->sigmas.empty() || !hyper->methods.empty())) {
      throw UsageError("--grid lists local-only axes but --solver is linear");
    }
    if (!manifest.empty() && report.empty()) throw UsageError("--manifest requires --report");

    const Dataset data = load_dataset(flags.input, resolve_format(flags.format, flags.input));
    SolverSpec spec = flags.spec();
    if (hyper && !flags.lambda) spec.lambda = hyper->lambdas.front();
    if (hyper && !flags.anchors && !hyper->anchors.empty()) spec.anchors = hyper->anchors.front();

    EvalReport result;
    if (loo) {
      result = leave_one_bag_out(data, spec, flags.seed, jobs);
    } else {
      CvOptions opts;
      opts.folds = folds;
      opts.runs = runs;
      opts.stratified = !no_stratify;
      opts.seed = flags.seed;
      opts.jobs = jobs;
      opts.grid = hyper;
      opts.inner_folds = inner_folds;
      result = cross_validate(data, spec, opts);
    }

    const json timed = report_to_json(result, true);
    out << render_report(timed);
    if (!timing.empty()) write_file(timing, timed.dump(2) + "\n");
    if (report.empty()) return kExitOk;
    write_file(report, report_to_json(result, false).dump(2) + "\n");

    Invocation inv;
    inv.argv.push_back("cv");
    flags.record(inv);
    if (loo) {
      inv.argv.push_back("--loo");
    } else {
      inv.add("--folds", std::to_string(folds));
      inv.add("--runs", std::to_string(runs));
      if (no_stratify) inv.argv.push_back("--no-stratify");
      if (!grid.empty()) inv.input("--grid", absolute(grid));
      inv.add("--inner-folds", std::to_string(inner_folds));
    }
    inv.add("--jobs", std::to_string(jobs));
    inv.output("--report", absolute(report));
    if (!timing.empty()) inv.add("--timing", absolute(timing));
    const std::string manifest_path = manifest.empty() ? report + ".manifest.json" : manifest;
    inv.add("--manifest", absolute(manifest_path));
    write_manifest(manifest_path, inv);
    return kExitOk;
  }
};

// ---------------------------------------------------------------------------
// bags-from-fasta

struct FastaCmd {
  std::string fasta;
  std::string annotations;
  std::size_t window = 0;
  std::size_t stride = 1;
  std::string features = "aac";
  bool skip_unknown = false;
  std::string output;
  std::string manifest;

  void attach(CLI::App& app) {
    app.add_option("--fasta", fasta, "FASTA file")->required();
    app.add_option("--annotations", annotations, "seq_id<TAB>start<TAB>end regions")->required();
    app.add_option("--window", window, "Window length")->required()->check(CLI::PositiveNumber);
    app.add_option("--stride", stride, "Window step")->capture_default_str()->check(CLI::PositiveNumber);
    app.add_option("--features", features, "Window features")
        ->check(CLI::IsMember({"aac"}))
        ->capture_default_str();
    app.add_flag("--skip-unknown", skip_unknown, "Ignore non-standard residues");
    app.add_option("--output,-o", output, "Bag file to write")->required();
    app.add_option("--manifest", manifest, "Run manifest (default <output>.manifest.json)");
  }

  int run(std::ostream& out) {
    const std::vector<Bag> bags = bags_from_fasta_files(fasta, annotations, window, stride, skip_unknown);
    std::ostringstream buf;
    write_bags(bags, buf);
    write_file(output, buf.str());

    Invocation inv;
    inv.argv.push_back("bags-from-fasta");
    inv.input("--fasta", absolute(fasta));
    inv.input("--annotations", absolute(annotations));
    inv.add("--window", std::to_string(window));
    inv.add("--stride", std::to_string(stride));
    inv.add("--features", features);
    if (skip_unknown) inv.argv.push_back("--skip-unknown");
    inv.output("--output", absolute(output));
    const std::string manifest_path = manifest.empty() ? output + ".manifest.json" : manifest;
    inv.add("--manifest", absolute(manifest_path));
    write_manifest(manifest_path, inv);
    out << "bags " << bags.size() << '\n';
    return kExitOk;
  }
};

// ---------------------------------------------------------------------------
// rerun

struct RerunCmd {
  std::string manifest;
  std::string out_dir;
  bool verify = false;

  void attach(CLI::App& app) {
    app.add_option("--manifest", manifest, "Manifest written by a previous run")->required();
    app.add_option("--out-dir", out_dir, "Write outputs here instead of their recorded paths");
    app.add_flag("--verify", verify, "Fail unless regenerated outputs match recorded hashes");
  }

  int run(std::ostream& out, std::ostream& err) {
    std::ifstream in(manifest);
    if (!in) throw FormatError("cannot open '" + manifest + "'");
    json m;
    try {
      m = json::parse(in);
    } catch (const json::exception& e) {
      throw FormatError(manifest + ": " + e.what());
    }
    std::vector<std::string> argv;
    try {
      if (m.at("version").get<std::string>() != LEMMINGS_VERSION) {
        throw FormatError(manifest + ": written by version " + m.at("version").get<std::string>() +
                          ", this is " + LEMMINGS_VERSION);
      }
      for (const json& input : m.at("inputs")) {
        const std::string path = input.at("path").get<std::string>();
        if (sha256_file(path) != input.at("sha256").get<std::string>()) {
          throw Error("input '" + path + "' changed since the manifest was written");
        }
      }
      argv = m.at("argv").get<std::vector<std::string>>();
    } catch (const json::exception& e) {
      throw FormatError(manifest + ": " + e.what());
    }
    if (argv.empty() || argv.front() == "rerun") throw FormatError(manifest + ": invalid argv");

    auto redirect = [&](const std::string& path) {
      return out_dir.empty() ? path : (fs::path(out_dir) / fs::path(path).filename()).string();
    };
    if (!out_dir.empty()) {
      fs::create_directories(out_dir);
      for (std::size_t i = 1; i + 1 < argv.size(); ++i) {
        if (is_output_flag(argv[i])) argv[i + 1] = redirect(argv[i + 1]);
      }
    }
    const int code = cli::run(argv, out, err);
    if (code != kExitOk || !verify) return code;

    std::size_t checked = 0;
    for (const json& o : m.at("outputs")) {
      const std::string path = redirect(o.at("path").get<std::string>());
      if (sha256_file(path) != o.at("sha256").get<std::string>()) {
        throw Error("output '" + path + "' differs from the manifest");
      }
      ++checked;
    }
    out << "verified " << checked << " output(s)\n";
    return kExitOk;
  }
};

std::string one_line(std::string message) {
  for (char& c : message) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return message;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multiple-instance learning with stochastic sub-gradient solvers", "lemmings"};
  app.set_version_flag("--version", LEMMINGS_VERSION);
  app.require_subcommand(1);

  TrainCmd train;
  PredictCmd predict_cmd;
  CvCmd cv;
  FastaCmd fasta;
  RerunCmd rerun;
  CLI::App* train_app = app.add_subcommand("train", "Train a model and write it to a file");
  CLI::App* predict_app = app.add_subcommand("predict", "Score bags with a saved model");
  CLI::App* cv_app = app.add_subcommand("cv", "Cross-validate a solver configuration");
  CLI::App* fasta_app = app.add_subcommand("bags-from-fasta", "Window annotated sequences into bags");
  CLI::App* rerun_app = app.add_subcommand("rerun", "Repeat a run from its manifest");
  train.attach(*train_app);
  predict_cmd.attach(*predict_app);
  cv.attach(*cv_app);
  fasta.attach(*fasta_app);
  rerun.attach(*rerun_app);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == static_cast<int>(CLI::ExitCodes::Success)) {
      app.exit(e, out, err);
      return kExitOk;
    }
    err << "lemmings: usage error: " << one_line(e.what()) << '\n';
    return kExitUsage;
  }

  try {
    if (train_app->parsed()) return train.run(*train_app, out);
    if (predict_app->parsed()) return predict_cmd.run(out);
    if (cv_app->parsed()) return cv.run(*cv_app, out);
    if (fasta_app->parsed()) return fasta.run(out);
    if (rerun_app->parsed()) return rerun.run(out, err);
  } catch (const UsageError& e) {
    err << "lemmings: usage error: " << one_line(e.what()) << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "lemmings: runtime error: " << one_line(e.what()) << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace lemmings::cli
