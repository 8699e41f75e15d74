#include "lemmings/model_file.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "lemmings/digest.hpp"
#include "lemmings/errors.hpp"
#include "text_util.hpp"

namespace lemmings {

namespace {

constexpr std::string_view kChecksumPrefix = "CHECKSUM sha256=";

template <typename Range>
void write_row(std::string& out, const Range& values) {
  bool first = true;
  for (double v : values) {
    if (!first) out += ' ';
    out += text::format_double(v);
    first = false;
  }
  out += '\n';
}

void write_header(std::string& out, std::string_view kind, std::size_t dim, std::size_t anchors,
                  double sigma, const ModelMeta& meta, std::string_view anchor_method,
                  std::uint64_t anchor_seed, bool scaled) {
  out += std::string(kModelMagic) + " " + std::string(kModelVersion) + "\n";
  out += "kind=" + std::string(kind) + (meta.task == Task::kRanking ? "-rank" : "-class");
  out += " dim=" + std::to_string(dim);
  out += " anchors=" + std::to_string(anchors);
  out += " lambda=" + text::format_double(meta.lambda);
  out += " sigma=" + text::format_double(sigma);
  out += " seed=" + std::to_string(meta.seed);
  out += " iters=" + std::to_string(meta.iterations);
  out += " threshold=" + text::format_double(meta.threshold);
  out += " anchor_method=" + std::string(anchor_method);
  out += " anchor_seed=" + std::to_string(anchor_seed);
  out += std::string(" scaled=") + (scaled ? "1" : "0") + "\n";
}

void write_scaler(std::string& out, const std::optional<FeatureScaler>& scaler) {
  if (!scaler) return;
  out += "SCALER:\n";
  write_row(out, scaler->mean);
  write_row(out, scaler->stddev);
}

class Reader {
 public:
  Reader(std::string_view body, const std::string& source) : body_(body), source_(source) {}

  [[noreturn]] void fail(const std::string& what) const {
    throw FormatError(source_ + ":" + std::to_string(line_) + ": " + what);
  }

  std::string_view line() {
    if (pos_ >= body_.size()) {
      ++line_;
      fail("truncated model file");
    }
    const std::size_t nl = body_.find('\n', pos_);
    const std::string_view out = body_.substr(pos_, nl - pos_);
    pos_ = nl + 1;
    ++line_;
    return out;
  }

  void expect(std::string_view label) {
    if (line() != label) fail("expected '" + std::string(label) + "'");
  }

  std::vector<double> row(std::size_t n) {
    const auto fields = text::split(line(), ' ');
    if (fields.size() != n) {
      fail("expected " + std::to_string(n) + " values, found " + std::to_string(fields.size()));
    }
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (!text::parse_double(fields[i], out[i])) fail("bad value '" + std::string(fields[i]) + "'");
    }
    return out;
  }

  bool done() const { return pos_ >= body_.size(); }

 private:
  std::string_view body_;
  const std::string& source_;
  std::size_t pos_ = 0;
  std::size_t line_ = 0;
};

}  // namespace

std::string serialize_model(const Model& model) {
  std::string out;
  if (const auto* lin = std::get_if<LinearModel>(&model)) {
    write_header(out, "linear", lin->dim(), 0, 0.0, lin->meta, "none", 0, lin->scaler.has_value());
    out += "W:\n";
    write_row(out, lin->weights);
    write_scaler(out, lin->scaler);
  } else {
    const auto& loc = std::get<LocalModel>(model);
    const std::size_t d = loc.dim();
    const std::size_t k = loc.anchors.count();
    write_header(out, "local", d, k, loc.anchors.sigma, loc.meta, to_string(loc.anchors.method),
                 loc.anchors.seed, loc.scaler.has_value());
    out += "W:\n";
    for (Eigen::Index r = 0; r < loc.weights.rows(); ++r) write_row(out, loc.weights.row(r));
    out += "ANCHORS:\n";
    for (Eigen::Index c = 0; c < loc.anchors.points.cols(); ++c) {
      write_row(out, loc.anchors.points.col(c));
    }
    write_scaler(out, loc.scaler);
  }
  out += std::string(kChecksumPrefix) + sha256_hex(out) + "\n";
  return out;
}

Model parse_model(std::string_view text, const std::string& source) {
  const std::string expected = std::string(kModelMagic) + " " + std::string(kModelVersion);
  const std::string_view first = text.substr(0, text.find('\n'));
  if (first != expected) {
    if (first.substr(0, kModelMagic.size()) == kModelMagic) {
      throw FormatError(source + ": unsupported model version '" + std::string(first) +
                        "', expected '" + expected + "'");
    }
    throw FormatError(source + ": not a model file, expected header '" + expected + "'");
  }

  if (text.empty() || text.back() != '\n') throw FormatError(source + ": truncated model file");
  const std::size_t last = text.rfind('\n', text.size() - 2);
  const std::string_view trailer = text.substr(last + 1, text.size() - last - 2);
  if (trailer.substr(0, kChecksumPrefix.size()) != kChecksumPrefix) {
    throw FormatError(source + ": truncated model file (no checksum line)");
  }
  const std::string_view body = text.substr(0, last + 1);
  if (sha256_hex(body) != trailer.substr(kChecksumPrefix.size())) {
    throw FormatError(source + ": checksum mismatch");
  }

  Reader in(body, source);
  in.line();
  std::map<std::string, std::string, std::less<>> kv;
  for (std::string_view field : text::split(in.line(), ' ')) {
    const auto eq = field.find('=');
    if (eq == std::string_view::npos) in.fail("expected key=value, found '" + std::string(field) + "'");
    kv.emplace(std::string(field.substr(0, eq)), std::string(field.substr(eq + 1)));
  }
  auto get = [&](const char* key) -> const std::string& {
    const auto it = kv.find(key);
    if (it == kv.end()) in.fail(std::string("missing key '") + key + "'");
    return it->second;
  };
  auto get_size = [&](const char* key) {
    std::uint64_t v = 0;
    if (!text::parse_int(get(key), v)) in.fail(std::string("bad integer for '") + key + "'");
    return v;
  };
  auto get_double = [&](const char* key) {
    double v = 0.0;
    if (!text::parse_double(get(key), v)) in.fail(std::string("bad number for '") + key + "'");
    return v;
  };

  const std::string& kind = get("kind");
  ModelMeta meta;
  meta.lambda = get_double("lambda");
  meta.seed = get_size("seed");
  meta.iterations = get_size("iters");
  meta.threshold = get_double("threshold");
  const std::size_t dim = get_size("dim");
  const std::size_t k = get_size("anchors");
  const std::string& scaled = get("scaled");
  if (scaled != "0" && scaled != "1") in.fail("scaled must be 0 or 1");
  if (dim == 0) in.fail("dim must be positive");

  bool linear = false;
  if (kind == "linear-class" || kind == "local-class") {
    meta.task = Task::kClassification;
  } else if (kind == "linear-rank" || kind == "local-rank") {
    meta.task = Task::kRanking;
  } else {
    in.fail("unknown model kind '" + kind + "'");
  }
  linear = kind.starts_with("linear");

  auto read_scaler = [&]() -> std::optional<FeatureScaler> {
    if (scaled == "0") return std::nullopt;
    in.expect("SCALER:");
    FeatureScaler s;
    s.mean = in.row(dim);
    s.stddev = in.row(dim);
    return s;
  };

  Model model;
  if (linear) {
    LinearModel m;
    m.meta = meta;
    in.expect("W:");
    m.weights = in.row(dim);
    m.scaler = read_scaler();
    model = std::move(m);
  } else {
    if (k == 0) in.fail("local model needs anchors >= 1");
    LocalModel m;
    m.meta = meta;
    m.anchors.sigma = get_double("sigma");
    m.anchors.method = parse_anchor_method(get("anchor_method"));
    m.anchors.seed = get_size("anchor_seed");
    in.expect("W:");
    m.weights.resize(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(k));
    for (std::size_t r = 0; r < dim; ++r) {
      const auto row = in.row(k);
      for (std::size_t c = 0; c < k; ++c) {
        m.weights(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = row[c];
      }
    }
    in.expect("ANCHORS:");
    m.anchors.points.resize(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(k));
    for (std::size_t c = 0; c < k; ++c) {
      const auto col = in.row(dim);
      for (std::size_t r = 0; r < dim; ++r) {
        m.anchors.points(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = col[r];
      }
    }
    m.scaler = read_scaler();
    model = std::move(m);
  }
  if (!in.done()) in.fail("unexpected trailing content");
  return model;
}

void save_model(const Model& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write '" + path.string() + "'");
  out << serialize_model(model);
  if (!out) throw FormatError("write to '" + path.string() + "' failed");
}

Model load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_model(buf.str(), path.string());
}

LinearModel load_linear_model(const std::filesystem::path& path) {
  Model m = load_model(path);
  if (auto* lin = std::get_if<LinearModel>(&m)) return std::move(*lin);
  throw FormatError(path.string() + ": model kind mismatch, expected linear, found local");
}

LocalModel load_local_model(const std::filesystem::path& path) {
  Model m = load_model(path);
  if (auto* loc = std::get_if<LocalModel>(&m)) return std::move(*loc);
  throw FormatError(path.string() + ": model kind mismatch, expected local, found linear");
}

}  // namespace lemmings
