#include "ratetol/problem_file.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <vector>

#include "json.hpp"
#include "ratetol/errors.hpp"
#include "ratetol/gps_model.hpp"

namespace ratetol {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& field, const std::string& msg) {
  throw ValidationError("field '" + field + "': " + msg);
}

// Runs f and prefixes any ValidationError with the field name.
template <typename F>
auto in_field(const std::string& field, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ValidationError& e) {
    fail(field, e.what());
  }
}

json parse_json(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // Byte offset -> line/column for the diagnostic.
    std::size_t line = 1, col = 1;
    const std::size_t end = std::min<std::size_t>(e.byte, text.size());
    for (std::size_t k = 0; k + 1 < end; ++k) {
      if (text[k] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ValidationError("parse error at line " + std::to_string(line) + ", column " +
                          std::to_string(col) + ": " + e.what());
  }
}

double number_at(const json& v, const std::string& field, bool allow_inf = false) {
  if (v.is_number()) return v.get<double>();
  if (allow_inf && v.is_string() && v.get<std::string>() == "inf") {
    return std::numeric_limits<double>::infinity();
  }
  fail(field, allow_inf ? "expected a number or \"inf\"" : "expected a number");
}

std::vector<double> vector_at(const json& v, const std::string& field) {
  if (!v.is_array()) fail(field, "expected an array of numbers");
  std::vector<double> out;
  out.reserve(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) {
    out.push_back(number_at(v[k], field + "[" + std::to_string(k) + "]"));
  }
  return out;
}

Matrix matrix_at(const json& v, const std::string& field, bool allow_inf = false) {
  if (!v.is_array() || v.empty()) fail(field, "expected a nonempty array of rows");
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::string rf = field + "[" + std::to_string(i) + "]";
    if (!v[i].is_array()) fail(rf, "expected an array");
    std::vector<double> row;
    for (std::size_t j = 0; j < v[i].size(); ++j) {
      row.push_back(number_at(v[i][j], rf + "[" + std::to_string(j) + "]", allow_inf));
    }
    rows.push_back(std::move(row));
  }
  return in_field(field, [&] { return Matrix::from_rows(rows); });
}

void reject_unknown(const json& obj, const std::string& field,
                    std::initializer_list<const char*> known) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* k : known) ok = ok || it.key() == k;
    if (!ok) fail(field.empty() ? it.key() : field + "." + it.key(), "unknown field");
  }
}

const json& required(const json& obj, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end()) fail(key, "missing");
  return *it;
}

Alphabet alphabet_at(const json& v, const std::string& field, const std::string& prefix) {
  if (!v.is_object()) fail(field, "expected an object with \"values\"");
  reject_unknown(v, field, {"labels", "values"});
  const auto vit = v.find("values");
  if (vit == v.end()) fail(field + ".values", "missing");
  std::vector<double> values = vector_at(*vit, field + ".values");
  if (values.empty()) fail(field + ".values", "alphabet is empty");
  const auto lit = v.find("labels");
  if (lit == v.end()) {
    return in_field(field, [&] { return Alphabet::from_values(std::move(values), prefix); });
  }
  if (!lit->is_array()) fail(field + ".labels", "expected an array of strings");
  std::vector<std::string> labels;
  for (std::size_t k = 0; k < lit->size(); ++k) {
    if (!(*lit)[k].is_string()) {
      fail(field + ".labels[" + std::to_string(k) + "]", "expected a string");
    }
    labels.push_back((*lit)[k].get<std::string>());
  }
  return in_field(field, [&] { return Alphabet(std::move(labels), std::move(values)); });
}

std::string kind_at(const json& v, const std::string& field) {
  const auto it = v.find("kind");
  if (it == v.end() || !it->is_string()) fail(field + ".kind", "missing or not a string");
  return it->get<std::string>();
}

SimilaritySpec similarity_at(const json& v) {
  SimilaritySpec spec;
  if (v.is_array()) {
    spec.matrix = matrix_at(v, "similarity");
    return spec;
  }
  if (!v.is_object()) fail("similarity", "expected a matrix or a generator object");
  const std::string kind = kind_at(v, "similarity");
  if (kind == "gaussian") {
    reject_unknown(v, "similarity", {"kind", "sigma"});
    spec.kind = SimilaritySpec::Kind::kGaussian;
    if (!v.contains("sigma")) fail("similarity.sigma", "missing");
    spec.parameter = number_at(v["sigma"], "similarity.sigma");
    if (!(spec.parameter > 0.0) || !std::isfinite(spec.parameter)) {
      fail("similarity.sigma", "must be positive and finite");
    }
  } else if (kind == "threshold") {
    reject_unknown(v, "similarity", {"kind", "radius"});
    spec.kind = SimilaritySpec::Kind::kThreshold;
    if (!v.contains("radius")) fail("similarity.radius", "missing");
    spec.parameter = number_at(v["radius"], "similarity.radius");
    if (!(spec.parameter >= 0.0) || !std::isfinite(spec.parameter)) {
      fail("similarity.radius", "must be nonnegative and finite");
    }
  } else if (kind == "matrix") {
    reject_unknown(v, "similarity", {"kind", "matrix"});
    if (!v.contains("matrix")) fail("similarity.matrix", "missing");
    spec.matrix = matrix_at(v["matrix"], "similarity.matrix");
  } else {
    fail("similarity.kind", "unknown generator \"" + kind + "\"");
  }
  return spec;
}

DistortionSpec distortion_at(const json& v) {
  DistortionSpec spec;
  if (v.is_array()) {
    spec.matrix = matrix_at(v, "distortion", true);
    return spec;
  }
  if (!v.is_object()) fail("distortion", "expected a matrix or a generator object");
  const std::string kind = kind_at(v, "distortion");
  if (kind == "squared") {
    reject_unknown(v, "distortion", {"kind"});
    spec.kind = DistortionSpec::Kind::kSquared;
  } else if (kind == "neglog-of-similarity") {
    reject_unknown(v, "distortion", {"kind"});
    spec.kind = DistortionSpec::Kind::kNeglogOfSimilarity;
  } else if (kind == "matrix") {
    reject_unknown(v, "distortion", {"kind", "matrix"});
    if (!v.contains("matrix")) fail("distortion.matrix", "missing");
    spec.matrix = matrix_at(v["matrix"], "distortion.matrix", true);
  } else {
    fail("distortion.kind", "unknown generator \"" + kind + "\"");
  }
  return spec;
}

ordered_json matrix_json(const Matrix& m) {
  ordered_json rows = ordered_json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    ordered_json row = ordered_json::array();
    for (double x : m.row(i)) {
      if (std::isinf(x)) {
        row.push_back("inf");
      } else {
        row.push_back(x);
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

ordered_json alphabet_json(const Alphabet& a) {
  ordered_json out;
  out["labels"] = a.labels();
  out["values"] = a.values();
  return out;
}

void check_shape(const Matrix& m, std::size_t rows, std::size_t cols, const std::string& field) {
  if (m.rows() != rows || m.cols() != cols) {
    fail(field, "shape " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                    " does not match alphabets " + std::to_string(rows) + "x" +
                    std::to_string(cols));
  }
}

}  // namespace

ProblemFile::ProblemFile(Distribution source, Alphabet alphabet_x, Alphabet alphabet_y,
                         std::optional<SimilaritySpec> similarity,
                         std::optional<DistortionSpec> distortion)
    : source_(std::move(source)),
      alphabet_x_(std::move(alphabet_x)),
      alphabet_y_(std::move(alphabet_y)),
      similarity_(std::move(similarity)),
      distortion_(std::move(distortion)) {
  const std::size_t nx = alphabet_x_.size();
  const std::size_t ny = alphabet_y_.size();
  if (source_.size() != nx) {
    fail("source", "has " + std::to_string(source_.size()) + " entries but alphabet_x has " +
                       std::to_string(nx));
  }
  if (similarity_) {
    switch (similarity_->kind) {
      case SimilaritySpec::Kind::kExplicit:
        check_shape(similarity_->matrix, nx, ny, "similarity");
        cover_ = in_field("similarity", [&] { return SimilarityCover(similarity_->matrix); });
        break;
      case SimilaritySpec::Kind::kGaussian:
        cover_ = in_field("similarity",
                          [&] { return build_cover(alphabet_x_, alphabet_y_, similarity_->parameter); });
        break;
      case SimilaritySpec::Kind::kThreshold:
        cover_ = in_field("similarity", [&] {
          return clear_cover_from_threshold(alphabet_x_, alphabet_y_, similarity_->parameter)
              .cover();
        });
        break;
    }
  }
  if (distortion_) {
    switch (distortion_->kind) {
      case DistortionSpec::Kind::kExplicit:
        check_shape(distortion_->matrix, nx, ny, "distortion");
        distortion_matrix_ =
            in_field("distortion", [&] { return DistortionMatrix(distortion_->matrix); });
        break;
      case DistortionSpec::Kind::kSquared:
        distortion_matrix_ = squared_distortion(alphabet_x_, alphabet_y_);
        break;
      case DistortionSpec::Kind::kNeglogOfSimilarity:
        if (!cover_) fail("distortion", "neglog-of-similarity needs a similarity field");
        distortion_matrix_ = in_field("distortion", [&] { return neglog_distortion(*cover_); });
        break;
    }
  }
}

const SimilarityCover& ProblemFile::similarity() const {
  if (!cover_) fail("similarity", "missing (required by this command)");
  return *cover_;
}

const DistortionMatrix& ProblemFile::distortion() const {
  if (!distortion_matrix_) fail("distortion", "missing (required by this command)");
  return *distortion_matrix_;
}

ToleranceCover ProblemFile::tolerance_cover() const {
  const SimilarityCover& c = similarity();
  std::optional<double> radius;
  if (similarity_->kind == SimilaritySpec::Kind::kThreshold) radius = similarity_->parameter;
  return in_field("similarity", [&] { return ToleranceCover(c, radius); });
}

ProblemFile parse_problem(std::string_view text) {
  const json doc = parse_json(text);
  if (!doc.is_object()) throw ValidationError("problem file must be an object");
  reject_unknown(doc, "", {"source", "alphabet_x", "alphabet_y", "similarity", "distortion"});

  std::vector<double> probs = vector_at(required(doc, "source"), "source");
  Distribution source = in_field("source", [&] { return Distribution(std::move(probs)); });
  Alphabet ax = alphabet_at(required(doc, "alphabet_x"), "alphabet_x", "x");
  Alphabet ay = alphabet_at(required(doc, "alphabet_y"), "alphabet_y", "y");

  std::optional<SimilaritySpec> sim;
  if (const auto it = doc.find("similarity"); it != doc.end()) sim = similarity_at(*it);
  std::optional<DistortionSpec> dist;
  if (const auto it = doc.find("distortion"); it != doc.end()) dist = distortion_at(*it);

  return ProblemFile(std::move(source), std::move(ax), std::move(ay), std::move(sim),
                     std::move(dist));
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

ProblemFile load_problem(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  try {
    return parse_problem(text);
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

std::string write_problem(const ProblemFile& problem) {
  ordered_json doc;
  doc["source"] = std::vector<double>(problem.source().begin(), problem.source().end());
  doc["alphabet_x"] = alphabet_json(problem.alphabet_x());
  doc["alphabet_y"] = alphabet_json(problem.alphabet_y());
  if (const auto& s = problem.similarity_spec()) {
    switch (s->kind) {
      case SimilaritySpec::Kind::kExplicit:
        doc["similarity"] = matrix_json(s->matrix);
        break;
      case SimilaritySpec::Kind::kGaussian:
        doc["similarity"] = {{"kind", "gaussian"}, {"sigma", s->parameter}};
        break;
      case SimilaritySpec::Kind::kThreshold:
        doc["similarity"] = {{"kind", "threshold"}, {"radius", s->parameter}};
        break;
    }
  }
  if (const auto& d = problem.distortion_spec()) {
    switch (d->kind) {
      case DistortionSpec::Kind::kExplicit:
        doc["distortion"] = matrix_json(d->matrix);
        break;
      case DistortionSpec::Kind::kSquared:
        doc["distortion"] = {{"kind", "squared"}};
        break;
      case DistortionSpec::Kind::kNeglogOfSimilarity:
        doc["distortion"] = {{"kind", "neglog-of-similarity"}};
        break;
    }
  }
  return doc.dump(2) + "\n";
}

Channel parse_channel(std::string_view text) {
  const json doc = parse_json(text);
  if (doc.is_array()) return in_field("channel", [&] { return Channel(matrix_at(doc, "channel")); });
  if (!doc.is_object()) throw ValidationError("channel file must be an object or an array");
  reject_unknown(doc, "", {"channel"});
  const Matrix m = matrix_at(required(doc, "channel"), "channel");
  return in_field("channel", [&] { return Channel(m); });
}

Channel load_channel(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  try {
    return parse_channel(text);
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

}  // namespace ratetol
