#pragma once

// Declarative problem description read by the command-line tool.
//
//   {
//     "source": [0.25, 0.25, 0.25, 0.25],
//     "alphabet_x": {"labels": ["x1", "x2", "x3", "x4"], "values": [1, 2, 3, 4]},
//     "alphabet_y": {"values": [1, 2, 3, 4]},
//     "similarity": {"kind": "threshold", "radius": 1},
//     "distortion": {"kind": "squared"}
//   }
//
// "similarity" is an explicit matrix (array of rows) or a generator:
// {"kind": "gaussian", "sigma": s} or {"kind": "threshold", "radius": r}.
// "distortion" is an explicit matrix, where the string "inf" marks a
// forbidden pair, or {"kind": "squared"} or {"kind": "neglog-of-similarity"}.
// Both are optional; labels default to x1.. and y1...

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "ratetol/info_core.hpp"
#include "ratetol/matrix.hpp"
#include "ratetol/rate_distortion.hpp"
#include "ratetol/rate_tolerance.hpp"

namespace ratetol {

struct SimilaritySpec {
  enum class Kind { kExplicit, kGaussian, kThreshold };
  Kind kind = Kind::kExplicit;
  Matrix matrix;           // kExplicit only
  double parameter = 0.0;  // sigma or radius

  friend bool operator==(const SimilaritySpec&, const SimilaritySpec&) = default;
};

struct DistortionSpec {
  enum class Kind { kExplicit, kSquared, kNeglogOfSimilarity };
  Kind kind = Kind::kExplicit;
  Matrix matrix;  // kExplicit only

  friend bool operator==(const DistortionSpec&, const DistortionSpec&) = default;
};

class ProblemFile {
 public:
  // Validates every field and materializes the generators; throws
  // ValidationError naming the offending field.
  ProblemFile(Distribution source, Alphabet alphabet_x, Alphabet alphabet_y,
              std::optional<SimilaritySpec> similarity,
              std::optional<DistortionSpec> distortion);

  const Distribution& source() const noexcept { return source_; }
  const Alphabet& alphabet_x() const noexcept { return alphabet_x_; }
  const Alphabet& alphabet_y() const noexcept { return alphabet_y_; }
  const std::optional<SimilaritySpec>& similarity_spec() const noexcept { return similarity_; }
  const std::optional<DistortionSpec>& distortion_spec() const noexcept { return distortion_; }

  // These throw ValidationError when the field is absent.
  const SimilarityCover& similarity() const;
  const DistortionMatrix& distortion() const;
  // Requires an exact 1 in every row; threshold generators keep their radius.
  ToleranceCover tolerance_cover() const;

  friend bool operator==(const ProblemFile& a, const ProblemFile& b) {
    return a.source_ == b.source_ && a.alphabet_x_ == b.alphabet_x_ &&
           a.alphabet_y_ == b.alphabet_y_ && a.similarity_ == b.similarity_ &&
           a.distortion_ == b.distortion_;
  }

 private:
  Distribution source_;
  Alphabet alphabet_x_;
  Alphabet alphabet_y_;
  std::optional<SimilaritySpec> similarity_;
  std::optional<DistortionSpec> distortion_;
  std::optional<SimilarityCover> cover_;
  std::optional<DistortionMatrix> distortion_matrix_;
};

ProblemFile parse_problem(std::string_view text);
ProblemFile load_problem(const std::filesystem::path& path);
// Output re-parses to an equal ProblemFile.
std::string write_problem(const ProblemFile& problem);

// {"channel": [[...], ...]} or a bare array of rows.
Channel parse_channel(std::string_view text);
Channel load_channel(const std::filesystem::path& path);

// Whole file as text; ValidationError if it cannot be opened.
std::string read_text_file(const std::filesystem::path& path);

}  // namespace ratetol
