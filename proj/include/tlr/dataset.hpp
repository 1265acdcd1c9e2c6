#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "tlr/types.hpp"

namespace tlr {

/// Dense feature matrix, one sample per row, with optional class labels.
///
/// Construction validates the invariants (finite entries, non-empty, label
/// count matches rows, labels non-negative); instances are immutable after.
class LabeledMatrix {
 public:
  LabeledMatrix(Matrix features, std::optional<Labels> labels = std::nullopt);

  const Matrix& features() const noexcept { return features_; }
  const std::optional<Labels>& labels() const noexcept { return labels_; }
  bool has_labels() const noexcept { return labels_.has_value(); }
  /// Throws if the matrix carries no labels.
  const Labels& require_labels() const;

  Eigen::Index rows() const noexcept { return features_.rows(); }
  Eigen::Index dim() const noexcept { return features_.cols(); }

 private:
  Matrix features_;
  std::optional<Labels> labels_;
};

/// Labeled source plus target; target labels are only used for scoring.
struct DomainPair {
  DomainPair(LabeledMatrix source, LabeledMatrix target);

  LabeledMatrix source;
  LabeledMatrix target;
};

struct ZScoreStats {
  Vector mean;
  Vector std;
};

inline constexpr double kStdFloor = 1e-8;

struct CsvOptions {
  /// Zero-based column holding the label; nullopt for unlabeled files.
  std::optional<std::size_t> label_column;
  /// Use the last field as the label (overrides label_column).
  bool label_last = false;
  bool skip_header = false;
};

LabeledMatrix load_csv(const std::filesystem::path& path, const CsvOptions& options = {});
LabeledMatrix parse_csv(const std::string& text, const CsvOptions& options = {});
void save_csv(const LabeledMatrix& data, const std::filesystem::path& path);

/// Column means and population standard deviations, floored at kStdFloor.
ZScoreStats zscore_fit(const LabeledMatrix& data);
/// Stats over the rows of several matrices stacked together.
ZScoreStats zscore_fit_pooled(const LabeledMatrix& a, const LabeledMatrix& b);
LabeledMatrix zscore_apply(const LabeledMatrix& data, const ZScoreStats& stats);

enum class ZScoreMode { kPerDomain, kPooled, kNone };
DomainPair standardize(const DomainPair& pair, ZScoreMode mode);

/// Draws min(per_class, class size) rows from every class without replacement.
/// Output is grouped by ascending class id, rows within a class in draw order.
LabeledMatrix sample_per_class(const LabeledMatrix& data, std::size_t per_class, Seed seed);

struct ShiftSpec {
  std::size_t n_per_class = 100;
  std::size_t dim = 20;
  std::size_t classes = 4;
  double rotation_deg = 30.0;
  double translation = 1.0;
  double noise_std = 0.5;
  /// Per-coordinate standard deviation used to place the class centers.
  double center_spread = 0.5;
};

/// Gaussian blobs for the source; the target redraws the same blobs, rotates
/// the first two coordinates by rotation_deg and adds `translation` to every
/// coordinate.
DomainPair synth_shift_pair(const ShiftSpec& spec, Seed seed);

/// The class centers synth_shift_pair uses for `seed` (classes x dim).
Matrix synth_centers(const ShiftSpec& spec, Seed seed);

}  // namespace tlr
