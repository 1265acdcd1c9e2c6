#include "tlr/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string_view>

#include "tlr/experiment.hpp"

namespace tlr {

LabeledMatrix::LabeledMatrix(Matrix features, std::optional<Labels> labels)
    : features_(std::move(features)), labels_(std::move(labels)) {
  if (features_.rows() < 1 || features_.cols() < 1) {
    throw DimensionError("feature matrix must have at least one row and one column");
  }
  if (!features_.allFinite()) throw NumericalError("feature matrix has non-finite entries");
  if (labels_) {
    if (static_cast<Eigen::Index>(labels_->size()) != features_.rows()) {
      throw DimensionError("label count " + std::to_string(labels_->size()) +
                           " does not match row count " + std::to_string(features_.rows()));
    }
    if (std::any_of(labels_->begin(), labels_->end(), [](Label l) { return l < 0; })) {
      throw std::invalid_argument("labels must be non-negative");
    }
  }
}

const Labels& LabeledMatrix::require_labels() const {
  if (!labels_) throw std::invalid_argument("labels are required but absent");
  return *labels_;
}

DomainPair::DomainPair(LabeledMatrix src, LabeledMatrix tgt)
    : source(std::move(src)), target(std::move(tgt)) {
  if (source.dim() != target.dim()) {
    throw DimensionError("source has " + std::to_string(source.dim()) +
                         " features but target has " + std::to_string(target.dim()));
  }
  if (source.require_labels().empty()) throw std::invalid_argument("source label set is empty");
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string_view::npos ? comma : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

double parse_real(std::string_view field, std::size_t row, std::size_t col) {
  double value = 0;
  // from_chars rejects a leading '+', which some writers emit.
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size() || field.empty()) {
    throw ParseError("row " + std::to_string(row) + ", column " + std::to_string(col) +
                         ": cannot parse '" + std::string(field) + "' as a number",
                     row, col);
  }
  if (!std::isfinite(value)) {
    throw ParseError("row " + std::to_string(row) + ", column " + std::to_string(col) +
                         ": non-finite value '" + std::string(field) + "'",
                     row, col);
  }
  return value;
}

Label parse_label(std::string_view field, std::size_t row, std::size_t col) {
  long long value = -1;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size() || field.empty() || value < 0 ||
      value > std::numeric_limits<Label>::max()) {
    throw ParseError("row " + std::to_string(row) + ", column " + std::to_string(col) +
                         ": label '" + std::string(field) + "' is not a non-negative integer",
                     row, col);
  }
  return static_cast<Label>(value);
}

}  // namespace

LabeledMatrix parse_csv(const std::string& text, const CsvOptions& options) {
  std::vector<std::vector<double>> rows;
  Labels labels;
  std::optional<std::size_t> width;
  std::size_t line_no = 0;
  bool header_pending = options.skip_header;
  const bool labeled = options.label_last || options.label_column.has_value();

  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    if (header_pending) {
      header_pending = false;
      continue;
    }
    const auto fields = split_fields(line);
    if (!width) {
      width = fields.size();
      if (labeled && *width < 2) {
        throw ParseError("row " + std::to_string(line_no) +
                             ": a labeled file needs at least one feature column",
                         line_no, 0);
      }
      if (options.label_column && !options.label_last && *options.label_column >= *width) {
        throw ParseError("row " + std::to_string(line_no) + ": label column " +
                             std::to_string(*options.label_column + 1) + " is out of range",
                         line_no, 0);
      }
    } else if (fields.size() != *width) {
      throw ParseError("row " + std::to_string(line_no) + ": expected " + std::to_string(*width) +
                           " fields, found " + std::to_string(fields.size()),
                       line_no, 0);
    }
    std::optional<std::size_t> label_at;
    if (options.label_last) {
      label_at = *width - 1;
    } else {
      label_at = options.label_column;
    }

    std::vector<double> values;
    values.reserve(fields.size());
    for (std::size_t c = 0; c < fields.size(); ++c) {
      if (label_at && c == *label_at) {
        labels.push_back(parse_label(fields[c], line_no, c + 1));
      } else {
        values.push_back(parse_real(fields[c], line_no, c + 1));
      }
    }
    rows.push_back(std::move(values));
  }
  if (rows.empty()) throw ParseError("no data rows", 0, 0);

  Matrix features(static_cast<Eigen::Index>(rows.size()),
                  static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      features(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    }
  }
  if (labeled) return LabeledMatrix(std::move(features), std::move(labels));
  return LabeledMatrix(std::move(features));
}

LabeledMatrix load_csv(const std::filesystem::path& path, const CsvOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw Error("failed reading " + path.string());
  return parse_csv(buffer.str(), options);
}

void save_csv(const LabeledMatrix& data, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  const Matrix& x = data.features();
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      if (j) out << ',';
      out << format_number(x(i, j));
    }
    if (data.has_labels()) out << ',' << (*data.labels())[static_cast<std::size_t>(i)];
    out << '\n';
  }
  if (!out) throw Error("failed writing " + path.string());
}

namespace {

ZScoreStats stats_of(const Matrix& x) {
  ZScoreStats stats;
  const double n = static_cast<double>(x.rows());
  stats.mean = x.colwise().sum().transpose() / n;
  stats.std.resize(x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const double var = (x.col(j).array() - stats.mean(j)).square().sum() / n;
    stats.std(j) = std::max(std::sqrt(var), kStdFloor);
  }
  return stats;
}

}  // namespace

ZScoreStats zscore_fit(const LabeledMatrix& data) { return stats_of(data.features()); }

ZScoreStats zscore_fit_pooled(const LabeledMatrix& a, const LabeledMatrix& b) {
  if (a.dim() != b.dim()) throw DimensionError("pooled z-score needs matching dimensions");
  Matrix stacked(a.rows() + b.rows(), a.dim());
  stacked << a.features(), b.features();
  return stats_of(stacked);
}

LabeledMatrix zscore_apply(const LabeledMatrix& data, const ZScoreStats& stats) {
  if (stats.mean.size() != data.dim() || stats.std.size() != data.dim()) {
    throw DimensionError("z-score stats have dimension " + std::to_string(stats.mean.size()) +
                         ", data has " + std::to_string(data.dim()));
  }
  Matrix out = data.features();
  for (Eigen::Index j = 0; j < out.cols(); ++j) {
    out.col(j) = (out.col(j).array() - stats.mean(j)) / stats.std(j);
  }
  return LabeledMatrix(std::move(out), data.labels());
}

DomainPair standardize(const DomainPair& pair, ZScoreMode mode) {
  switch (mode) {
    case ZScoreMode::kPerDomain:
      return DomainPair(zscore_apply(pair.source, zscore_fit(pair.source)),
                        zscore_apply(pair.target, zscore_fit(pair.target)));
    case ZScoreMode::kPooled: {
      const auto stats = zscore_fit_pooled(pair.source, pair.target);
      return DomainPair(zscore_apply(pair.source, stats), zscore_apply(pair.target, stats));
    }
    case ZScoreMode::kNone:
      break;
  }
  return pair;
}

LabeledMatrix sample_per_class(const LabeledMatrix& data, std::size_t per_class, Seed seed) {
  const Labels& labels = data.require_labels();
  std::map<Label, std::vector<Eigen::Index>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    by_class[labels[i]].push_back(static_cast<Eigen::Index>(i));
  }

  std::mt19937_64 rng(seed);
  std::vector<Eigen::Index> picked;
  Labels picked_labels;
  for (auto& [label, members] : by_class) {
    const std::size_t take = std::min(per_class, members.size());
    // Partial Fisher-Yates: the first `take` slots become the draw.
    for (std::size_t i = 0; i < take; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, members.size() - 1);
      std::swap(members[i], members[pick(rng)]);
      picked.push_back(members[i]);
      picked_labels.push_back(label);
    }
  }

  Matrix out(static_cast<Eigen::Index>(picked.size()), data.dim());
  for (std::size_t r = 0; r < picked.size(); ++r) {
    out.row(static_cast<Eigen::Index>(r)) = data.features().row(picked[r]);
  }
  return LabeledMatrix(std::move(out), std::move(picked_labels));
}

namespace {

// Independent generator streams derived from one user seed.
std::mt19937_64 stream(Seed seed, std::uint64_t which) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(which)};
  return std::mt19937_64(seq);
}

void validate_shift(const ShiftSpec& spec) {
  if (spec.dim < 2) throw std::invalid_argument("synthetic data needs dim >= 2");
  if (spec.classes < 2) throw std::invalid_argument("synthetic data needs at least 2 classes");
  if (spec.n_per_class < 1) throw std::invalid_argument("synthetic data needs n_per_class >= 1");
  if (!(spec.noise_std >= 0) || !std::isfinite(spec.noise_std)) {
    throw std::invalid_argument("noise_std must be a finite non-negative number");
  }
  if (!std::isfinite(spec.rotation_deg) || !std::isfinite(spec.translation)) {
    throw std::invalid_argument("rotation and translation must be finite");
  }
}

Matrix draw_blobs(const Matrix& centers, std::size_t n_per_class, double noise,
                  std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix x(centers.rows() * static_cast<Eigen::Index>(n_per_class), centers.cols());
  for (Eigen::Index c = 0; c < centers.rows(); ++c) {
    for (std::size_t s = 0; s < n_per_class; ++s) {
      const Eigen::Index row = c * static_cast<Eigen::Index>(n_per_class) +
                               static_cast<Eigen::Index>(s);
      for (Eigen::Index j = 0; j < centers.cols(); ++j) {
        x(row, j) = centers(c, j) + noise * normal(rng);
      }
    }
  }
  return x;
}

}  // namespace

Matrix synth_centers(const ShiftSpec& spec, Seed seed) {
  validate_shift(spec);
  auto rng = stream(seed, 0);
  std::normal_distribution<double> normal(0.0, spec.center_spread);
  Matrix centers(static_cast<Eigen::Index>(spec.classes), static_cast<Eigen::Index>(spec.dim));
  for (Eigen::Index c = 0; c < centers.rows(); ++c) {
    for (Eigen::Index j = 0; j < centers.cols(); ++j) centers(c, j) = normal(rng);
  }
  return centers;
}

DomainPair synth_shift_pair(const ShiftSpec& spec, Seed seed) {
  const Matrix centers = synth_centers(spec, seed);

  Labels labels;
  labels.reserve(spec.classes * spec.n_per_class);
  for (std::size_t c = 0; c < spec.classes; ++c) {
    labels.insert(labels.end(), spec.n_per_class, static_cast<Label>(c));
  }

  auto source_rng = stream(seed, 1);
  auto target_rng = stream(seed, 2);
  Matrix source = draw_blobs(centers, spec.n_per_class, spec.noise_std, source_rng);
  Matrix target = draw_blobs(centers, spec.n_per_class, spec.noise_std, target_rng);

  const double theta = spec.rotation_deg * std::numbers::pi / 180.0;
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  for (Eigen::Index i = 0; i < target.rows(); ++i) {
    const double x0 = target(i, 0);
    const double x1 = target(i, 1);
    target(i, 0) = c * x0 - s * x1;
    target(i, 1) = s * x0 + c * x1;
  }
  target.array() += spec.translation;

  return DomainPair(LabeledMatrix(std::move(source), labels),
                    LabeledMatrix(std::move(target), labels));
}

}  // namespace tlr
