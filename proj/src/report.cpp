#include <array>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "tlr/experiment.hpp"

namespace tlr {

std::string format_number(double value) {
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc()) throw Error("cannot format number");
  return std::string(buf.data(), ptr);
}

std::string format_report_csv(const ExperimentReport& report) {
  if (report.pair_id.find_first_of(",\n\r") != std::string::npos) {
    throw std::invalid_argument("pair id may not contain commas or newlines");
  }
  std::string out = "pair,alpha,beta,k,run,accuracy\n";
  for (const auto& rec : report.records) {
    for (std::size_t run = 0; run < rec.accuracies.size(); ++run) {
      out += report.pair_id;
      out += ',' + format_number(rec.alpha);
      out += ',' + format_number(rec.beta);
      out += ',' + std::to_string(rec.k);
      out += ',' + std::to_string(run + 1);
      out += ',' + format_number(rec.accuracies[run]);
      out += '\n';
    }
  }
  return out;
}

namespace {

std::string percent(double fraction) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(1) << 100.0 * fraction;
  return s.str();
}

}  // namespace

std::string format_report_markdown(const std::vector<ExperimentReport>& reports) {
  std::ostringstream out;
  out << "| Pair | Best accuracy (%) | alpha | beta | k |\n";
  out << "|---|---|---|---|---|\n";
  for (const auto& r : reports) {
    const auto& best = r.best_record();
    out << "| " << r.pair_id << " | **" << percent(best.mean()) << "** | "
        << format_number(best.alpha) << " | " << format_number(best.beta) << " | " << best.k
        << " |\n";
  }
  for (const auto& r : reports) {
    out << "\n### " << r.pair_id << "\n\n";
    out << "| alpha | beta | k | Mean accuracy (%) | Std (%) | Runs |\n";
    out << "|---|---|---|---|---|---|\n";
    for (std::size_t i = 0; i < r.records.size(); ++i) {
      const auto& rec = r.records[i];
      const std::string b = i == r.best ? "**" : "";
      out << "| " << b << format_number(rec.alpha) << b << " | " << b << format_number(rec.beta)
          << b << " | " << b << rec.k << b << " | " << b << percent(rec.mean()) << b << " | " << b
          << percent(rec.stddev()) << b << " | " << b << rec.accuracies.size() << b << " |\n";
    }
    if (!r.skipped.empty()) {
      out << "\n" << r.skipped.size() << " of " << r.grid_size
          << " configurations skipped (k >= n1 + n2).\n";
    }
  }
  return out.str();
}

void emit_report(const ExperimentReport& report, ReportFormat format,
                 const std::filesystem::path& path) {
  if (report.records.empty()) throw std::invalid_argument("cannot emit an empty report");
  const std::string text =
      format == ReportFormat::kCsv ? format_report_csv(report) : format_report_markdown({report});
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw Error("failed writing " + path.string());
}

namespace {

template <typename T>
T parse_field(std::string_view field, std::size_t line) {
  T value{};
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw ParseError("report line " + std::to_string(line) + ": bad field '" +
                         std::string(field) + "'",
                     line, 0);
  }
  return value;
}

}  // namespace

std::vector<ExperimentReport> parse_report_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line) || line != "pair,alpha,beta,k,run,accuracy") {
    throw ParseError("report header is missing or wrong", 1, 0);
  }
  std::vector<ExperimentReport> reports;
  std::map<std::string, std::size_t> report_index;
  std::vector<std::map<std::tuple<double, double, Eigen::Index>, std::size_t>> record_index;

  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string_view> fields;
    std::string_view rest(line);
    for (std::size_t pos; (pos = rest.find(',')) != std::string_view::npos;) {
      fields.push_back(rest.substr(0, pos));
      rest.remove_prefix(pos + 1);
    }
    fields.push_back(rest);
    if (fields.size() != 6) {
      throw ParseError("report line " + std::to_string(line_no) + ": expected 6 fields", line_no, 0);
    }
    const std::string pair(fields[0]);
    const auto alpha = parse_field<double>(fields[1], line_no);
    const auto beta = parse_field<double>(fields[2], line_no);
    const auto k = parse_field<long long>(fields[3], line_no);
    const auto run = parse_field<long long>(fields[4], line_no);
    const auto acc = parse_field<double>(fields[5], line_no);

    auto [rit, new_report] = report_index.emplace(pair, reports.size());
    if (new_report) {
      reports.emplace_back().pair_id = pair;
      record_index.emplace_back();
    }
    ExperimentReport& report = reports[rit->second];
    auto& index = record_index[rit->second];
    auto [it, new_record] =
        index.emplace(std::make_tuple(alpha, beta, static_cast<Eigen::Index>(k)),
                      report.records.size());
    if (new_record) report.records.push_back({alpha, beta, static_cast<Eigen::Index>(k), {}});
    auto& accs = report.records[it->second].accuracies;
    if (run != static_cast<long long>(accs.size()) + 1) {
      throw ParseError("report line " + std::to_string(line_no) + ": runs out of order", line_no, 0);
    }
    accs.push_back(acc);
  }
  for (auto& r : reports) {
    r.grid_size = r.records.size();
    for (std::size_t i = 1; i < r.records.size(); ++i) {
      if (r.records[i].mean() > r.records[r.best].mean()) r.best = i;
    }
  }
  return reports;
}

}  // namespace tlr
