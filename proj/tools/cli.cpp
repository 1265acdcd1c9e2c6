#include "cli.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "tlr/tlr.hpp"

namespace tlr::cli {
namespace {

struct InputFlags {
  std::string source;
  std::string target;
  std::string labels = "last";
  bool header = false;
  std::string zscore = "per-domain";
  std::string kernel = "linear";
  std::string bandwidth = "auto";
};

void add_input_flags(CLI::App& cmd, InputFlags& f) {
  cmd.add_option("--source", f.source, "Source CSV (labeled)")->required();
  cmd.add_option("--target", f.target, "Target CSV")->required();
  cmd.add_option("--labels", f.labels, "Label column: last, none, or a 0-based index")
      ->capture_default_str();
  cmd.add_flag("--header", f.header, "Skip the first line of each CSV");
  cmd.add_option("--zscore", f.zscore, "Standardization: per-domain, pooled or none")
      ->check(CLI::IsMember({"per-domain", "pooled", "none"}))
      ->capture_default_str();
  cmd.add_option("--kernel", f.kernel, "Kernel for K")
      ->check(CLI::IsMember({"linear", "rbf"}))
      ->capture_default_str();
  cmd.add_option("--bandwidth", f.bandwidth, "rbf bandwidth: auto (median heuristic) or a value")
      ->capture_default_str();
}

CsvOptions csv_options(const InputFlags& f) {
  CsvOptions o;
  o.skip_header = f.header;
  if (f.labels == "last") {
    o.label_last = true;
  } else if (f.labels != "none") {
    std::size_t pos = 0;
    const unsigned long idx = std::stoul(f.labels, &pos);
    if (pos != f.labels.size()) throw std::invalid_argument("bad --labels value " + f.labels);
    o.label_column = idx;
  }
  return o;
}

ZScoreMode zscore_mode(const std::string& s) {
  if (s == "pooled") return ZScoreMode::kPooled;
  if (s == "none") return ZScoreMode::kNone;
  return ZScoreMode::kPerDomain;
}

KernelSpec kernel_spec(const InputFlags& f) {
  KernelSpec spec;
  spec.kind = parse_kernel_kind(f.kernel);
  if (spec.kind == KernelKind::kRbf && f.bandwidth != "auto") {
    std::size_t pos = 0;
    spec.bandwidth = std::stod(f.bandwidth, &pos);
    if (pos != f.bandwidth.size() || !(*spec.bandwidth > 0)) {
      throw std::invalid_argument("bad --bandwidth value " + f.bandwidth);
    }
  }
  return spec;
}

DomainPair load_pair(const InputFlags& f) {
  const CsvOptions o = csv_options(f);
  if (!o.label_last && !o.label_column) {
    throw std::invalid_argument("the source needs labels; pass --labels last or an index");
  }
  return DomainPair(load_csv(f.source, o), load_csv(f.target, o));
}

std::string stem(const std::string& path) { return std::filesystem::path(path).stem().string(); }

struct FitFlags {
  InputFlags in;
  double alpha = 1.0;
  double beta = 1.0;
  long k = 10;
  double ridge = 0.0;
  std::string normalization = "iplusb";
  std::string out;
  std::string predictions;
};

int run_fit(const FitFlags& f, std::ostream& out) {
  const DomainPair pair = standardize(load_pair(f.in), zscore_mode(f.in.zscore));
  TlrHyperparams hyper;
  hyper.alpha = f.alpha;
  hyper.beta = f.beta;
  hyper.k = f.k;
  hyper.ridge = f.ridge;
  hyper.normalization = f.normalization == "a" ? Normalization::kA : Normalization::kIPlusB;
  const FitResult result = fit(pair, kernel_spec(f.in), hyper);

  const PredictionResult pred =
      pair.target.has_labels()
          ? knn1_predict(result.latent_source, *pair.source.labels(), result.latent_target,
                         *pair.target.labels())
          : knn1_predict(result.latent_source, *pair.source.labels(), result.latent_target);

  out << "kernel: " << result.model.kernel.describe() << "\n";
  out << "n_source: " << pair.source.rows() << ", n_target: " << pair.target.rows()
      << ", k: " << hyper.k << "\n";
  out << "leading eigenvalue: " << format_number(result.model.eigenvalues(0))
      << ", trailing eigenvalue: "
      << format_number(result.model.eigenvalues(result.model.eigenvalues.size() - 1)) << "\n";
  const MmdMatrix l = mmd_matrix(pair.source.rows(), pair.target.rows());
  out << "mmd (kernel space): " << format_number(mmd_trace(result.kernel, l))
      << ", mmd (latent): " << format_number(mmd_latent(result.latent_source, result.latent_target))
      << "\n";
  out << "dispersion-normalized mmd (kernel space): "
      << format_number(normalized_mmd_trace(result.kernel, l)) << ", (latent): "
      << format_number(normalized_mmd_latent(result.latent_source, result.latent_target)) << "\n";
  if (pred.accuracy) out << "target accuracy: " << format_number(*pred.accuracy) << "\n";

  if (!f.out.empty()) {
    save_model(result.model, f.out);
    out << "model written to " << f.out << "\n";
  }
  if (!f.predictions.empty()) {
    std::ofstream p(f.predictions);
    if (!p) throw Error("cannot open " + f.predictions + " for writing");
    for (Label l : pred.predicted) p << l << "\n";
    if (!p) throw Error("failed writing " + f.predictions);
  }
  return 0;
}

struct BenchFlags {
  InputFlags in;
  std::string grid = "default";
  std::vector<double> alphas;
  std::vector<double> betas;
  std::vector<Eigen::Index> ks;
  std::size_t runs = 1;
  std::size_t per_class = 0;
  Seed seed = 0;
  std::string report;
  std::string format = "csv";
  int threads = 0;
  std::string pair;
  std::string pca = "per-domain";
};

GridSpec bench_grid(const BenchFlags& f) {
  GridSpec grid = GridSpec::default_grid();
  if (f.grid != "default" && f.alphas.empty() && f.betas.empty() && f.ks.empty()) {
    throw std::invalid_argument("--grid custom needs --alphas, --betas or --ks");
  }
  if (!f.alphas.empty()) grid.alphas = f.alphas;
  if (!f.betas.empty()) grid.betas = f.betas;
  if (!f.ks.empty()) grid.ks = f.ks;
  grid.validate();
  return grid;
}

int run_bench(const BenchFlags& f, std::ostream& out, std::ostream& err) {
  const DomainPair raw = load_pair(f.in);
  const GridSpec grid = bench_grid(f);
  ProtocolOptions options;
  options.pair_id = f.pair.empty() ? stem(f.in.source) + "->" + stem(f.in.target) : f.pair;
  options.runs = f.runs;
  if (f.per_class > 0) options.per_class = f.per_class;
  options.seed = f.seed;
  options.zscore = zscore_mode(f.in.zscore);
  options.threads = f.threads;

  const ExperimentReport report = grid_search(raw, grid, kernel_spec(f.in), options);
  for (const auto& s : report.skipped) {
    err << "warning: skipped alpha=" << format_number(s.alpha) << " beta=" << format_number(s.beta)
        << " k=" << s.k << " (" << s.reason << ")\n";
  }

  const BaselineResult base =
      evaluate_baselines(standardize(raw, options.zscore), grid,
                         f.pca == "pooled" ? PcaMode::kPooled : PcaMode::kPerDomain);
  const auto& best = report.best_record();
  out << std::fixed << std::setprecision(4);
  out << "pair: " << report.pair_id << "\n";
  out << "configurations: " << report.records.size() << " evaluated, " << report.skipped.size()
      << " skipped, " << report.grid_size << " total\n";
  out << "best TLR: accuracy " << best.mean() << " (std " << best.stddev()
      << ") at alpha=" << format_number(best.alpha) << " beta=" << format_number(best.beta)
      << " k=" << best.k << "\n";
  out << "no adaptation 1-NN: " << base.no_adaptation << "\n";
  out << "PCA 1-NN: " << base.pca_best << " (k=" << base.pca_best_k << ")\n";
  out << "elapsed: " << std::setprecision(2) << report.seconds << " s\n";

  if (!f.report.empty()) {
    emit_report(report, f.format == "markdown" ? ReportFormat::kMarkdown : ReportFormat::kCsv,
                f.report);
    out << "report written to " << f.report << "\n";
  }
  return 0;
}

struct SynthFlags {
  ShiftSpec spec;
  Seed seed = 0;
  std::string prefix = "synth_";
};

int run_synth(const SynthFlags& f, std::ostream& out) {
  const DomainPair pair = synth_shift_pair(f.spec, f.seed);
  const std::string source = f.prefix + "source.csv";
  const std::string target = f.prefix + "target.csv";
  save_csv(pair.source, source);
  save_csv(pair.target, target);
  out << "wrote " << source << " and " << target << " (" << pair.source.rows() << " x "
      << pair.source.dim() << " each, label in last column)\n";
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Transfer latent representation for unsupervised domain adaptation", "tlr-adapt"};
  app.require_subcommand(1);
  app.set_config("--config", "", "key=value file; command-line flags take precedence");
  app.allow_config_extras(CLI::config_extras_mode::error);

  FitFlags fit_flags;
  auto* fit_cmd = app.add_subcommand("fit", "Fit TLR on one source/target pair");
  add_input_flags(*fit_cmd, fit_flags.in);
  fit_cmd->add_option("--alpha", fit_flags.alpha, "Source reconstruction weight")
      ->check(CLI::PositiveNumber)->capture_default_str();
  fit_cmd->add_option("--beta", fit_flags.beta, "Target reconstruction weight")
      ->check(CLI::PositiveNumber)->capture_default_str();
  fit_cmd->add_option("--k", fit_flags.k, "Latent dimension")->check(CLI::PositiveNumber)
      ->capture_default_str();
  fit_cmd->add_option("--ridge", fit_flags.ridge, "Diagonal added to A")
      ->check(CLI::NonNegativeNumber)->capture_default_str();
  fit_cmd->add_option("--normalization", fit_flags.normalization,
                      "Column normalization: iplusb (W'(I+B)W = I) or a (W'AW = I)")
      ->check(CLI::IsMember({"iplusb", "a"}))->capture_default_str();
  fit_cmd->add_option("--out", fit_flags.out, "Write the model here");
  fit_cmd->add_option("--predictions", fit_flags.predictions, "Write target predictions here");

  BenchFlags bench_flags;
  auto* bench_cmd = app.add_subcommand("bench", "Grid search with repeated runs and baselines");
  add_input_flags(*bench_cmd, bench_flags.in);
  bench_cmd->add_option("--grid", bench_flags.grid, "default, or custom with --alphas/--betas/--ks")
      ->check(CLI::IsMember({"default", "custom"}))->capture_default_str();
  bench_cmd->add_option("--alphas", bench_flags.alphas, "Comma-separated alpha values")
      ->delimiter(',');
  bench_cmd->add_option("--betas", bench_flags.betas, "Comma-separated beta values")
      ->delimiter(',');
  bench_cmd->add_option("--ks", bench_flags.ks, "Comma-separated latent dimensions")
      ->delimiter(',');
  bench_cmd->add_option("--runs", bench_flags.runs, "Repeated runs")->check(CLI::PositiveNumber)
      ->capture_default_str();
  bench_cmd->add_option("--per-class", bench_flags.per_class,
                        "Source samples drawn per class each run (0 = full source)")
      ->capture_default_str();
  bench_cmd->add_option("--seed", bench_flags.seed, "Seed")->capture_default_str();
  bench_cmd->add_option("--report", bench_flags.report, "Report path");
  bench_cmd->add_option("--format", bench_flags.format, "Report format")
      ->check(CLI::IsMember({"csv", "markdown"}))->capture_default_str();
  bench_cmd->add_option("--threads", bench_flags.threads, "Worker threads (0 = OpenMP default)")
      ->check(CLI::NonNegativeNumber)->capture_default_str();
  bench_cmd->add_option("--pair", bench_flags.pair, "Pair id in the report");
  bench_cmd->add_option("--pca", bench_flags.pca, "PCA baseline: per-domain or pooled")
      ->check(CLI::IsMember({"per-domain", "pooled"}))->capture_default_str();

  SynthFlags synth_flags;
  auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic shifted source/target pair");
  synth_cmd->add_option("--classes", synth_flags.spec.classes)->capture_default_str();
  synth_cmd->add_option("--n", synth_flags.spec.n_per_class, "Samples per class")
      ->capture_default_str();
  synth_cmd->add_option("--dim", synth_flags.spec.dim)->capture_default_str();
  synth_cmd->add_option("--rotation", synth_flags.spec.rotation_deg, "Degrees")
      ->capture_default_str();
  synth_cmd->add_option("--translation", synth_flags.spec.translation)->capture_default_str();
  synth_cmd->add_option("--noise", synth_flags.spec.noise_std)->capture_default_str();
  synth_cmd->add_option("--spread", synth_flags.spec.center_spread, "Class center spread")
      ->capture_default_str();
  synth_cmd->add_option("--seed", synth_flags.seed)->capture_default_str();
  synth_cmd->add_option("--out-prefix", synth_flags.prefix)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return e.get_exit_code() == 0 ? 2 : e.get_exit_code();
  }

  try {
    if (*fit_cmd) return run_fit(fit_flags, out);
    if (*bench_cmd) return run_bench(bench_flags, out, err);
    if (*synth_cmd) return run_synth(synth_flags, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace tlr::cli
