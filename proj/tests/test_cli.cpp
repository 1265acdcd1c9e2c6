#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "tlr/dataset.hpp"
#include "tlr/experiment.hpp"
#include "tlr/solver.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "tlr-adapt");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = tlr::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch() {
  const auto dir = fs::temp_directory_path() / "tlr_test_cli";
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("synth writes a labeled pair") {
  const auto dir = scratch();
  const auto r = run({"synth", "--classes", "3", "--n", "12", "--dim", "5", "--rotation", "30",
                      "--seed", "7", "--out-prefix", (dir / "s_").string()});
  REQUIRE(r.code == 0);
  tlr::CsvOptions o;
  o.label_last = true;
  const auto src = tlr::load_csv(dir / "s_source.csv", o);
  const auto tgt = tlr::load_csv(dir / "s_target.csv", o);
  CHECK(src.rows() == 36);
  CHECK(src.dim() == 5);
  CHECK(tgt.rows() == 36);
  tlr::ShiftSpec spec;
  spec.classes = 3;
  spec.n_per_class = 12;
  spec.dim = 5;
  spec.rotation_deg = 30;
  CHECK(src.features() == tlr::synth_shift_pair(spec, 7).source.features());
}

TEST_CASE("fit writes a loadable model") {
  const auto dir = scratch();
  REQUIRE(run({"synth", "--classes", "2", "--n", "15", "--dim", "4", "--seed", "1", "--out-prefix",
               (dir / "f_").string()})
              .code == 0);
  const auto r = run({"fit", "--source", (dir / "f_source.csv").string(), "--target",
                      (dir / "f_target.csv").string(), "--labels", "last", "--alpha", "0.1",
                      "--beta", "0.01", "--k", "5", "--kernel", "linear", "--out",
                      (dir / "model.bin").string(), "--predictions", (dir / "pred.txt").string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("target accuracy:") != std::string::npos);
  const auto model = tlr::load_model(dir / "model.bin");
  CHECK(model.w.rows() == 60);
  CHECK(model.w.cols() == 5);
  CHECK(model.hyper.alpha == 0.1);
  CHECK(model.hyper.beta == 0.01);
  std::istringstream preds(slurp(dir / "pred.txt"));
  int lines = 0;
  for (std::string line; std::getline(preds, line);) ++lines;
  CHECK(lines == 30);

  const auto rbf = run({"fit", "--source", (dir / "f_source.csv").string(), "--target",
                        (dir / "f_target.csv").string(), "--kernel", "rbf", "--bandwidth", "2.5",
                        "--k", "3"});
  CHECK(rbf.code == 0);
  CHECK(rbf.out.find("rbf(sigma=2.5)") != std::string::npos);
}

TEST_CASE("bench is deterministic and honors the config file") {
  const auto dir = scratch();
  REQUIRE(run({"synth", "--classes", "3", "--n", "20", "--dim", "6", "--seed", "2", "--out-prefix",
               (dir / "b_").string()})
              .code == 0);
  const std::vector<std::string> common = {
      "bench", "--source", (dir / "b_source.csv").string(), "--target",
      (dir / "b_target.csv").string(), "--grid", "custom", "--alphas", "0.001,1", "--betas",
      "0.01,1", "--ks", "5,10,200", "--runs", "3", "--per-class", "15", "--seed", "42"};
  auto serial = common;
  serial.insert(serial.end(), {"--threads", "1", "--report", (dir / "serial.csv").string()});
  auto parallel = common;
  parallel.insert(parallel.end(), {"--threads", "4", "--report", (dir / "parallel.csv").string()});
  auto again = common;
  again.insert(again.end(), {"--report", (dir / "again.csv").string()});

  const auto rs = run(serial);
  REQUIRE(rs.code == 0);
  CHECK(rs.err.find("warning: skipped") != std::string::npos);  // k = 200 >= 45 + 60
  REQUIRE(run(parallel).code == 0);
  REQUIRE(run(again).code == 0);
  const std::string csv = slurp(dir / "serial.csv");
  CHECK(csv == slurp(dir / "parallel.csv"));
  CHECK(csv == slurp(dir / "again.csv"));
  CHECK(csv.rfind("pair,alpha,beta,k,run,accuracy\n", 0) == 0);
  const auto parsed = tlr::parse_report_csv(csv);
  REQUIRE(parsed.size() == 1);
  CHECK(parsed[0].pair_id == "b_source->b_target");
  CHECK(parsed[0].records.size() == 8);

  // The same run driven from a key=value file; a flag on the command line wins.
  std::ofstream cfg(dir / "bench.ini");
  cfg << "[bench]\n"
      << "source=" << (dir / "b_source.csv").string() << "\n"
      << "target=" << (dir / "b_target.csv").string() << "\n"
      << "grid=custom\nalphas=0.001,1\nbetas=0.01,1\nks=5,10,200\nruns=3\nper-class=15\n"
      << "seed=1\nreport=" << (dir / "cfg.csv").string() << "\n";
  cfg.close();
  const auto rc = run({"--config", (dir / "bench.ini").string(), "bench", "--seed", "42"});
  REQUIRE(rc.code == 0);
  CHECK(slurp(dir / "cfg.csv") == csv);

  auto md = common;
  md.insert(md.end(), {"--format", "markdown", "--report", (dir / "r.md").string()});
  REQUIRE(run(md).code == 0);
  CHECK(slurp(dir / "r.md").find("**") != std::string::npos);
}

TEST_CASE("errors give a diagnostic and a nonzero exit code") {
  const auto dir = scratch();
  auto r = run({"fit", "--source", (dir / "missing.csv").string(), "--target",
                (dir / "missing.csv").string()});
  CHECK(r.code != 0);
  CHECK(r.err.rfind("error:", 0) == 0);

  r = run({"bench", "--source", "x"});
  CHECK(r.code != 0);
  CHECK_FALSE(r.err.empty());

  r = run({"nonsense"});
  CHECK(r.code != 0);

  std::ofstream(dir / "bad.csv") << "1.0,x,0\n";
  r = run({"fit", "--source", (dir / "bad.csv").string(), "--target", (dir / "bad.csv").string()});
  CHECK(r.code != 0);
  CHECK(r.err.find("row 1, column 2") != std::string::npos);
}

TEST_CASE("the installed binary runs") {
  const char* exe = std::getenv("TLR_ADAPT");
  if (exe == nullptr) return;
  const auto dir = scratch();
  const std::string cmd = std::string(exe) + " synth --classes 2 --n 5 --dim 3 --out-prefix " +
                          (dir / "bin_").string() + " > /dev/null";
  CHECK(std::system(cmd.c_str()) == 0);
  CHECK(fs::exists(dir / "bin_source.csv"));
  CHECK(std::system((std::string(exe) + " fit --source nope.csv --target nope.csv 2> /dev/null").c_str()) != 0);
}
