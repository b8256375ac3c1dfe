#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gafs/experiment.hpp"
#include "gafs/io.hpp"

using namespace gafs;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("gafs-test-" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string usage_message(const std::string& text) {
  try {
    parse_config(text);
  } catch (const UsageError& e) {
    return e.what();
  }
  return "";
}

int cli(const std::string& args) {
  const int status = std::system((std::string(GAF_SPECTRA_BIN) + " " + args + " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("config errors name the field") {
  CHECK(usage_message("") != "");
  CHECK(usage_message("experiment = moments\nbogus = 1\n").find("bogus") != std::string::npos);
  CHECK(usage_message("experiment = moments\nn = 0\n").find("n") != std::string::npos);
  CHECK(usage_message("experiment = critical-time\nq = 1.5\n").find("q") != std::string::npos);
  CHECK(usage_message("experiment = tightness\nz_grid = 0.99\n").find("z_grid") != std::string::npos);
  CHECK(usage_message("experiment = nope\n") != "");
  CHECK(usage_message("experiment = moments\nn = 4\nn = 5\n").find("twice") != std::string::npos);
  CHECK(usage_message("experiment = moments  # comment\nn = 4\n") == "");
}

TEST_CASE("config values") {
  const ExperimentConfig c = parse_config(
      "experiment = coefficients\nmodel = vdv\nlaw = wrapped-normal\nlaw_growth = log\nn = 64\na = 0.5,-1\n"
      "moments = 1^2;1^2\nk_max = 2\nworkers = 2\n");
  CHECK(c.experiment == ExperimentKind::Coefficients);
  CHECK(c.model == BaseKind::VDVStar);
  CHECK(c.a == Complex{0.5, -1.0});
  CHECK(c.workers == 2);
  REQUIRE(c.moments.size() == 1);
  CHECK(c.moments[0].label() == "1^2;1^2");
  CHECK(std::abs(c.model_spec().law.moment(1)) == doctest::Approx(0.125));
  CHECK_THROWS_AS(parse_config("experiment = coefficients\nmodel = vdv\nlaw = wrapped-normal\nlaw_spread = 1\n"),
                  UsageError);
}

TEST_CASE("schemas") {
  for (ExperimentKind k : all_experiments()) {
    const std::string s = schema(k);
    CHECK(s.rfind("results.csv: experiment_id,quantity,value_re,value_im,stderr,samples,reference_value,pass", 0) == 0);
    CHECK(parse_experiment(to_string(k)) == k);
  }
}

TEST_CASE("runs are byte-identical across worker counts") {
  const std::string base = "experiment = oracle-equivalence\nn = 12\nsamples = 30\nseed = 5\n";
  ExperimentConfig c1 = parse_config(base + "workers = 1\n");
  ExperimentConfig c3 = parse_config(base + "workers = 3\n");
  c1.out_dir = scratch("w1");
  c3.out_dir = scratch("w3");
  const RunSummary s1 = run(c1);
  run(c3);
  CHECK(s1.all_pass());
  for (const std::string name : {"results.csv", "oracle.csv"}) {
    REQUIRE(fs::exists(c1.out_dir / name));
    CHECK(slurp(c1.out_dir / name) == slurp(c3.out_dir / name));
  }
  const std::string results = slurp(c1.out_dir / "results.csv");
  CHECK(results.rfind("experiment_id,quantity,", 0) == 0);
  CHECK(fs::exists(c1.out_dir / "summary.json"));
}

TEST_CASE("csv formatting") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CsvTable t({"a", "b"});
  t.add_row({"1", "2"});
  CHECK(t.str() == "a,b\n1,2\n");
  CHECK_THROWS(t.add_row({"1"}));
}

TEST_CASE("command line exit codes") {
  const fs::path dir = scratch("cli");
  std::ofstream(dir / "ok.cfg") << "experiment = supnorm-check\nsamples = 5\n";
  std::ofstream(dir / "bad.cfg") << "experiment = supnorm-check\nsamples = -1\n";
  std::ofstream(dir / "fail.cfg") << "experiment = separation-sweep\nn = 16\nalpha = 0.3\nsamples = 3\n"
                                  << "rho_in = 0.001\nrho_out = 0.002\n";
  const std::string out = " --out " + (dir / "out").string();
  CHECK(cli("run " + (dir / "ok.cfg").string() + out) == 0);
  CHECK(cli("run " + (dir / "bad.cfg").string() + out) == 2);
  CHECK(fs::exists(dir / "out" / "error.json"));
  CHECK(cli("run " + (dir / "fail.cfg").string() + out) == 1);
  CHECK(cli("run " + (dir / "missing.cfg").string()) == 2);
  CHECK(cli("run " + (dir / "ok.cfg").string() + " --seed -3") == 2);
  CHECK(cli("frobnicate") == 2);
  CHECK(cli("schema gaf-compare") == 0);
  CHECK(cli("schema nope") == 2);
}
