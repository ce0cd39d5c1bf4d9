#include "shapelab/cli.hpp"
#include "shapelab/config.hpp"
#include "shapelab/csv.hpp"
#include "shapelab/errors.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace shapelab;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("shapelab_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

struct Run {
  int code;
  std::string out, err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

const std::string kConfigs = SHAPELAB_SOURCE_DIR "/configs/";

ExperimentConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in, "test");
}

}  // namespace

TEST_CASE("config parsing") {
  const ExperimentConfig c = parse(
      "; comment\n[domain]\nr0 = 1.5\na2 = 0.1\nb3 = -0.02\n[energy]\ntau = 0.01\nc_nl = 0.05\n"
      "[mesh]\nh = 0.03\n[optimizer]\nvolume = penalized\nmax_iter = 12\n[sweep]\nmodes = 2, 3\n"
      "amplitudes = 0.05,0.01\n[run]\nseed = 9\njobs = 2\n");
  REQUIRE(c.domain);
  CHECK(c.domain->r0() == 1.5);
  CHECK(c.domain->mode(2).a == 0.1);
  CHECK(c.domain->mode(3).b == -0.02);
  CHECK(c.energy.tau == 0.01);
  CHECK(c.energy.c_nl == 0.05);
  CHECK(c.mesh.h == 0.03);
  CHECK(c.optimizer.volume == VolumeMode::penalized);
  CHECK(c.optimizer.max_iter == 12);
  CHECK(c.sweep.modes == std::vector<int>{2, 3});
  CHECK(c.sweep.amplitudes == std::vector<double>{0.05, 0.01});
  CHECK(c.run.seed == 9);
  CHECK(c.run.jobs == 2);
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(parse("[domain]\nradius = 1\n"), ValidationError);
  CHECK_THROWS_AS(parse("[nothing]\nx = 1\n"), ValidationError);
  CHECK_THROWS_AS(parse("[mesh]\nh = abc\n"), ValidationError);
  CHECK_THROWS_AS(parse("[mesh]\nh = 0.02x\n"), ValidationError);
  CHECK_THROWS_AS(parse("[optimizer]\nvolume = free\n"), ValidationError);
  CHECK_THROWS_AS(parse("[energy]\neta = 2\n"), ValidationError);
  CHECK_THROWS_AS(parse("[run]\nseed = -1\n"), ValidationError);
  CHECK_THROWS_AS(parse("[domain]\na2 = 0.95\n"), InvalidDomain);
  CHECK_THROWS_AS(parse("h = 1\n"), ValidationError);
  CHECK_THROWS_AS(load_config("/nonexistent/file.cfg"), ValidationError);
  CHECK_THROWS_AS(parse_int_list("1,x"), ValidationError);
}

TEST_CASE("domains round-trip exactly") {
  const StarDomain d(Point(0.1, -1.0 / 3.0), 1.0 / 7.0, {{1, 1e-17, 0.0}, {5, 0.0, -0.0123456789012345678}});
  std::ostringstream s;
  write_domain(s, d);
  const ExperimentConfig c = parse(s.str());
  REQUIRE(c.domain);
  CHECK(c.domain->center() == d.center());
  CHECK(c.domain->r0() == d.r0());
  CHECK(c.domain->mode(1).a == d.mode(1).a);
  CHECK(c.domain->mode(5).b == d.mode(5).b);
  CHECK(domain_text(*c.domain) == s.str());
}

TEST_CASE("canonical text and hashing") {
  CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
  const ExperimentConfig a = parse("[run]\njobs = 1\noutput_dir = x\n");
  const ExperimentConfig b = parse("[run]\njobs = 4\noutput_dir = y\n");
  const ExperimentConfig c = parse("[run]\nseed = 1\n");
  CHECK(canonical_text(a) == canonical_text(b));
  CHECK(canonical_text(a) != canonical_text(c));
  // canonical text parses back to the same experiment
  CHECK(canonical_text(parse(canonical_text(c))) == canonical_text(c));
}

TEST_CASE("CSV formatting") {
  CHECK(csv_escape("plain") == "plain");
  CHECK(csv_escape("a,b") == "\"a,b\"");
  CHECK(csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(format_double(0.1) == "0.10000000000000001");
  CsvTable t({"name", "x", "n"});
  t.meta("seed", "3");
  t.row({std::string("a,b"), 1.5, 7LL});
  CHECK(t.text() == "# seed: 3\r\nname,x,n\r\n\"a,b\",1.5,7\r\n");
  CHECK_THROWS_AS(t.row({1.0}), ValidationError);
}

TEST_CASE("eig on the disk writes a CSV with a header block") {
  const fs::path dir = scratch_dir("eig");
  const Run r = cli({"eig", "--domain", kConfigs + "disk.cfg", "--h", "0.05", "--out", dir.string()});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("lambda1 = 5.7") != std::string::npos);
  const std::string csv = slurp(dir / "eig.csv");
  for (const char* key : {"# tool: shapelab ", "# command: eig", "# config_hash: ", "# seed: 0", "# h: 0.05",
                          "# energy: v=3.1415926535897931 vmax=", "lambda1,lambda2"})
    CHECK_MESSAGE(csv.find(key) != std::string::npos, key);
  fs::remove_all(dir);
}

TEST_CASE("validation failures exit with 2 and write nothing") {
  const fs::path dir = scratch_dir("missing");
  Run r = cli({"eig", "--domain", "missing.cfg", "--out", dir.string()});
  CHECK(r.code == kExitValidation);
  CHECK(!r.err.empty());
  CHECK_FALSE(fs::exists(dir));

  r = cli({"eig", "--out", dir.string()});
  CHECK(r.code == kExitValidation);
  r = cli({"frobnicate"});
  CHECK(r.code == kExitValidation);
  r = cli({"eig", "--domain", kConfigs + "disk.cfg", "--h", "-1", "--out", dir.string()});
  CHECK(r.code == kExitValidation);
  r = cli({"selection", "--domain", kConfigs + "disk.cfg", "--tau", "0", "--out", dir.string()});
  CHECK(r.code == kExitValidation);
  r = cli({"key-estimate", "--inner", kConfigs + "disk.cfg", "--outer", kConfigs + "disk_r09.cfg", "--h", "0.05",
           "--out", dir.string()});
  CHECK(r.code == kExitValidation);
  CHECK_FALSE(fs::exists(dir));
}

TEST_CASE("help and version") {
  Run r = cli({"--help"});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("hadamard-check") != std::string::npos);
  r = cli({"--version"});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find(tool_version()) != std::string::npos);
}

TEST_CASE("outputs are byte-identical across runs and worker counts") {
  const fs::path a = scratch_dir("det_a"), b = scratch_dir("det_b"), c = scratch_dir("det_c");
  const std::vector<std::string> base = {"hadamard-check", "--seed", "3", "--domains", "1", "--fields", "2", "--h", "0.05"};
  auto with = [&](const fs::path& dir, const std::string& jobs) {
    auto args = base;
    args.insert(args.end(), {"--out", dir.string(), "--jobs", jobs});
    return cli(args).code;
  };
  CHECK(with(a, "1") == kExitOk);
  CHECK(with(b, "1") == kExitOk);
  CHECK(with(c, "2") == kExitOk);
  const std::string ta = slurp(a / "hadamard.csv");
  CHECK(!ta.empty());
  CHECK(ta == slurp(b / "hadamard.csv"));
  CHECK(ta == slurp(c / "hadamard.csv"));

  // a different seed changes the hash
  const fs::path d = scratch_dir("det_d");
  auto args = base;
  args[2] = "4";
  args.insert(args.end(), {"--out", d.string()});
  CHECK(cli(args).code == kExitOk);
  const std::string td = slurp(d / "hadamard.csv");
  CHECK(td.substr(td.find("# config_hash"), 36) != ta.substr(ta.find("# config_hash"), 36));
  for (const auto& p : {a, b, c, d}) fs::remove_all(p);
}

TEST_CASE("subcommands run end to end") {
  const fs::path dir = scratch_dir("all");
  const std::string out = dir.string();
  const std::string disk = kConfigs + "disk.cfg";
  CHECK(cli({"torsion", "--domain", disk, "--h", "0.05", "--out", out}).code == kExitOk);
  CHECK(cli({"energy", "--domain", disk, "--h", "0.05", "--tau", "0.01", "--out", out}).code == kExitOk);
  CHECK(cli({"distances", "--domain", disk, "--h", "0.05", "--out", out}).code == kExitOk);
  CHECK(cli({"fb-residual", "--domain", disk, "--h", "0.05", "--out", out, "--plot"}).code == kExitOk);
  CHECK(cli({"stability-sweep", "--modes", "2", "--amplitudes", "0.05", "--h", "0.05", "--out", out}).code == kExitOk);
  CHECK(cli({"key-estimate", "--inner", kConfigs + "disk_r09.cfg", "--outer", disk, "--h", "0.05", "--out", out}).code ==
        kExitOk);
  CHECK(cli({"minimize", "--domain", kConfigs + "a2.cfg", "--max-iter", "3", "--out", out}).code == kExitOk);
  for (const char* f : {"torsion.csv", "energy.csv", "distances.csv", "fb_residual.csv", "fb_residual.gp", "sweep.csv",
                        "sweep_fit.csv", "key_estimate.csv", "trace.csv", "minimizer.cfg"})
    CHECK_MESSAGE(fs::exists(dir / f), f);
  CHECK_NOTHROW(load_domain((dir / "minimizer.cfg").string()));
  fs::remove_all(dir);
}
