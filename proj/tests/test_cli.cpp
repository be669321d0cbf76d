#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "slipstokes/config.hpp"
#include "slipstokes/report.hpp"
#include "slipstokes/runner.hpp"

using namespace slipstokes;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& tag) {
  fs::path dir = fs::temp_directory_path() / ("slipstokes_test_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("config parsing: sections, comments, types") {
  Config cfg = Config::parse_string(
      "# comment\n"
      "[domain]\n"
      "kind = disk\n"
      "radius = 1.5\n"
      "[scan]\n"
      "alphas = 1, 10, 100\n");
  CHECK(cfg.get("domain.kind") == "disk");
  CHECK(cfg.get_double("domain.radius") == 1.5);
  CHECK(cfg.get_list("scan.alphas") == std::vector<double>{1, 10, 100});
  CHECK(cfg.get_or("missing", "dflt") == "dflt");
}

TEST_CASE("strict schema names the offending key") {
  Config cfg = Config::parse_string("[alpha]\nalpa = 3\n");
  try {
    cfg.check_schema(config_schema("steady"));
    CHECK(false);
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("alpa") != std::string::npos);
    CHECK(e.code() == "config-schema");
  }
}

TEST_CASE("malformed configs are rejected") {
  CHECK_THROWS_AS(Config::parse_string("novalue\n"), Error);
  CHECK_THROWS_AS(Config::parse_string("[open\nk = v\n"), Error);
  CHECK_THROWS_AS(Config::parse_string("a = 1\na = 2\n"), Error);
}

TEST_CASE("mesh experiment writes the artifact tree") {
  fs::path out = temp_dir("mesh");
  ExperimentConfig ec;
  ec.kind = "mesh";
  ec.raw = Config::parse_string("[domain]\nkind = disk\nradius = 1\n[mesh]\nh = 0.3\n");
  ec.out_dir = out.string();
  ec.level = 1;
  CHECK(run_experiment(ec) == 0);
  CHECK(fs::exists(out / "mesh" / "mesh.txt"));
  CHECK(fs::exists(out / "mesh" / "report.json"));
  CHECK(fs::exists(out / "mesh" / "config.txt"));
  std::string mesh_txt = slurp(out / "mesh" / "mesh.txt");
  CHECK(mesh_txt.rfind("vertices ", 0) == 0);
}

TEST_CASE("steady experiment reports norms and residual") {
  fs::path out = temp_dir("steady");
  ExperimentConfig ec;
  ec.kind = "steady";
  ec.raw = Config::parse_string("[mesh]\nh = 0.3\n[alpha]\nvalue = 1\n");
  ec.out_dir = out.string();
  ec.level = 1;
  CHECK(run_experiment(ec) == 0);
  std::string rep = slurp(out / "steady" / "report.json");
  CHECK(rep.find("\"residual\"") != std::string::npos);
}

TEST_CASE("identical config and seed give byte-identical reports") {
  fs::path out1 = temp_dir("det1"), out2 = temp_dir("det2");
  for (int i = 0; i < 2; ++i) {
    ExperimentConfig ec;
    ec.kind = "evolve";
    ec.raw = Config::parse_string(
        "[mesh]\nh = 0.35\n[scheme]\ntheta = 0.5\ndt = 0.025\nT = 0.2\n[run]\nseed = 7\n");
    ec.out_dir = (i == 0 ? out1 : out2).string();
    ec.level = 1;
    CHECK(run_experiment(ec) == 0);
  }
  CHECK(slurp(out1 / "evolve" / "report.json") == slurp(out2 / "evolve" / "report.json"));
  CHECK(slurp(out1 / "evolve" / "trace.csv") == slurp(out2 / "evolve" / "trace.csv"));
  CHECK(slurp(out1 / "evolve" / "trace.svg") == slurp(out2 / "evolve" / "trace.svg"));
}

TEST_CASE("unknown config keys exit with status 2") {
  fs::path out = temp_dir("badkey");
  fs::path cfg_file = out / "bad.cfg";
  std::ofstream(cfg_file) << "[alpha]\nalpa = 3\n";
  try {
    ExperimentConfig ec = ExperimentConfig::load("steady", cfg_file.string(),
                                                 out.string(), 1, 1);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == "config-schema");
  }
}

TEST_CASE("solver failures leave a FAILED marker and exit 3") {
  fs::path out = temp_dir("fail");
  ExperimentConfig ec;
  ec.kind = "steady";
  // alpha = 0 on the disk without kernel filtering is singular
  ec.raw = Config::parse_string(
      "[mesh]\nh = 0.35\n[alpha]\nvalue = 0\n[forcing]\nkind = rotation\n"
      "[steady]\nfilter_kernel = 0\n");
  ec.out_dir = out.string();
  ec.level = 1;
  CHECK(run_experiment(ec) == 3);
  CHECK(fs::exists(out / "steady" / "FAILED"));
}

TEST_CASE("csv round trip and missing-column error") {
  fs::path out = temp_dir("csv");
  CsvTable t({"a", "b"});
  t.add_row({1.0, 2.0});
  t.add_row({0.1234567890123456789, 3e-17});
  t.write(out / "t.csv");
  CsvTable r = CsvTable::read(out / "t.csv");
  CHECK(r.column("a")[1] == t.column("a")[1]);  // 17 digits round-trip exactly
  CHECK(r.column("b")[1] == t.column("b")[1]);
  CHECK_THROWS_WITH_AS(r.column("c"), doctest::Contains("missing-column"), Error);
}

TEST_CASE("svg plots are deterministic and carry guide slopes") {
  PlotSeries s;
  s.label = "gap";
  for (int i = 0; i <= 8; ++i) {
    double a = std::pow(10.0, i * 0.5);
    s.x.push_back(a);
    s.y.push_back(3.0 / a);
  }
  PlotSpec spec;
  spec.title = "sweep";
  spec.logx = spec.logy = true;
  spec.guide_slopes = {-1.0};
  std::string svg1 = render_svg_plot({s}, spec);
  std::string svg2 = render_svg_plot({s}, spec);
  CHECK(svg1 == svg2);
  CHECK(svg1.find("slope -1") != std::string::npos);
  CHECK(svg1.find("<svg") != std::string::npos);
}

TEST_CASE("resolvent-scan experiment emits the spec CSV columns") {
  fs::path out = temp_dir("scan");
  ExperimentConfig ec;
  ec.kind = "resolvent-scan";
  ec.raw = Config::parse_string(
      "[mesh]\nh = 0.45\n[scan]\nalphas = 1\nlambda_min = 10\nlambda_max = 10000\n"
      "points_per_decade = 2\nrays = 0\n");
  ec.out_dir = out.string();
  ec.level = 1;
  CHECK(run_experiment(ec) == 0);
  CsvTable t = CsvTable::read(out / "resolvent-scan" / "scan.csv");
  for (const char* col : {"alpha_min", "alpha_max", "ray_arg", "lambda_abs", "norm_u",
                          "norm_Du", "norm_pi", "residual"})
    CHECK_NOTHROW(t.column(col));
}
