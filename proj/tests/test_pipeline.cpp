#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "ggmc/error.hpp"
#include "ggmc/io.hpp"
#include "ggmc/pipeline.hpp"
#include "json.hpp"

using namespace ggmc;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

RunConfig synthetic_config() {
  RunConfig cfg;
  cfg.generate = SyntheticSpec{60, 40, BlockModel{3, 0.5, 0.0}};
  cfg.k = 3;
  cfg.seed = 5;
  return cfg;
}

}  // namespace

TEST_CASE("pipeline writes labels, config echo and iteration log") {
  TempDir dir("ggmc_test_pipeline");
  RunConfig cfg = synthetic_config();
  cfg.output = dir.path / "labels.csv";
  const RunResult r = run_pipeline(cfg);
  CHECK(r.labels.size() == 60);
  CHECK(r.metrics.variables == 60);
  CHECK(r.metrics.samples == 40);
  REQUIRE(fs::exists(cfg.output));
  CHECK(io::read_labels(cfg.output).labels == r.labels);

  const auto echo = nlohmann::json::parse(slurp(dir.path / "labels.csv.config.json"));
  CHECK(echo["k"] == 3);
  CHECK(echo["seed"] == 5);
  CHECK(fs::exists(dir.path / "labels.csv.iterations.csv"));

  std::ostringstream metrics;
  print_metrics(metrics, r.metrics);
  CHECK(metrics.str().find("iterations=") != std::string::npos);
  CHECK(metrics.str().find("wall_seconds=") != std::string::npos);
}

TEST_CASE("identical configurations give byte-identical label files") {
  TempDir dir("ggmc_test_repro");
  RunConfig cfg = synthetic_config();
  cfg.output = dir.path / "a.csv";
  run_pipeline(cfg);
  cfg.output = dir.path / "b.csv";
  cfg.threads = 3;
  run_pipeline(cfg);
  CHECK(slurp(dir.path / "a.csv") == slurp(dir.path / "b.csv"));
}

TEST_CASE("every geometry runs and the agreement table is symmetric") {
  RunConfig cfg = synthetic_config();
  const DataMatrix data = standardize(load_raw(cfg));
  const GeometrySweep sweep = geometry_sweep(std::make_shared<const DataMatrix>(data), cfg);
  for (const Labels& l : sweep.labels) CHECK(l.size() == 60);
  CHECK((sweep.disagreement.array() == sweep.disagreement.transpose().array()).all());
  CHECK(sweep.disagreement.diagonal().cwiseAbs().maxCoeff() == 0.0);
  CHECK(sweep.disagreement.maxCoeff() <= 100.0);
}

TEST_CASE("smoothing sweep") {
  RunConfig cfg = synthetic_config();
  const DataMatrix data = standardize(load_raw(cfg));
  const auto points = smoothing_sweep(data, {0, 1, 2}, cfg);
  REQUIRE(points.size() == 3);
  for (const auto& p : points) {
    CHECK(std::isfinite(p.disagreement));
    CHECK(p.disagreement >= 0.0);
    CHECK(p.disagreement <= 100.0);
  }
  TempDir dir("ggmc_test_sweep");
  write_sweep_csv(dir.path / "sweep.csv", points);
  CHECK(slurp(dir.path / "sweep.csv").rfind("w,disagreement_percent\n", 0) == 0);
}

TEST_CASE("errors carry the failing stage") {
  SUBCASE("missing input") {
    RunConfig cfg;
    cfg.input = "/nonexistent/ggmc.csv";
    try {
      run_pipeline(cfg);
      FAIL("expected PipelineError");
    } catch (const PipelineError& e) {
      CHECK(e.stage() == "ingest");
      CHECK(std::string(e.what()).rfind("[ingest]", 0) == 0);
    }
  }
  SUBCASE("constant column") {
    TempDir dir("ggmc_test_constant");
    std::ofstream(dir.path / "in.csv") << "1,2\n1,3\n1,5\n";
    RunConfig cfg;
    cfg.input = dir.path / "in.csv";
    try {
      run_pipeline(cfg);
      FAIL("expected PipelineError");
    } catch (const PipelineError& e) {
      CHECK(e.stage() == "standardize");
      CHECK(e.code() == ErrorCode::ZeroVarianceColumn);
    }
  }
  SUBCASE("spectral geometry with ridge") {
    RunConfig cfg = synthetic_config();
    cfg.reg = Regularization::ridge(0.1);
    cfg.geometry = Geometry::Resolution;
    CHECK_THROWS_AS(validate(cfg), Error);
  }
  SUBCASE("too many clusters") {
    RunConfig cfg = synthetic_config();
    cfg.k = 61;
    CHECK_THROWS_AS(run_pipeline(cfg), Error);
  }
}
