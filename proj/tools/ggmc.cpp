// ggmc: cluster the variables of a data matrix by partial-correlation
// similarity, or compare two label files.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ggmc/agreement.hpp"
#include "ggmc/io.hpp"
#include "ggmc/pipeline.hpp"

namespace fs = std::filesystem;
using namespace ggmc;

namespace {

struct Options {
  std::string input;
  std::string format = "csv";
  bool generate = false;
  Index n = 0;
  Index m = 0;
  std::string model = "blocks:5,0.3,0";
  int smooth_width = 0;
  std::string reg = "svd";
  double keep_fraction = 0.3;
  double lambda = 0.1;
  std::string estimator = "sym";
  std::string distance = "pcor";
  int k = 2;
  std::uint64_t seed = 0;
  int max_iters = 100;
  std::string output;
  std::vector<std::string> compare;
  Index dense_limit = kDefaultDenseLimit;
  unsigned threads = 1;
  std::string init = "random";
  int sweep_smoothing = -1;
  std::string write_data;
};

RunConfig to_config(const Options& o) {
  RunConfig cfg;
  if (o.generate) {
    cfg.generate = SyntheticSpec{o.n, o.m, parse_model(o.model)};
  } else if (!o.input.empty()) {
    cfg.input = o.input;
  }
  cfg.format = io::parse_format(o.format);
  cfg.smooth_width = o.smooth_width;
  cfg.reg = o.reg == "ridge" ? Regularization::ridge(o.lambda)
                             : Regularization::truncated_svd(o.keep_fraction);
  cfg.estimator = o.estimator == "asym" ? EstimatorKind::Asymmetric
                                        : EstimatorKind::SymmetricGeometricMean;
  static const std::map<std::string, Geometry> geometries = {
      {"raw", Geometry::Raw},
      {"corr", Geometry::Correlation},
      {"spectral", Geometry::Resolution},
      {"pcor", Geometry::PartialCorrelation}};
  if (o.distance != "all") cfg.geometry = geometries.at(o.distance);
  cfg.k = o.k;
  cfg.seed = o.seed;
  cfg.max_iters = o.max_iters;
  cfg.init = o.init == "farthest" ? InitMethod::FarthestFirst : InitMethod::RandomLabels;
  cfg.dense_limit = o.dense_limit;
  cfg.output = o.output;
  cfg.threads = o.threads;
  return cfg;
}

int compare(const std::vector<std::string>& files) {
  const Labels a = io::read_labels(fs::path(files[0])).labels;
  const Labels b = io::read_labels(fs::path(files[1])).labels;
  std::cout << "disagreement_percent=" << disagreement_percent(a, b) << '\n';
  return 0;
}

std::shared_ptr<const DataMatrix> prepared(const RunConfig& cfg) {
  DataMatrix d = standardize(load_raw(cfg));
  if (cfg.smooth_width > 0) d = smooth(d, cfg.smooth_width);
  return std::make_shared<const DataMatrix>(std::move(d));
}

int geometry_run(const RunConfig& cfg) {
  validate(cfg);
  const GeometrySweep sweep = geometry_sweep(prepared(cfg), cfg);
  if (!cfg.output.empty()) {
    for (std::size_t g = 0; g < kAllGeometries.size(); ++g)
      io::write_labels(fs::path(cfg.output.string() + "." + std::string(to_string(kAllGeometries[g])) + ".csv"),
                       sweep.labels[g]);
    write_agreement_table(fs::path(cfg.output.string() + ".agreement.csv"), sweep);
  }
  for (std::size_t a = 0; a < kAllGeometries.size(); ++a)
    for (std::size_t b = a + 1; b < kAllGeometries.size(); ++b)
      std::cout << "disagreement_" << to_string(kAllGeometries[a]) << '_'
                << to_string(kAllGeometries[b]) << '=' << sweep.disagreement(a, b) << '\n';
  return 0;
}

int smoothing_run(const RunConfig& cfg, int max_width) {
  validate(cfg);
  RunConfig base = cfg;
  base.smooth_width = 0;
  std::vector<int> widths;
  for (int w = 0; w <= max_width; ++w) widths.push_back(w);
  const auto points = smoothing_sweep(*prepared(base), widths, cfg);
  if (!cfg.output.empty()) write_sweep_csv(cfg.output, points);
  for (const auto& p : points)
    std::cout << "disagreement_w" << p.half_width << '=' << p.disagreement << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cluster variables by partial-correlation similarity"};
  Options o;
  app.add_option("--input", o.input, "Data file, rows are samples");
  app.add_option("--format", o.format, "Input format")->check(CLI::IsMember({"csv", "bin"}));
  app.add_flag("--generate", o.generate, "Use synthetic data instead of --input");
  app.add_option("--n", o.n, "Synthetic variable count");
  app.add_option("--m", o.m, "Synthetic sample count");
  app.add_option("--model", o.model, "chain:RHO or blocks:B,WITHIN,BETWEEN");
  app.add_option("--smooth-width", o.smooth_width, "Moving-average half-width")->check(CLI::NonNegativeNumber);
  app.add_option("--reg", o.reg, "Regularization")->check(CLI::IsMember({"svd", "ridge"}));
  app.add_option("--keep-fraction", o.keep_fraction, "Fraction of singular triplets kept");
  app.add_option("--lambda", o.lambda, "Ridge penalty");
  app.add_option("--estimator", o.estimator, "Partial-correlation estimator")->check(CLI::IsMember({"sym", "asym"}));
  app.add_option("--distance", o.distance, "Geometry, or all for every geometry")
      ->check(CLI::IsMember({"raw", "corr", "spectral", "pcor", "all"}));
  app.add_option("--k", o.k, "Cluster count");
  app.add_option("--seed", o.seed, "Random seed");
  app.add_option("--max-iters", o.max_iters, "Iteration cap");
  app.add_option("--output", o.output, "Label file (or sweep csv)");
  app.add_option("--compare", o.compare, "Score two label files")->expected(2);
  app.add_option("--dense-limit", o.dense_limit, "Largest n for dense fallbacks");
  app.add_option("--threads", o.threads, "Worker threads");
  app.add_option("--init", o.init, "k-means start")->check(CLI::IsMember({"random", "farthest"}));
  app.add_option("--sweep-smoothing", o.sweep_smoothing,
                 "Compare spectral and pcor clusterings for widths 0..W")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--write-data", o.write_data, "Save the raw matrix (.bin or .csv) and exit");
  CLI11_PARSE(app, argc, argv);

  try {
    if (!o.compare.empty()) return compare(o.compare);
    const RunConfig cfg = to_config(o);
    if (!o.write_data.empty()) {
      const Matrix raw = load_raw(cfg);
      const fs::path path = o.write_data;
      if (path.extension() == ".csv") {
        std::ofstream out(path);
        if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
        io::write_csv(out, raw);
      } else {
        io::write_bin(path, raw);
      }
      return 0;
    }
    if (o.sweep_smoothing >= 0) return smoothing_run(cfg, o.sweep_smoothing);
    if (o.distance == "all") return geometry_run(cfg);
    const RunResult r = run_pipeline(cfg);
    print_metrics(std::cout, r.metrics);
    return 0;
  } catch (const PipelineError& e) {
    std::cerr << "ggmc: " << e.what() << '\n';
  } catch (const Error& e) {
    std::cerr << "ggmc: [setup] " << e.what() << '\n';
  } catch (const std::exception& e) {
    std::cerr << "ggmc: [setup] " << e.what() << '\n';
  }
  return 1;
}
