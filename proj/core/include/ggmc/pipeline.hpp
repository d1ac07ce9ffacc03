#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ggmc/cluster.hpp"
#include "ggmc/distance.hpp"
#include "ggmc/error.hpp"
#include "ggmc/factors.hpp"
#include "ggmc/io.hpp"
#include "ggmc/pcor.hpp"
#include "ggmc/synthetic.hpp"

namespace ggmc {

struct SyntheticSpec {
  Index n = 0;
  Index m = 0;
  SyntheticModel model = BlockModel{};
};

struct RunConfig {
  std::optional<std::filesystem::path> input;
  io::DataFormat format = io::DataFormat::Csv;
  std::optional<SyntheticSpec> generate;
  int smooth_width = 0;
  Regularization reg = Regularization::truncated_svd(0.3);
  EstimatorKind estimator = EstimatorKind::SymmetricGeometricMean;
  Geometry geometry = Geometry::PartialCorrelation;
  int k = 2;
  std::uint64_t seed = 0;
  int max_iters = 100;
  InitMethod init = InitMethod::RandomLabels;
  Index dense_limit = kDefaultDenseLimit;
  // Label file; companion files take this path plus a suffix. Empty: no files.
  std::filesystem::path output;
  unsigned threads = 1;
};

// Throws InvalidArgument or UnsupportedForRidge for inconsistent settings.
void validate(const RunConfig& cfg);
std::string config_json(const RunConfig& cfg);

// Error raised by a pipeline stage; the message is prefixed with the stage.
class PipelineError : public Error {
 public:
  PipelineError(std::string stage, const Error& cause);
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

struct RunMetrics {
  Index samples = 0;
  Index variables = 0;
  Index rank = 0;            // retained triplets (0 for raw/corr)
  Index numerical_rank = 0;
  std::size_t degenerate = 0;
  int iterations = 0;
  bool converged = false;
  std::size_t n_change = 0;
  std::vector<std::size_t> n_change_history;
  std::size_t reseeds = 0;
  std::size_t sign_test_fallbacks = 0;
  double wall_seconds = 0.0;
  std::size_t peak_rss_bytes = 0;
  // Peak resident memory above the level held when clustering started.
  std::size_t peak_additional_bytes = 0;
};

void print_metrics(std::ostream& out, const RunMetrics& metrics);

struct RunResult {
  Labels labels;
  RunMetrics metrics;
};

// Reads or generates the raw matrix.
Matrix load_raw(const RunConfig& cfg);

// Factorize, scale and cluster already standardized data in the configured
// geometry. Writes no files.
RunResult cluster_data(std::shared_ptr<const DataMatrix> data, const RunConfig& cfg);

// Full run: load, standardize, smooth, cluster, then write the label file,
// the config echo (<output>.config.json) and the iteration log
// (<output>.iterations.csv) when an output path is set.
RunResult run_pipeline(const RunConfig& cfg);

struct SweepPoint {
  int half_width = 0;
  double disagreement = 0.0;  // percent, resolution vs partial correlation
};

// For each width: smooth, re-standardize, cluster in the resolution and the
// partial-correlation geometry with the same seed, and score the pair.
std::vector<SweepPoint> smoothing_sweep(const DataMatrix& data, const std::vector<int>& widths,
                                        const RunConfig& cfg);
void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepPoint>& points);

inline constexpr std::array<Geometry, 4> kAllGeometries = {
    Geometry::Raw, Geometry::Correlation, Geometry::Resolution, Geometry::PartialCorrelation};

struct GeometrySweep {
  std::array<Labels, 4> labels;  // in kAllGeometries order
  Matrix disagreement;           // 4 x 4 percent
};

GeometrySweep geometry_sweep(std::shared_ptr<const DataMatrix> data, const RunConfig& cfg);
void write_agreement_table(const std::filesystem::path& path, const GeometrySweep& sweep);

}  // namespace ggmc
