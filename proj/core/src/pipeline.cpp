#include "ggmc/pipeline.hpp"

#include <chrono>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "ggmc/agreement.hpp"
#include "ggmc/memory.hpp"
#include "ggmc/parallel.hpp"
#include "json.hpp"

namespace ggmc {

namespace {

std::string_view estimator_name(EstimatorKind kind) {
  return kind == EstimatorKind::Asymmetric ? "asym" : "sym";
}

template <class F>
auto stage(const char* name, F&& body) {
  try {
    return body();
  } catch (const PipelineError&) {
    throw;
  } catch (const Error& e) {
    throw PipelineError(name, e);
  }
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  return out;
}

std::filesystem::path with_suffix(const std::filesystem::path& base, const char* suffix) {
  return std::filesystem::path(base.string() + suffix);
}

Labels cluster_in(const std::shared_ptr<const DataMatrix>& data, const RunConfig& cfg,
                  Geometry geometry, RunMetrics& metrics) {
  KMeansConfig km;
  km.k = cfg.k;
  km.seed = cfg.seed;
  km.max_iters = cfg.max_iters;
  km.init = cfg.init;

  ClusterState state;
  switch (geometry) {
    case Geometry::Raw:
      state = stage("cluster", [&] { return kmeans_dense(data->values(), km); });
      break;
    case Geometry::Correlation: {
      const Matrix embedding = stage("factorize", [&] {
        return correlation_embedding(GramFactor(*data), *data);
      });
      state = stage("cluster", [&] { return kmeans_dense(embedding, km); });
      break;
    }
    case Geometry::Resolution: {
      const FactorModel f = stage("factorize", [&] { return build_factors(data, cfg.reg); });
      metrics.rank = f.rank();
      metrics.numerical_rank = f.numerical_rank();
      const Matrix points = stage("embed", [&] { return Matrix(spectral_embedding(f).transpose()); });
      state = stage("cluster", [&] { return kmeans_dense(points, km); });
      break;
    }
    case Geometry::PartialCorrelation: {
      const FactorModel f = stage("factorize", [&] { return build_factors(data, cfg.reg); });
      metrics.rank = f.rank();
      metrics.numerical_rank = f.numerical_rank();
      const ColumnScalings scal = stage("scale", [&] { return scalings(f, cfg.estimator); });
      metrics.degenerate = scal.excluded_nodes.size();
      state = stage("cluster", [&] { return kmeans_implicit(f, scal, km); });
      metrics.sign_test_fallbacks = state.sign_test_fallbacks;
      break;
    }
  }
  metrics.iterations = state.iterations;
  metrics.converged = state.converged;
  metrics.n_change = state.n_change;
  metrics.n_change_history = state.n_change_history;
  metrics.reseeds = state.reseeds;
  return std::move(state.labels);
}

}  // namespace

PipelineError::PipelineError(std::string stage, const Error& cause)
    : Error(Verbatim{}, cause.code(), "[" + stage + "] " + cause.what(), cause.detail(),
            cause.node()),
      stage_(std::move(stage)) {}

void validate(const RunConfig& cfg) {
  if (cfg.input.has_value() == cfg.generate.has_value())
    throw Error(ErrorCode::InvalidArgument, "give exactly one of an input file or --generate");
  if (cfg.k < 2) throw Error(ErrorCode::InvalidArgument, "k must be at least 2");
  if (cfg.max_iters < 1) throw Error(ErrorCode::InvalidArgument, "max_iters must be positive");
  if (cfg.smooth_width < 0) throw Error(ErrorCode::InvalidArgument, "smoothing width must be >= 0");
  if (cfg.dense_limit < 1) throw Error(ErrorCode::InvalidArgument, "dense limit must be positive");
  if (cfg.geometry == Geometry::Resolution && cfg.reg.is_ridge())
    throw Error(ErrorCode::UnsupportedForRidge,
                "the spectral geometry needs truncated-SVD regularization");
  if (cfg.generate && (cfg.generate->n < 2 || cfg.generate->m < 2))
    throw Error(ErrorCode::InvalidArgument, "generated data needs n >= 2 and m >= 2");
}

std::string config_json(const RunConfig& cfg) {
  nlohmann::ordered_json j;
  if (cfg.input) {
    j["input"] = cfg.input->string();
    j["format"] = cfg.format == io::DataFormat::Csv ? "csv" : "bin";
  } else {
    j["input"] = nullptr;
  }
  if (cfg.generate) {
    j["generate"] = {{"n", cfg.generate->n},
                     {"m", cfg.generate->m},
                     {"model", to_string(cfg.generate->model)}};
  }
  j["smooth_width"] = cfg.smooth_width;
  if (cfg.reg.is_truncated()) {
    j["reg"] = "svd";
    j["keep_fraction"] = cfg.reg.keep_fraction();
  } else {
    j["reg"] = "ridge";
    j["lambda"] = cfg.reg.lambda();
  }
  j["estimator"] = estimator_name(cfg.estimator);
  j["distance"] = to_string(cfg.geometry);
  j["k"] = cfg.k;
  j["seed"] = cfg.seed;
  j["max_iters"] = cfg.max_iters;
  j["init"] = cfg.init == InitMethod::RandomLabels ? "random" : "farthest";
  j["dense_limit"] = cfg.dense_limit;
  j["output"] = cfg.output.string();
  return j.dump(2) + "\n";
}

void print_metrics(std::ostream& out, const RunMetrics& m) {
  out << "samples=" << m.samples << '\n'
      << "variables=" << m.variables << '\n'
      << "rank=" << m.rank << '\n'
      << "numerical_rank=" << m.numerical_rank << '\n'
      << "degenerate=" << m.degenerate << '\n'
      << "iterations=" << m.iterations << '\n'
      << "converged=" << (m.converged ? "true" : "false") << '\n'
      << "n_change=" << m.n_change << '\n'
      << "n_change_history=";
  for (std::size_t i = 0; i < m.n_change_history.size(); ++i)
    out << (i ? "," : "") << m.n_change_history[i];
  out << '\n'
      << "reseeds=" << m.reseeds << '\n'
      << "sign_test_fallbacks=" << m.sign_test_fallbacks << '\n'
      << "wall_seconds=" << std::fixed << std::setprecision(3) << m.wall_seconds
      << std::defaultfloat << '\n'
      << "peak_rss_bytes=" << m.peak_rss_bytes << '\n'
      << "peak_additional_bytes=" << m.peak_additional_bytes << '\n';
}

Matrix load_raw(const RunConfig& cfg) {
  if (cfg.input)
    return stage("ingest", [&] { return io::ingest(*cfg.input, cfg.format); });
  if (!cfg.generate) throw Error(ErrorCode::InvalidArgument, "no data source configured");
  return stage("generate", [&] {
    return generate_synthetic(cfg.generate->n, cfg.generate->m, cfg.generate->model, cfg.seed);
  });
}

RunResult cluster_data(std::shared_ptr<const DataMatrix> data, const RunConfig& cfg) {
  if (cfg.threads > 0) set_thread_count(cfg.threads);
  const auto baseline = memory::current_rss_bytes();
  memory::reset_peak_rss();
  const auto start = std::chrono::steady_clock::now();

  RunResult result;
  result.metrics.samples = data->samples();
  result.metrics.variables = data->variables();
  result.labels = cluster_in(data, cfg, cfg.geometry, result.metrics);

  result.metrics.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  result.metrics.peak_rss_bytes = memory::peak_rss_bytes();
  result.metrics.peak_additional_bytes =
      result.metrics.peak_rss_bytes > baseline ? result.metrics.peak_rss_bytes - baseline : 0;
  return result;
}

RunResult run_pipeline(const RunConfig& cfg) {
  stage("config", [&] {
    validate(cfg);
    return 0;
  });
  auto data = stage("standardize", [&] {
    DataMatrix d = standardize(load_raw(cfg));
    if (cfg.smooth_width > 0) d = smooth(d, cfg.smooth_width);
    return std::make_shared<const DataMatrix>(std::move(d));
  });
  RunResult result = cluster_data(std::move(data), cfg);

  if (!cfg.output.empty()) {
    stage("write", [&] {
      io::write_labels(cfg.output, result.labels);
      auto config = open_out(with_suffix(cfg.output, ".config.json"));
      config << config_json(cfg);
      auto log = open_out(with_suffix(cfg.output, ".iterations.csv"));
      log << "iteration,n_change\n";
      for (std::size_t i = 0; i < result.metrics.n_change_history.size(); ++i)
        log << i + 1 << ',' << result.metrics.n_change_history[i] << '\n';
      return 0;
    });
  }
  return result;
}

std::vector<SweepPoint> smoothing_sweep(const DataMatrix& data, const std::vector<int>& widths,
                                        const RunConfig& cfg) {
  if (!cfg.reg.is_truncated())
    throw Error(ErrorCode::UnsupportedForRidge,
                "the smoothing sweep compares against the spectral geometry");
  if (cfg.threads > 0) set_thread_count(cfg.threads);
  std::vector<SweepPoint> out;
  for (int w : widths) {
    auto smoothed = std::make_shared<const DataMatrix>(
        stage("smooth", [&] { return w == 0 ? data : smooth(data, w); }));
    RunMetrics ignored;
    const Labels spectral = cluster_in(smoothed, cfg, Geometry::Resolution, ignored);
    const Labels partial = cluster_in(smoothed, cfg, Geometry::PartialCorrelation, ignored);
    out.push_back({w, disagreement_percent(spectral, partial)});
  }
  return out;
}

void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepPoint>& points) {
  auto out = open_out(path);
  out << "w,disagreement_percent\n";
  for (const auto& p : points) out << p.half_width << ',' << p.disagreement << '\n';
}

GeometrySweep geometry_sweep(std::shared_ptr<const DataMatrix> data, const RunConfig& cfg) {
  if (cfg.threads > 0) set_thread_count(cfg.threads);
  GeometrySweep sweep;
  for (std::size_t g = 0; g < kAllGeometries.size(); ++g) {
    RunMetrics ignored;
    sweep.labels[g] = cluster_in(data, cfg, kAllGeometries[g], ignored);
  }
  sweep.disagreement = Matrix::Zero(4, 4);
  for (Index a = 0; a < 4; ++a)
    for (Index b = a + 1; b < 4; ++b)
      sweep.disagreement(a, b) = sweep.disagreement(b, a) =
          disagreement_percent(sweep.labels[a], sweep.labels[b]);
  return sweep;
}

void write_agreement_table(const std::filesystem::path& path, const GeometrySweep& sweep) {
  auto out = open_out(path);
  out << "a,b,disagreement_percent\n";
  for (Index a = 0; a < 4; ++a)
    for (Index b = a + 1; b < 4; ++b)
      out << to_string(kAllGeometries[a]) << ',' << to_string(kAllGeometries[b]) << ','
          << sweep.disagreement(a, b) << '\n';
}

}  // namespace ggmc
