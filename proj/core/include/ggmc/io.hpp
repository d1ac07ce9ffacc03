#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string_view>
#include <vector>

#include "ggmc/cluster.hpp"
#include "ggmc/data.hpp"

namespace ggmc::io {

enum class DataFormat { Csv, Bin };

DataFormat parse_format(std::string_view name);

inline constexpr char kBinMagic[4] = {'G', 'G', 'M', 'C'};
inline constexpr std::uint32_t kBinVersion = 1;

// Rows are samples, columns variables. CSV may carry one non-numeric header
// row. Throws ParseError (with row/column), MagicMismatch, TruncatedFile,
// IoError.
Matrix ingest(const std::filesystem::path& path, DataFormat format);
Matrix read_csv(std::istream& in);
Matrix read_bin(std::istream& in);

// "GGMC", u32 version, u64 m, u64 n, then m*n little-endian doubles in
// column-major order.
void write_bin(std::ostream& out, const Matrix& values);
void write_bin(const std::filesystem::path& path, const Matrix& values);
void write_csv(std::ostream& out, const Matrix& values);

// One record per node: "node,cluster,degenerate" with 1-based cluster ids;
// unassigned (degenerate) nodes are written with cluster 0.
struct LabelFile {
  Labels labels;  // 0-based, kUnassigned for degenerate nodes

  std::size_t size() const noexcept { return labels.size(); }
};

void write_labels(std::ostream& out, const Labels& labels);
void write_labels(const std::filesystem::path& path, const Labels& labels);
LabelFile read_labels(std::istream& in);
LabelFile read_labels(const std::filesystem::path& path);

}  // namespace ggmc::io
