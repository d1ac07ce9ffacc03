#include "ggmc/io.hpp"

#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "ggmc/error.hpp"

namespace ggmc::io {

static_assert(std::endian::native == std::endian::little,
              "binary I/O assumes a little-endian host");

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

bool parse_double(std::string_view field, double& out) {
  field = trim(field);
  if (field.empty()) return false;
  if (field.front() == '+') field.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), out);
  return ec == std::errc() && ptr == field.data() + field.size();
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    fields.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

std::ifstream open_in(const std::filesystem::path& path, std::ios::openmode mode) {
  std::ifstream in(path, mode);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  return in;
}

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode) {
  std::ofstream out(path, mode);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  return out;
}

template <class T>
void put(std::ostream& out, T value) {
  char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  out.write(bytes, sizeof(T));
}

template <class T>
T take(std::istream& in, const char* what) {
  char bytes[sizeof(T)];
  if (!in.read(bytes, sizeof(T)))
    throw Error(ErrorCode::TruncatedFile, std::string("file ends inside the ") + what);
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

}  // namespace

DataFormat parse_format(std::string_view name) {
  if (name == "csv") return DataFormat::Csv;
  if (name == "bin") return DataFormat::Bin;
  throw Error(ErrorCode::InvalidArgument, "unknown format '" + std::string(name) + "'");
}

Matrix read_csv(std::istream& in) {
  std::vector<double> values;
  Index cols = -1;
  Index rows = 0;
  std::string line;
  std::size_t line_no = 0;
  bool header_allowed = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split(line);
    std::vector<double> row(fields.size());
    std::size_t bad = fields.size();
    for (std::size_t c = 0; c < fields.size(); ++c)
      if (!parse_double(fields[c], row[c])) {
        bad = c;
        break;
      }
    if (bad != fields.size()) {
      if (header_allowed) {
        header_allowed = false;
        cols = static_cast<Index>(fields.size());
        continue;
      }
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ", column " +
                                             std::to_string(bad + 1) + ": not a number: '" +
                                             std::string(trim(fields[bad])) + "'");
    }
    header_allowed = false;
    if (cols < 0) cols = static_cast<Index>(row.size());
    if (static_cast<Index>(row.size()) != cols)
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": expected " +
                                             std::to_string(cols) + " fields, found " +
                                             std::to_string(row.size()));
    values.insert(values.end(), row.begin(), row.end());
    ++rows;
  }
  if (rows == 0) throw Error(ErrorCode::ParseError, "no data rows");
  Matrix out(rows, cols);
  for (Index r = 0; r < rows; ++r)
    for (Index c = 0; c < cols; ++c) out(r, c) = values[static_cast<std::size_t>(r * cols + c)];
  return out;
}

Matrix read_bin(std::istream& in) {
  char magic[4];
  if (!in.read(magic, 4)) throw Error(ErrorCode::TruncatedFile, "file ends inside the magic");
  if (std::memcmp(magic, kBinMagic, 4) != 0)
    throw Error(ErrorCode::MagicMismatch, "not a GGMC binary matrix");
  const auto version = take<std::uint32_t>(in, "version");
  if (version != kBinVersion)
    throw Error(ErrorCode::ParseError, "unsupported version " + std::to_string(version));
  const auto m = take<std::uint64_t>(in, "row count");
  const auto n = take<std::uint64_t>(in, "column count");
  Matrix out(static_cast<Index>(m), static_cast<Index>(n));
  const auto bytes = static_cast<std::streamsize>(m * n * sizeof(double));
  if (!in.read(reinterpret_cast<char*>(out.data()), bytes))
    throw Error(ErrorCode::TruncatedFile,
                "expected " + std::to_string(m * n) + " values, file holds " +
                    std::to_string(in.gcount() / 8));
  return out;
}

Matrix ingest(const std::filesystem::path& path, DataFormat format) {
  if (format == DataFormat::Bin) {
    auto in = open_in(path, std::ios::binary);
    return read_bin(in);
  }
  auto in = open_in(path, std::ios::in);
  return read_csv(in);
}

void write_bin(std::ostream& out, const Matrix& values) {
  out.write(kBinMagic, 4);
  put<std::uint32_t>(out, kBinVersion);
  put<std::uint64_t>(out, static_cast<std::uint64_t>(values.rows()));
  put<std::uint64_t>(out, static_cast<std::uint64_t>(values.cols()));
  out.write(reinterpret_cast<const char*>(values.data()),
            static_cast<std::streamsize>(values.size() * sizeof(double)));
}

void write_bin(const std::filesystem::path& path, const Matrix& values) {
  auto out = open_out(path, std::ios::binary);
  write_bin(out, values);
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

void write_csv(std::ostream& out, const Matrix& values) {
  char buf[64];
  for (Index r = 0; r < values.rows(); ++r) {
    for (Index c = 0; c < values.cols(); ++c) {
      if (c) out << ',';
      const auto res = std::to_chars(buf, buf + sizeof(buf), values(r, c));
      out.write(buf, res.ptr - buf);
    }
    out << '\n';
  }
}

void write_labels(std::ostream& out, const Labels& labels) {
  out << "node,cluster,degenerate\n";
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const bool unassigned = labels[i] == kUnassigned;
    out << i << ',' << (unassigned ? 0 : labels[i] + 1) << ',' << (unassigned ? 1 : 0) << '\n';
  }
}

void write_labels(const std::filesystem::path& path, const Labels& labels) {
  auto out = open_out(path, std::ios::binary);
  write_labels(out, labels);
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

LabelFile read_labels(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::pair<long, int>> records;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    if (line_no == 1 && trim(line) == "node,cluster,degenerate") continue;
    const auto fields = split(line);
    double node = 0, cluster = 0, degenerate = 0;
    if (fields.size() != 3 || !parse_double(fields[0], node) ||
        !parse_double(fields[1], cluster) || !parse_double(fields[2], degenerate))
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) +
                                             ": expected node,cluster,degenerate");
    const int label = degenerate != 0.0 ? kUnassigned : static_cast<int>(cluster) - 1;
    records.emplace_back(static_cast<long>(node), label);
  }
  LabelFile file;
  file.labels.assign(records.size(), kUnassigned);
  std::vector<bool> seen(records.size(), false);
  for (const auto& [node, label] : records) {
    if (node < 0 || static_cast<std::size_t>(node) >= records.size() ||
        seen[static_cast<std::size_t>(node)])
      throw Error(ErrorCode::ParseError,
                  "node indices must cover 0..n-1 exactly once (bad index " +
                      std::to_string(node) + ")");
    seen[static_cast<std::size_t>(node)] = true;
    file.labels[static_cast<std::size_t>(node)] = label;
  }
  return file;
}

LabelFile read_labels(const std::filesystem::path& path) {
  auto in = open_in(path, std::ios::in);
  return read_labels(in);
}

}  // namespace ggmc::io
