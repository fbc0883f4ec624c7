#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <tcdm/evaluation/logistic.hpp>
#include <tcdm/metric.hpp>

namespace tcdm::evaluation {

struct ManifestRow {
  std::string reference;  // as written in the manifest
  std::string distorted;
  std::string distortion_type;
  double mos = 0.0;
};

struct ScoredRecord {
  std::string reference_id;
  std::string distorted_id;
  std::string distortion_type;
  double mos = 0.0;
  double q = 0.0;
  double mapped_q = 0.0;
};

struct TypeSummary {
  double srocc = 0.0;  // NaN when degenerate
  std::size_t n = 0;
  bool degenerate = false;
};

struct CorrelationSummary {
  double plcc = 0.0;  // NaN when degenerate
  double srocc = 0.0;
  double rmse = 0.0;
  std::size_t n = 0;
  /// Fewer than two records, or no variance in Q or MOS.
  bool degenerate = false;
  bool zero_variance = false;
  std::optional<LogisticParams> logistic;  // absent when the fit was not possible
  std::map<std::string, TypeSummary> per_type;
};

struct BenchmarkResult {
  CorrelationSummary summary;
  std::vector<ScoredRecord> records;  // manifest order, skipped rows omitted
  std::size_t computed = 0;
  std::size_t cache_hits = 0;
  std::size_t skipped = 0;
  std::filesystem::path cache_path;
};

/// Splits one CSV line; double-quoted fields may contain commas and "".
std::vector<std::string> split_csv_line(std::string_view line);

/// Reads `reference,distorted,distortion_type,mos`. Throws InputError on a
/// malformed header or row, or when the manifest has no rows.
std::vector<ManifestRow> read_manifest(const std::filesystem::path& manifest);

/// Fits the logistic on the pooled records (filling mapped_q) and computes
/// global and per-type statistics. Degenerate sets are flagged, not thrown.
CorrelationSummary summarize(std::vector<ScoredRecord>& records);

/// Report CSV: the record table, a blank line, then the summary block.
void write_report(const std::filesystem::path& out, const std::vector<ScoredRecord>& records,
                  const CorrelationSummary& summary);

/// Reads the record table back from a report written by write_report.
std::vector<ScoredRecord> read_report(const std::filesystem::path& report);

/// Hex SHA-256 of a byte string.
std::string sha256_hex(std::string_view bytes);

/// Scores every manifest row, reusing cached scores keyed by
/// (reference content, distorted content, configuration). The cache lives
/// next to the report as `<report>.cache`.
BenchmarkResult run_benchmark(const std::filesystem::path& manifest, const MetricConfig& config,
                              const std::filesystem::path& out, std::size_t threads = 0);

}  // namespace tcdm::evaluation
