#include <tcdm/evaluation/benchmark.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <set>
#include <sstream>
#include <unordered_map>

#include <openssl/evp.h>

#include <tcdm/error.hpp>
#include <tcdm/evaluation/stats.hpp>
#include <tcdm/parallel.hpp>
#include <tcdm/ply.hpp>

namespace tcdm::evaluation {
namespace fs = std::filesystem;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw InputError("cannot read " + path.string());
  return std::move(buffer).str();
}

std::string strip(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  return std::string(s);
}

double parse_real(const std::string& text, const std::string& where) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw InputError(where + ": not a number: '" + text + "'");
  }
}

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string quote(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (const char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

struct CacheKey {
  std::string reference, distorted, config;
  std::string line() const { return reference + "," + distorted + "," + config; }
};

using Cache = std::unordered_map<std::string, double>;

Cache load_cache(const fs::path& path) {
  Cache cache;
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line)) {
    const auto fields = split_csv_line(line);
    if (fields.size() != 4) continue;  // tolerate a torn last line
    try {
      cache[fields[0] + "," + fields[1] + "," + fields[2]] = std::stod(fields[3]);
    } catch (const std::exception&) {
    }
  }
  return cache;
}

void save_cache(const fs::path& path, const Cache& cache) {
  std::map<std::string, double> sorted(cache.begin(), cache.end());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw InputError("cannot write " + tmp.string());
    for (const auto& [key, q] : sorted) out << key << "," << format_real(q) << "\n";
    if (!out) throw InputError("cannot write " + tmp.string());
  }
  fs::rename(tmp, path);
}

void check_header(const std::vector<std::string>& got, const std::vector<std::string>& want, const fs::path& path) {
  if (got != want) {
    std::string expected;
    for (const auto& w : want) expected += (expected.empty() ? "" : ",") + w;
    throw InputError(path.string() + ": expected header '" + expected + "'");
  }
}

}  // namespace

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        current += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        current += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(strip(current));
      current.clear();
    } else {
      current += c;
    }
  }
  fields.push_back(strip(current));
  return fields;
}

std::vector<ManifestRow> read_manifest(const fs::path& manifest) {
  std::ifstream in(manifest);
  if (!in) throw InputError("cannot open manifest " + manifest.string());
  std::string line;
  if (!std::getline(in, line)) throw InputError(manifest.string() + ": empty manifest");
  check_header(split_csv_line(line), {"reference", "distorted", "distortion_type", "mos"}, manifest);

  std::vector<ManifestRow> rows;
  std::set<std::string> seen;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (strip(line).empty()) continue;
    const auto fields = split_csv_line(line);
    const std::string where = manifest.string() + ":" + std::to_string(line_no);
    if (fields.size() != 4) throw InputError(where + ": expected 4 fields, got " + std::to_string(fields.size()));
    if (!seen.insert(fields[0] + '\n' + fields[1]).second) {
      throw InputError(where + ": duplicate pair " + fields[0] + ", " + fields[1]);
    }
    rows.push_back({fields[0], fields[1], fields[2], parse_real(fields[3], where)});
  }
  if (rows.empty()) throw InputError(manifest.string() + ": manifest has no rows");
  return rows;
}

CorrelationSummary summarize(std::vector<ScoredRecord>& records) {
  CorrelationSummary summary;
  summary.n = records.size();
  std::vector<double> q, mos;
  for (const auto& r : records) {
    q.push_back(r.q);
    mos.push_back(r.mos);
  }

  auto has_variance = [](const std::vector<double>& v) {
    for (const double x : v) {
      if (x != v.front()) return true;
    }
    return false;
  };
  summary.zero_variance = q.empty() || !has_variance(q) || !has_variance(mos);
  summary.degenerate = records.size() < 2 || summary.zero_variance;

  std::vector<double> mapped = q;
  if (!summary.degenerate && records.size() >= 6) {
    const auto fit = fit_logistic5(q, mos);
    summary.logistic = fit.params;
    mapped = fit.mapped;
  }
  for (std::size_t i = 0; i < records.size(); ++i) records[i].mapped_q = mapped[i];

  summary.rmse = records.empty() ? kNaN : rmse(mapped, mos);
  if (summary.degenerate) {
    summary.plcc = kNaN;
    summary.srocc = kNaN;
  } else {
    // A fitted curve can flatten out completely; fall back to NaN then.
    summary.plcc = has_variance(mapped) ? plcc(mapped, mos) : kNaN;
    summary.srocc = srocc(q, mos);
  }

  std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> groups;
  for (const auto& r : records) {
    groups[r.distortion_type].first.push_back(r.q);
    groups[r.distortion_type].second.push_back(r.mos);
  }
  for (const auto& [type, data] : groups) {
    TypeSummary t;
    t.n = data.first.size();
    t.degenerate = t.n < 2 || !has_variance(data.first) || !has_variance(data.second);
    t.srocc = t.degenerate ? kNaN : srocc(data.first, data.second);
    summary.per_type[type] = t;
  }
  return summary;
}

void write_report(const fs::path& out, const std::vector<ScoredRecord>& records, const CorrelationSummary& summary) {
  std::ofstream file(out, std::ios::trunc);
  if (!file) throw InputError("cannot write report " + out.string());
  file << "reference,distorted,distortion_type,mos,q,mapped_q\n";
  for (const auto& r : records) {
    file << quote(r.reference_id) << "," << quote(r.distorted_id) << "," << quote(r.distortion_type) << ","
         << format_real(r.mos) << "," << format_real(r.q) << "," << format_real(r.mapped_q) << "\n";
  }
  file << "\nscope,n,plcc,srocc,rmse,degenerate\n";
  file << "global," << summary.n << "," << format_real(summary.plcc) << "," << format_real(summary.srocc) << ","
       << format_real(summary.rmse) << "," << (summary.degenerate ? 1 : 0) << "\n";
  for (const auto& [type, t] : summary.per_type) {
    file << quote("type:" + type) << "," << t.n << ",," << format_real(t.srocc) << ",," << (t.degenerate ? 1 : 0)
         << "\n";
  }
  if (!file) throw InputError("cannot write report " + out.string());
}

std::vector<ScoredRecord> read_report(const fs::path& report) {
  std::ifstream in(report);
  if (!in) throw InputError("cannot open report " + report.string());
  std::string line;
  if (!std::getline(in, line)) throw InputError(report.string() + ": empty report");
  check_header(split_csv_line(line), {"reference", "distorted", "distortion_type", "mos", "q", "mapped_q"}, report);
  std::vector<ScoredRecord> records;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (strip(line).empty()) break;  // summary block follows
    const auto f = split_csv_line(line);
    const std::string where = report.string() + ":" + std::to_string(line_no);
    if (f.size() != 6) throw InputError(where + ": expected 6 fields, got " + std::to_string(f.size()));
    records.push_back({f[0], f[1], f[2], parse_real(f[3], where), parse_real(f[4], where), parse_real(f[5], where)});
  }
  if (records.empty()) throw InputError(report.string() + ": report has no rows");
  return records;
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw InternalError("SHA-256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < length; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 15];
  }
  return out;
}

BenchmarkResult run_benchmark(const fs::path& manifest, const MetricConfig& config, const fs::path& out,
                              std::size_t threads) {
  validate(config);
  threads = resolve_thread_count(threads);
  const auto rows = read_manifest(manifest);
  const fs::path base = manifest.parent_path();
  auto resolve = [&](const std::string& p) { return fs::path(p).is_absolute() ? fs::path(p) : base / p; };

  BenchmarkResult result;
  result.cache_path = out.string() + ".cache";
  Cache cache = load_cache(result.cache_path);
  const std::string config_hash = sha256_hex(describe(config));

  // Hash every file once; unreadable ones mark their rows as skipped.
  std::map<fs::path, std::optional<std::string>> hashes;
  for (const auto& row : rows) {
    for (const auto& p : {resolve(row.reference), resolve(row.distorted)}) {
      if (hashes.count(p)) continue;
      try {
        hashes[p] = sha256_hex(read_file(p));
      } catch (const InputError& e) {
        std::cerr << "warning: " << e.what() << "\n";
        hashes[p] = std::nullopt;
      }
    }
  }

  const std::size_t n = rows.size();
  std::vector<std::optional<double>> scores(n);
  std::vector<bool> skipped(n, false);
  std::map<fs::path, std::vector<std::size_t>> pending;  // reference -> rows to compute
  for (std::size_t i = 0; i < n; ++i) {
    const auto& ref_hash = hashes[resolve(rows[i].reference)];
    const auto& dist_hash = hashes[resolve(rows[i].distorted)];
    if (!ref_hash || !dist_hash) {
      skipped[i] = true;
      continue;
    }
    const auto hit = cache.find(CacheKey{*ref_hash, *dist_hash, config_hash}.line());
    if (hit != cache.end()) {
      scores[i] = hit->second;
      ++result.cache_hits;
    } else {
      pending[resolve(rows[i].reference)].push_back(i);
    }
  }

  for (const auto& [ref_path, members] : pending) {
    std::unique_ptr<PreparedReference> prepared;
    try {
      prepared = std::make_unique<PreparedReference>(load_ply(ref_path), config, threads);
    } catch (const InputError& e) {
      std::cerr << "warning: skipping " << members.size() << " row(s): " << e.what() << "\n";
      for (const auto i : members) skipped[i] = true;
      continue;
    }
    // Rows run concurrently; a lone row gets the workers for its patches instead.
    const std::size_t inner = members.size() >= threads ? 1 : threads;
    std::vector<std::string> errors(members.size());
    parallel_for(members.size(), members.size() >= threads ? threads : 1, [&](std::size_t m) {
      const auto i = members[m];
      try {
        scores[i] = prepared->score(load_ply(resolve(rows[i].distorted)), inner).q;
      } catch (const InputError& e) {
        errors[m] = e.what();
      }
    });
    for (std::size_t m = 0; m < members.size(); ++m) {
      const auto i = members[m];
      if (!errors[m].empty()) {
        std::cerr << "warning: skipping row " << (i + 1) << ": " << errors[m] << "\n";
        skipped[i] = true;
        continue;
      }
      ++result.computed;
      cache[CacheKey{*hashes[resolve(rows[i].reference)], *hashes[resolve(rows[i].distorted)], config_hash}.line()] =
          *scores[i];
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (skipped[i]) {
      ++result.skipped;
      continue;
    }
    result.records.push_back({rows[i].reference, rows[i].distorted, rows[i].distortion_type, rows[i].mos, *scores[i],
                              *scores[i]});
  }
  if (result.skipped > 0) std::cerr << "warning: " << result.skipped << " row(s) skipped\n";
  if (result.records.empty()) throw InputError("no manifest row could be scored");

  if (result.computed > 0) save_cache(result.cache_path, cache);
  result.summary = summarize(result.records);
  write_report(out, result.records, result.summary);
  return result;
}

}  // namespace tcdm::evaluation
