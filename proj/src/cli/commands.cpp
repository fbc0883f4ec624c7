#include <tcdm/cli/commands.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <tcdm/degrade.hpp>
#include <tcdm/error.hpp>
#include <tcdm/evaluation/benchmark.hpp>
#include <tcdm/metric.hpp>
#include <tcdm/ply.hpp>

namespace tcdm::cli {
namespace {

using nlohmann::json;

// Raw flag values; turned into a MetricConfig after parsing.
struct ConfigFlags {
  std::size_t seeds = 400;
  std::size_t k = 20;
  double alpha = 0.3;
  double t = 1e-6;
  std::string sampling = "fps";
  std::uint64_t sampling_seed = 0;
  std::string weight_scheme = "sigmoid";
  std::string color_space = "rgb";
  std::string eta_mode = "std";
  bool raw_color_weights = false;
  bool cross_include_coincident = false;
  double ridge = 1e-8;
};

void add_config_flags(CLI::App& cmd, ConfigFlags& f) {
  cmd.add_option("--seeds", f.seeds, "Number of Voronoi seeds L")->capture_default_str();
  cmd.add_option("--k", f.k, "Neighbors per point K")->capture_default_str();
  cmd.add_option("--alpha", f.alpha, "Fusion weight of F1")->capture_default_str();
  cmd.add_option("--t", f.t, "Stability constant T")->capture_default_str();
  cmd.add_option("--sampling", f.sampling, "Seed sampling: fps | random")->capture_default_str();
  cmd.add_option("--sampling-seed", f.sampling_seed, "RNG seed for --sampling random")->capture_default_str();
  cmd.add_option("--weight-scheme", f.weight_scheme, "sigmoid | constant | inverse-distance | exp-decay")
      ->capture_default_str();
  cmd.add_option("--color-space", f.color_space, "rgb | yuv")->capture_default_str();
  cmd.add_option("--eta-mode", f.eta_mode, "Sigmoid scale: std | variance")->capture_default_str();
  cmd.add_flag("--raw-color-weights", f.raw_color_weights, "Use unnormalized 1:2:1 / 6:1:1 channel weights");
  cmd.add_flag("--cross-include-coincident", f.cross_include_coincident,
               "Let cross-prediction use distorted points at distance 0 from the target");
  cmd.add_option("--ridge", f.ridge, "Relative ridge used for ill-conditioned fits")->capture_default_str();
}

MetricConfig to_config(const ConfigFlags& f) {
  MetricConfig c;
  c.seeds = f.seeds;
  c.k = f.k;
  c.alpha = f.alpha;
  c.t = f.t;
  const auto sampling = parse_sampling_strategy(f.sampling);
  if (!sampling) throw CLI::ValidationError("--sampling", "unknown strategy '" + f.sampling + "'");
  c.sampling = {*sampling, f.sampling_seed};
  const auto scheme = parse_weight_scheme(f.weight_scheme);
  if (!scheme) throw CLI::ValidationError("--weight-scheme", "unknown scheme '" + f.weight_scheme + "'");
  c.weight_scheme = *scheme;
  const auto space = parse_color_space(f.color_space);
  if (!space) throw CLI::ValidationError("--color-space", "unknown color space '" + f.color_space + "'");
  c.color_space = *space;
  const auto eta = parse_eta_mode(f.eta_mode);
  if (!eta) throw CLI::ValidationError("--eta-mode", "unknown mode '" + f.eta_mode + "'");
  c.eta_mode = *eta;
  c.raw_color_weights = f.raw_color_weights;
  c.cross_exclude_coincident = !f.cross_include_coincident;
  c.ridge = f.ridge;
  validate(c);
  return c;
}

// Integers are used as-is; anything else is hashed so labels like "s1" work.
std::uint64_t parse_seed(const std::string& text) {
  std::uint64_t value = 0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec == std::errc() && end == text.data() + text.size()) return value;
  const std::string digest = evaluation::sha256_hex(text);
  return std::stoull(digest.substr(0, 16), nullptr, 16);
}

std::string decimal(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15f", v);
  return buf;
}

json config_json(const MetricConfig& c) {
  return {{"seeds", c.seeds},
          {"k", c.k},
          {"alpha", c.alpha},
          {"t", c.t},
          {"sampling", to_string(c.sampling.strategy)},
          {"sampling_seed", c.sampling.rng_seed},
          {"weight_scheme", to_string(c.weight_scheme)},
          {"color_space", to_string(c.color_space)},
          {"eta_mode", to_string(c.eta_mode)},
          {"raw_color_weights", c.raw_color_weights},
          {"cross_exclude_coincident", c.cross_exclude_coincident},
          {"ridge", c.ridge}};
}

json report_json(const QualityReport& r, bool verbose) {
  json j = {{"q", r.q},
            {"f1", r.f1},
            {"f1_geometry", r.f1_geometry_mean},
            {"f1_color", r.f1_color_mean},
            {"f2", r.f2},
            {"reference_points", r.reference_points},
            {"distorted_points", r.distorted_points},
            {"patches_used", r.patches_used},
            {"patches_skipped", r.patches_skipped},
            {"patches_empty", r.patches_empty},
            {"config", config_json(r.config)}};
  if (verbose) {
    json patches = json::array();
    for (std::size_t l = 0; l < r.per_patch.size(); ++l) {
      const auto& p = r.per_patch[l];
      patches.push_back({{"seed", l},
                         {"reference_points", p.reference_points},
                         {"distorted_points", p.distorted_points},
                         {"skipped", p.skipped},
                         {"empty", p.empty},
                         {"f1_geometry", p.f1_geometry},
                         {"f1_color", p.f1_color},
                         {"f2", p.f2},
                         {"geometry_self", p.geometry_self},
                         {"geometry_cross", p.geometry_cross},
                         {"color_self", p.color_self},
                         {"color_cross", p.color_cross}});
    }
    j["patches"] = std::move(patches);
  }
  return j;
}

std::string optional_real(double v) { return std::isnan(v) ? std::string("undefined") : decimal(v); }

void print_summary(std::ostream& out, const evaluation::CorrelationSummary& s) {
  out << "n          " << s.n << "\n";
  out << "plcc       " << optional_real(s.plcc) << "\n";
  out << "srocc      " << optional_real(s.srocc) << "\n";
  out << "rmse       " << optional_real(s.rmse) << "\n";
  out << "degenerate " << (s.degenerate ? "yes" : "no") << (s.zero_variance ? " (zero variance)" : "") << "\n";
  for (const auto& [type, t] : s.per_type) {
    out << "type " << type << ": n=" << t.n << " srocc=" << optional_real(t.srocc)
        << (t.degenerate ? " (degenerate)" : "") << "\n";
  }
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Full-reference point cloud quality scoring"};
  app.name("tcdm");
  app.require_subcommand(1);
  std::size_t threads = 0;
  app.add_option("--threads", threads, "Worker cap (0: TCDM_THREADS or all cores)");

  ConfigFlags score_flags;
  std::string ref_path, dist_path;
  bool as_json = false, verbose = false;
  auto* score = app.add_subcommand("score", "Score a distorted cloud against its reference");
  score->add_option("reference", ref_path, "Reference PLY")->required();
  score->add_option("distorted", dist_path, "Distorted PLY")->required();
  score->add_flag("--json", as_json, "Print the full report as JSON");
  score->add_flag("--verbose", verbose, "Include per-patch features in the JSON");
  score->add_option("--threads", threads, "Worker cap");
  add_config_flags(*score, score_flags);

  ConfigFlags batch_flags;
  std::string manifest_path, report_path;
  auto* batch = app.add_subcommand("batch", "Score a manifest and correlate with MOS");
  batch->add_option("manifest", manifest_path, "Manifest CSV")->required();
  batch->add_option("report", report_path, "Report CSV to write")->required();
  batch->add_option("--threads", threads, "Worker cap");
  add_config_flags(*batch, batch_flags);

  std::string eval_path;
  auto* eval = app.add_subcommand("eval", "Recompute correlation statistics from a report CSV");
  eval->add_option("report", eval_path, "Report CSV written by batch")->required();

  std::string in_path, kind_name, seed_text, out_path;
  double level = 0.0;
  bool ascii = false;
  auto* degrade_cmd = app.add_subcommand("degrade", "Write a synthetically distorted copy of a cloud");
  degrade_cmd->add_option("input", in_path, "Input PLY")->required();
  degrade_cmd->add_option("kind", kind_name, "geometry_gaussian | color_noise | downsample")->required();
  degrade_cmd->add_option("level", level, "Noise sigma or keep fraction")->required();
  degrade_cmd->add_option("seed", seed_text, "RNG seed (integer or any label)")->required();
  degrade_cmd->add_option("output", out_path, "Output PLY")->required();
  degrade_cmd->add_flag("--ascii", ascii, "Write ASCII instead of binary");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsage;
  }

  try {
    if (score->parsed()) {
      const MetricConfig config = to_config(score_flags);
      const auto reference = load_ply(ref_path);
      const auto distorted = load_ply(dist_path);
      const auto report = tcdm::score(reference, distorted, config, threads);
      if (as_json) {
        out << report_json(report, verbose).dump(2) << "\n";
      } else {
        out << decimal(report.q) << "\n";
      }
    } else if (batch->parsed()) {
      const MetricConfig config = to_config(batch_flags);
      const auto result = evaluation::run_benchmark(manifest_path, config, report_path, threads);
      err << "scored " << result.computed << " pair(s), " << result.cache_hits << " cache hit(s), " << result.skipped
          << " skipped\n";
      print_summary(out, result.summary);
    } else if (eval->parsed()) {
      auto records = evaluation::read_report(eval_path);
      print_summary(out, evaluation::summarize(records));
    } else if (degrade_cmd->parsed()) {
      const auto kind = parse_degradation_kind(kind_name);
      if (!kind) throw CLI::ValidationError("kind", "unknown degradation '" + kind_name + "'");
      const auto cloud = load_ply(in_path);
      const DegradationSpec spec{*kind, level, parse_seed(seed_text)};
      save_ply(degrade(cloud, spec), out_path, ascii ? PlyEncoding::ascii : PlyEncoding::binary_le);
    }
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kInput;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kInput;
  } catch (const InternalError& e) {
    err << "internal error: " << e.what() << "\n";
    return kInternal;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kInternal;
  }
  return kSuccess;
}

}  // namespace tcdm::cli
