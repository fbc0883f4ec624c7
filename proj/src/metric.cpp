#include <tcdm/metric.hpp>

#include <cmath>
#include <sstream>

#include <tcdm/error.hpp>
#include <tcdm/parallel.hpp>

namespace tcdm {

void validate(const MetricConfig& config) {
  if (config.seeds == 0) throw InputError("seed count L must be positive");
  if (config.k == 0) throw InputError("neighbor count K must be positive");
  if (!(config.t > 0.0) || !std::isfinite(config.t)) throw InputError("T must be a positive finite number");
  if (!(config.alpha >= 0.0 && config.alpha <= 1.0)) throw InputError("alpha must lie in [0, 1]");
  if (!(config.ridge >= 0.0) || !std::isfinite(config.ridge)) throw InputError("ridge must be nonnegative");
}

std::optional<ColorSpace> parse_color_space(std::string_view name) {
  if (name == "rgb") return ColorSpace::rgb;
  if (name == "yuv") return ColorSpace::yuv;
  return std::nullopt;
}

std::string_view to_string(ColorSpace space) { return space == ColorSpace::rgb ? "rgb" : "yuv"; }

std::optional<SamplingStrategy> parse_sampling_strategy(std::string_view name) {
  if (name == "fps") return SamplingStrategy::fps;
  if (name == "random" || name == "rs") return SamplingStrategy::random;
  return std::nullopt;
}

std::string_view to_string(SamplingStrategy strategy) { return strategy == SamplingStrategy::fps ? "fps" : "random"; }

std::string describe(const MetricConfig& config) {
  std::ostringstream out;
  out.precision(17);
  out << "L=" << config.seeds << ";K=" << config.k << ";T=" << config.t << ";alpha=" << config.alpha
      << ";sampling=" << to_string(config.sampling.strategy);
  if (config.sampling.strategy == SamplingStrategy::random) out << "(" << config.sampling.rng_seed << ")";
  out << ";weights=" << to_string(config.weight_scheme) << ";color=" << to_string(config.color_space)
      << ";eta=" << to_string(config.eta_mode) << ";raw_color_weights=" << config.raw_color_weights
      << ";cross_exclude_coincident=" << config.cross_exclude_coincident << ";ridge=" << config.ridge;
  return out.str();
}

Vec3 rgb_to_yuv(const Vec3& rgb) {
  const double r = rgb[0], g = rgb[1], b = rgb[2];
  return {0.299 * r + 0.587 * g + 0.114 * b, -0.168736 * r - 0.331264 * g + 0.5 * b + 128.0,
          0.5 * r - 0.418688 * g - 0.081312 * b + 128.0};
}

PointCloud convert_color_space(const PointCloud& cloud, ColorSpace space) {
  if (space == ColorSpace::rgb) return cloud;
  PointCloud out = cloud;
  for (auto& p : out.points) p.color = rgb_to_yuv(p.color);
  return out;
}

namespace {

FeatureOptions feature_options(const MetricConfig& config) {
  FeatureOptions options;
  options.savar.k = config.k;
  options.savar.scheme = config.weight_scheme;
  options.savar.eta_mode = config.eta_mode;
  options.savar.ridge = config.ridge;
  options.savar.cross_exclude_coincident = config.cross_exclude_coincident;
  options.t = config.t;
  options.color_space = config.color_space;
  options.raw_color_weights = config.raw_color_weights;
  return options;
}

std::vector<std::vector<Point>> split_patches(const PointCloud& cloud, const std::vector<std::uint32_t>& labels,
                                              const SeedSet& seeds) {
  std::vector<std::vector<Point>> patches(seeds.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    Point p = cloud.points[i];
    p.position -= seeds.positions[labels[i]];
    patches[labels[i]].push_back(p);
  }
  return patches;
}

}  // namespace

PreparedReference::PreparedReference(const PointCloud& reference, const MetricConfig& config, std::size_t threads)
    : config_(config), feature_options_(feature_options(config)), reference_points_(reference.size()) {
  validate(config_);
  if (reference.empty()) throw InputError("reference cloud is empty");
  validate(reference);
  if (config_.seeds > reference.size()) {
    throw InputError("seed count L=" + std::to_string(config_.seeds) + " exceeds the " +
                     std::to_string(reference.size()) + " reference points");
  }
  threads = resolve_thread_count(threads);

  const PointCloud converted = convert_color_space(reference, config_.color_space);
  seeds_ = select_seeds(converted, config_.seeds, config_.sampling);
  reference_patches_ = split_patches(converted, assign_labels(converted, seeds_, threads), seeds_);

  self_terms_.resize(reference_patches_.size());
  parallel_for(reference_patches_.size(), threads,
               [&](std::size_t l) { self_terms_[l] = self_terms(reference_patches_[l], feature_options_); });
}

QualityReport PreparedReference::score(const PointCloud& distorted, std::size_t threads) const {
  if (distorted.empty()) throw InputError("distorted cloud is empty");
  validate(distorted);
  threads = resolve_thread_count(threads);

  const PointCloud converted = convert_color_space(distorted, config_.color_space);
  const auto distorted_patches = split_patches(converted, assign_labels(converted, seeds_, threads), seeds_);

  QualityReport report;
  report.config = config_;
  report.reference_points = reference_points_;
  report.distorted_points = distorted.size();
  report.per_patch.resize(seeds_.size());
  parallel_for(seeds_.size(), threads, [&](std::size_t l) {
    PatchPair pair;
    pair.seed_index = l;
    pair.seed = seeds_.positions[l];
    pair.reference = reference_patches_[l];
    pair.distorted = distorted_patches[l];
    const SelfTerms* self = self_terms_[l] ? &*self_terms_[l] : nullptr;
    report.per_patch[l] = patch_features(pair, feature_options_, self);
  });

  // Ordered reduction: independent of how patches were scheduled.
  double sum_geometry = 0.0, sum_color = 0.0, sum_f2 = 0.0;
  for (const auto& f : report.per_patch) {
    if (f.skipped) {
      ++report.patches_skipped;
      continue;
    }
    ++report.patches_used;
    if (f.empty) ++report.patches_empty;
    sum_geometry += f.f1_geometry;
    sum_color += f.f1_color;
    sum_f2 += f.f2;
  }
  if (report.patches_used == 0) throw InputError("every patch has fewer than two reference points");
  const double used = static_cast<double>(report.patches_used);
  report.f1_geometry_mean = sum_geometry / used;
  report.f1_color_mean = sum_color / used;
  report.f1 = report.f1_geometry_mean * report.f1_color_mean;
  report.f2 = sum_f2 / used;
  report.q = config_.alpha * report.f1 + (1.0 - config_.alpha) * report.f2;
  return report;
}

QualityReport score(const PointCloud& reference, const PointCloud& distorted, const MetricConfig& config,
                    std::size_t threads) {
  return PreparedReference(reference, config, threads).score(distorted, threads);
}

}  // namespace tcdm
