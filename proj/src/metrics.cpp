#include "sdc/metrics.hpp"

#include <cmath>

#include "sdc/parallel.hpp"

namespace sdc {

namespace {

void check_same_size(const InvDepthMap& a, const InvDepthMap& b) {
  if (a.width() != b.width() || a.height() != b.height())
    throw DimensionError("metric inputs differ in size");
}

}  // namespace

double error_rate(const InvDepthMap& estimate, const InvDepthMap& truth,
                  const StereoGeometry& geometry, double threshold_px) {
  check_same_size(estimate, truth);
  const RectifiedStereo& g = geometry.rectified_stereo();
  long valid = 0, outliers = 0;
  for (int y = 0; y < truth.height(); ++y) {
    for (int x = 0; x < truth.width(); ++x) {
      const std::optional<float> dt = truth.at(x, y);
      if (!dt) continue;
      ++valid;
      const std::optional<float> de = estimate.at(x, y);
      if (!de) {
        ++outliers;
        continue;
      }
      const double err = std::abs(g.focal * g.baseline * (*de - *dt));
      if (err >= threshold_px) ++outliers;
    }
  }
  if (valid == 0) throw NoDataError("no valid pixels to evaluate");
  return 100.0 * static_cast<double>(outliers) / static_cast<double>(valid);
}

double mae(const InvDepthMap& estimate, const InvDepthMap& truth) {
  check_same_size(estimate, truth);
  std::vector<double> errors;
  for (int y = 0; y < truth.height(); ++y) {
    for (int x = 0; x < truth.width(); ++x) {
      const std::optional<float> dt = truth.at(x, y);
      const std::optional<float> de = estimate.at(x, y);
      if (!dt || !de) continue;
      errors.push_back(std::abs(1.0 / static_cast<double>(*de) -
                                1.0 / static_cast<double>(*dt)));
    }
  }
  if (errors.empty()) throw NoDataError("no valid pixels to evaluate");
  return pairwise_sum(errors) / static_cast<double>(errors.size());
}

double imae(const InvDepthMap& estimate, const InvDepthMap& truth) {
  check_same_size(estimate, truth);
  std::vector<double> errors;
  for (int y = 0; y < truth.height(); ++y) {
    for (int x = 0; x < truth.width(); ++x) {
      const std::optional<float> dt = truth.at(x, y);
      const std::optional<float> de = estimate.at(x, y);
      if (!dt || !de) continue;
      errors.push_back(std::abs(static_cast<double>(*de) - static_cast<double>(*dt)));
    }
  }
  if (errors.empty()) throw NoDataError("no valid pixels to evaluate");
  return pairwise_sum(errors) / static_cast<double>(errors.size());
}

std::vector<RangeBucket> range_bucketed_mae(const InvDepthMap& estimate,
                                            const InvDepthMap& truth,
                                            const std::vector<double>& edges_m) {
  check_same_size(estimate, truth);
  if (edges_m.size() < 2) throw DomainError("need at least two bucket edges");
  for (size_t i = 1; i < edges_m.size(); ++i)
    if (!(edges_m[i] > edges_m[i - 1]))
      throw DomainError("bucket edges must be strictly increasing");

  const size_t buckets = edges_m.size() - 1;
  std::vector<std::vector<double>> errors(buckets);
  for (int y = 0; y < truth.height(); ++y) {
    for (int x = 0; x < truth.width(); ++x) {
      const std::optional<float> dt = truth.at(x, y);
      const std::optional<float> de = estimate.at(x, y);
      if (!dt || !de) continue;
      const double depth = 1.0 / static_cast<double>(*dt);
      for (size_t b = 0; b < buckets; ++b) {
        if (depth >= edges_m[b] && depth < edges_m[b + 1]) {
          errors[b].push_back(std::abs(1.0 / static_cast<double>(*de) - depth));
          break;
        }
      }
    }
  }

  std::vector<RangeBucket> out(buckets);
  for (size_t b = 0; b < buckets; ++b) {
    out[b].lower_m = edges_m[b];
    out[b].upper_m = edges_m[b + 1];
    out[b].count = static_cast<long>(errors[b].size());
    if (!errors[b].empty())
      out[b].mae_m = pairwise_sum(errors[b]) / static_cast<double>(errors[b].size());
  }
  return out;
}

}  // namespace sdc
