#include "sdc/ssm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sdc/parallel.hpp"

namespace sdc {

namespace {

// Neighbor offsets; in[p][k] holds the message arriving at p from p + kOff[k].
constexpr int kOffX[4] = {-1, 1, 0, 0};
constexpr int kOffY[4] = {0, 0, -1, 1};
constexpr int kOpposite[4] = {1, 0, 3, 2};

struct Graph {
  int width = 0;
  int height = 0;
  long pixels = 0;
  std::vector<long> begin;        // per pixel, offset into candidate arrays
  std::vector<int> count;         // per pixel, candidate count
  std::vector<double> value;      // candidate inverse depth
  std::vector<double> unary;      // candidate matching cost
  std::vector<int32_t> source;    // candidate source pixel index
  std::vector<int> sorted;        // per pixel, candidate order by (value, slot)
  long total = 0;

  long neighbor(long p, int k) const {
    const int x = static_cast<int>(p % width) + kOffX[k];
    const int y = static_cast<int>(p / width) + kOffY[k];
    if (x < 0 || x >= width || y < 0 || y >= height) return -1;
    return static_cast<long>(y) * width + x;
  }
};

Graph build_graph(const CandidateMap& map) {
  Graph g;
  g.width = map.width();
  g.height = map.height();
  g.pixels = map.pixel_count();
  g.begin.resize(g.pixels + 1, 0);
  g.count.resize(g.pixels, 0);
  for (long p = 0; p < g.pixels; ++p) {
    const int x = static_cast<int>(p % g.width), y = static_cast<int>(p / g.width);
    const int n = static_cast<int>(map.at(x, y).size());
    if (n == 0) throw DomainError("lbp_select requires a candidate at every pixel");
    g.count[p] = n;
    g.begin[p + 1] = g.begin[p] + n;
  }
  g.total = g.begin[g.pixels];
  g.value.resize(g.total);
  g.unary.resize(g.total);
  g.source.resize(g.total);
  g.sorted.resize(g.total);
  for (long p = 0; p < g.pixels; ++p) {
    const int x = static_cast<int>(p % g.width), y = static_cast<int>(p / g.width);
    const std::vector<Candidate>& set = map.at(x, y);
    const long b = g.begin[p];
    for (int i = 0; i < g.count[p]; ++i) {
      g.value[b + i] = set[i].inv_depth;
      g.unary[b + i] = set[i].unary_cost;
      g.source[b + i] = set[i].source_index;
      g.sorted[b + i] = i;
    }
    std::sort(g.sorted.begin() + b, g.sorted.begin() + b + g.count[p],
              [&](int a, int c) {
                return std::tie(g.value[b + a], a) < std::tie(g.value[b + c], c);
              });
  }
  return g;
}

}  // namespace

SsmResult lbp_select(const CandidateMap& map, const SsmParams& params) {
  if (params.lambda < 0.0 || !(params.trunc > 0.0) || params.max_iters < 1 ||
      params.epsilon < 0.0)
    throw DomainError("invalid selection parameters");
  const Graph g = build_graph(map);
  const double lambda = params.lambda;
  const double trunc = params.trunc;

  // Incoming messages per pixel and direction, double buffered. Slots of
  // non-existent neighbors stay zero and never change.
  std::vector<double> prev(4 * g.total, 0.0);
  std::vector<double> next(4 * g.total, 0.0);
  std::vector<double> delta(g.pixels, 0.0);

  // Scratch per worker invocation; sized generously once.
  const auto update_pixel = [&](long p, const std::vector<double>& in,
                                std::vector<double>& out) {
    const long b = g.begin[p];
    const int n = g.count[p];

    // h0 = unary + all incoming; per direction subtract the excluded message.
    thread_local std::vector<double> h, hs, prefix, suffix, vs, raw;
    h.assign(n, 0.0);
    for (int i = 0; i < n; ++i) {
      double s = g.unary[b + i];
      for (int k = 0; k < 4; ++k) s += in[4 * (b + i) + k];
      h[i] = s;
    }

    double local_delta = 0.0;
    for (int k = 0; k < 4; ++k) {
      const long q = g.neighbor(p, k);
      if (q < 0) continue;
      // Message p -> q excludes what q sent to p, i.e. direction k of p.
      hs.assign(n, 0.0);
      vs.assign(n, 0.0);
      for (int j = 0; j < n; ++j) {
        const int i = g.sorted[b + j];
        hs[j] = h[i] - in[4 * (b + i) + k];
        vs[j] = g.value[b + i];
      }
      prefix.assign(n, 0.0);
      suffix.assign(n, 0.0);
      double hmin = std::numeric_limits<double>::infinity();
      for (int j = 0; j < n; ++j) {
        const double lin = hs[j] - lambda * vs[j];
        prefix[j] = j ? std::min(prefix[j - 1], lin) : lin;
        hmin = std::min(hmin, hs[j]);
      }
      for (int j = n - 1; j >= 0; --j) {
        const double lin = hs[j] + lambda * vs[j];
        suffix[j] = (j + 1 < n) ? std::min(suffix[j + 1], lin) : lin;
      }
      const double cap = hmin + lambda * trunc;

      const long qb = g.begin[q];
      const int qn = g.count[q];
      raw.assign(qn, 0.0);
      for (int c = 0; c < qn; ++c) {
        const double dv = g.value[qb + c];
        // Last sorted sender value <= dv.
        const auto it = std::upper_bound(vs.begin(), vs.end(), dv);
        const long idx = it - vs.begin() - 1;
        double best = cap;
        if (idx >= 0) best = std::min(best, prefix[idx] + lambda * dv);
        if (idx + 1 < n) best = std::min(best, suffix[idx + 1] - lambda * dv);
        raw[c] = best;
      }

      // Normalization: a per-vector constant shift, argmin-invariant.
      double shift = 0.0;
      if (params.normalization == MessageNormalization::kLogSumExp) {
        const double m = *std::max_element(raw.begin(), raw.end());
        double acc = 0.0;
        for (double r : raw) acc += std::exp(r - m);
        shift = m + std::log(acc);
      } else {
        shift = *std::min_element(raw.begin(), raw.end());
      }

      const int kq = kOpposite[k];
      for (int c = 0; c < qn; ++c) {
        const double msg = raw[c] - shift;
        local_delta = std::max(local_delta, std::abs(msg - in[4 * (qb + c) + kq]));
        out[4 * (qb + c) + kq] = msg;
      }
    }
    delta[p] = local_delta;
  };

  int iters = 0;
  double max_delta = 0.0;
  while (iters < params.max_iters) {
    parallel_for(g.pixels, params.workers,
                 [&](long p) { update_pixel(p, prev, next); });
    ++iters;
    max_delta = 0.0;
    for (long p = 0; p < g.pixels; ++p) max_delta = std::max(max_delta, delta[p]);
    std::swap(prev, next);
    if (max_delta < params.epsilon) break;
  }

  // Beliefs from the converged messages; ties resolve toward the smaller
  // inverse depth, then the smaller source index.
  InvDepthMap selected(g.width, g.height);
  SourceMap sources(g.width, g.height);
  for (long p = 0; p < g.pixels; ++p) {
    const long b = g.begin[p];
    int best = 0;
    double best_belief = std::numeric_limits<double>::infinity();
    for (int i = 0; i < g.count[p]; ++i) {
      double belief = g.unary[b + i];
      for (int k = 0; k < 4; ++k) belief += prev[4 * (b + i) + k];
      const bool wins =
          belief < best_belief ||
          (belief == best_belief &&
           std::tie(g.value[b + i], g.source[b + i]) <
               std::tie(g.value[b + best], g.source[b + best]));
      if (i == 0 || wins) {
        best = i;
        best_belief = belief;
      }
    }
    const int x = static_cast<int>(p % g.width), y = static_cast<int>(p / g.width);
    selected.set(x, y, static_cast<float>(g.value[b + best]));
    sources.set(x, y, g.source[b + best]);
  }
  return SsmResult{std::move(selected), std::move(sources), iters, max_delta};
}

}  // namespace sdc
