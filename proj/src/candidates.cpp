#include "sdc/candidates.hpp"

#include <cmath>
#include <queue>
#include <tuple>

#include "sdc/parallel.hpp"

namespace sdc {

CandidateMap assign_candidates(const InvDepthMap& sparse, double radius,
                               int min_count) {
  if (!(radius > 0.0)) throw DomainError("candidate radius must be > 0");
  if (min_count < 1) throw DomainError("candidate min count must be >= 1");

  const int w = sparse.width();
  const int h = sparse.height();
  const int reach = static_cast<int>(std::ceil(radius));
  // Window offsets with strict Euclidean distance < radius, row-major order.
  std::vector<Eigen::Vector2i> offsets;
  for (int dy = -reach; dy <= reach; ++dy)
    for (int dx = -reach; dx <= reach; ++dx)
      if (static_cast<double>(dx) * dx + static_cast<double>(dy) * dy <
          radius * radius)
        offsets.emplace_back(dx, dy);

  CandidateMap map(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      auto set = std::make_shared<std::vector<Candidate>>();
      for (const Eigen::Vector2i& off : offsets) {
        const int sx = x + off.x(), sy = y + off.y();
        if (!sparse.contains(sx, sy)) continue;
        const std::optional<float> d = sparse.at(sx, sy);
        if (!d) continue;
        Candidate c;
        c.inv_depth = *d;
        c.source_index = sy * w + sx;
        set->push_back(c);
      }
      if (static_cast<int>(set->size()) >= min_count)
        map.store(x, y, std::move(set));
    }
  }
  return map;
}

CandidateMap ignns_interpolate(const CandidateMap& map, const ImageGrid& img1,
                               double path_cost_const) {
  const int w = map.width();
  const int h = map.height();
  if (path_cost_const < 0.0)
    throw DomainError("path cost constant must be >= 0");
  if (img1.width() != w || img1.height() != h)
    throw DimensionError("guide image size differs from candidate map");

  const GradientField grad = image_gradient(img1);
  const long n = static_cast<long>(w) * h;

  // Multi-source Dijkstra over node weights |grad|^2 + c. The seed pixel
  // itself does not contribute to the path cost. Ties resolve to the seed
  // with the smallest row-major index.
  struct QueueEntry {
    double cost;
    int32_t seed;
    int32_t pixel;
    bool operator>(const QueueEntry& o) const {
      return std::tie(cost, seed, pixel) > std::tie(o.cost, o.seed, o.pixel);
    }
  };
  std::priority_queue<QueueEntry, std::vector<QueueEntry>, std::greater<>> queue;
  std::vector<double> dist(n, std::numeric_limits<double>::infinity());
  std::vector<int32_t> seed_of(n, -1);
  std::vector<uint8_t> settled(n, 0);

  bool any_seed = false;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!map.has_candidates(x, y)) continue;
      const int32_t i = y * w + x;
      dist[i] = 0.0;
      seed_of[i] = i;
      queue.push({0.0, i, i});
      any_seed = true;
    }
  }
  if (!any_seed) throw NoDataError("IGNNS requires at least one non-empty set");

  const auto node_weight = [&](int x, int y) {
    return grad.squared_norm(x, y) + path_cost_const;
  };
  constexpr int kDx[4] = {1, -1, 0, 0};
  constexpr int kDy[4] = {0, 0, 1, -1};

  while (!queue.empty()) {
    const QueueEntry top = queue.top();
    queue.pop();
    if (settled[top.pixel]) continue;
    settled[top.pixel] = 1;
    seed_of[top.pixel] = top.seed;
    const int x = top.pixel % w, y = top.pixel / w;
    for (int k = 0; k < 4; ++k) {
      const int nx = x + kDx[k], ny = y + kDy[k];
      if (nx < 0 || nx >= w || ny < 0 || ny >= h) continue;
      const int32_t ni = ny * w + nx;
      if (settled[ni]) continue;
      const double ncost = top.cost + node_weight(nx, ny);
      if (ncost < dist[ni] || (ncost == dist[ni] && top.seed < seed_of[ni])) {
        dist[ni] = ncost;
        seed_of[ni] = top.seed;
        queue.push({ncost, top.seed, ni});
      }
    }
  }

  CandidateMap out(w, h);
  for (long i = 0; i < n; ++i) {
    const int x = static_cast<int>(i % w), y = static_cast<int>(i / w);
    if (map.has_candidates(x, y)) {
      out.store(x, y, map.set(x, y));
    } else {
      const int32_t z = seed_of[i];
      out.store(x, y, map.set(z % w, z / w));
    }
  }
  return out;
}

namespace {

int64_t warp_key(const std::optional<Eigen::Vector2i>& warp) {
  if (!warp) return std::numeric_limits<int64_t>::min();
  return (static_cast<int64_t>(warp->y()) << 32) |
         static_cast<int64_t>(static_cast<uint32_t>(warp->x()));
}

}  // namespace

CandidateMap attach_correspondences(const CandidateMap& map,
                                    const CostContext& context, int workers,
                                    PruneRule rule) {
  const int w = map.width();
  const int h = map.height();
  CandidateMap out(w, h);

  std::vector<CandidateMap::Set> result(static_cast<size_t>(w) * h);
  parallel_for(static_cast<long>(w) * h, workers, [&](long i) {
    const int x = static_cast<int>(i % w), y = static_cast<int>(i / w);
    if (!map.has_candidates(x, y)) return;
    const std::vector<Candidate>& in = map.at(x, y);

    std::vector<Candidate> scored;
    scored.reserve(in.size());
    for (const Candidate& c : in) {
      Candidate s = c;
      s.warp = context.warp({x, y}, c.inv_depth);
      s.unary_cost = context.cost_at({x, y}, s.warp);
      scored.push_back(s);
    }

    // Among candidates sharing a warp, one survives per the prune rule
    // (ties: smaller row-major source index). Original order is preserved
    // for the survivors.
    const auto rank = [&](const Candidate& c) {
      if (rule == PruneRule::kNearestSource) {
        const int sx = c.source_index % w, sy = c.source_index / w;
        const double ddx = sx - x, ddy = sy - y;
        return ddx * ddx + ddy * ddy;
      }
      return static_cast<double>(c.inv_depth);  // smaller disparity wins
    };
    std::vector<uint8_t> keep(scored.size(), 1);
    for (size_t a = 0; a < scored.size(); ++a) {
      if (!keep[a]) continue;
      for (size_t b = a + 1; b < scored.size(); ++b) {
        if (!keep[b]) continue;
        if (warp_key(scored[a].warp) != warp_key(scored[b].warp)) continue;
        const double da = rank(scored[a]), db = rank(scored[b]);
        const bool b_wins =
            db < da || (db == da && scored[b].source_index < scored[a].source_index);
        if (b_wins) {
          keep[a] = 0;
          break;
        }
        keep[b] = 0;
      }
    }
    auto pruned = std::make_shared<std::vector<Candidate>>();
    for (size_t a = 0; a < scored.size(); ++a)
      if (keep[a]) pruned->push_back(scored[a]);
    result[static_cast<size_t>(i)] = std::move(pruned);
  });

  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      out.store(x, y, std::move(result[static_cast<size_t>(y) * w + x]));
  return out;
}

}  // namespace sdc
