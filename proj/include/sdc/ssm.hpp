#pragma once

#include "sdc/candidates.hpp"

namespace sdc {

enum class MessageNormalization {
  kLogSumExp,    // subtract log-sum-exp of the message vector (stable form)
  kSubtractMin,  // subtract the vector minimum; argmin-equivalent
};

struct SsmParams {
  double lambda = 100.0;      // smoothness weight
  double trunc = 0.05;        // pairwise truncation [1/m]
  int max_iters = 60;
  double epsilon = 1e-4;      // convergence threshold on max message change
  MessageNormalization normalization = MessageNormalization::kLogSumExp;
  int workers = 0;
};

/// Per-pixel location in image 1 of the sparse value selected for that pixel.
class SourceMap {
 public:
  SourceMap(int width, int height) : indices_(width, height, int32_t{-1}) {}

  int width() const { return indices_.width(); }
  int height() const { return indices_.height(); }
  int32_t index(int x, int y) const { return indices_(x, y); }
  Eigen::Vector2i at(int x, int y) const {
    const int32_t i = indices_(x, y);
    return {i % width(), i / width()};
  }
  void set(int x, int y, int32_t source_index) { indices_(x, y) = source_index; }
  const Grid<int32_t>& grid() const { return indices_; }

 private:
  Grid<int32_t> indices_;
};

struct SsmResult {
  InvDepthMap inv_depth;
  SourceMap sources;
  int iterations = 0;
  double final_delta = 0.0;
};

/// Selects one candidate per pixel by min-sum loopy belief propagation on the
/// 4-connected grid, minimizing unary matching costs plus a truncated-linear
/// coupling of the selected inverse depth values. Synchronous message
/// schedule, messages initialized to zero; the result is independent of the
/// worker count.
SsmResult lbp_select(const CandidateMap& map, const SsmParams& params);

}  // namespace sdc
