#include "sdc/core.hpp"

namespace sdc {

GradientField image_gradient(const ImageGrid& img) {
  const int w = img.width();
  const int h = img.height();
  if (w < 2 || h < 2)
    throw DimensionError("image gradient requires width >= 2 and height >= 2");
  GradientField g{Grid<float>(w, h, 0.0f), Grid<float>(w, h, 0.0f)};
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (x + 1 < w) g.dx(x, y) = img(x + 1, y) - img(x, y);
      if (y + 1 < h) g.dy(x, y) = img(x, y + 1) - img(x, y);
    }
  }
  return g;
}

}  // namespace sdc
