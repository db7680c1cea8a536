#include "advjnd/tensor.hpp"

#include <algorithm>

#include "advjnd/error.hpp"

namespace advjnd {

Tensor clamp01(Tensor t) {
  for (double& v : t.values) v = std::clamp(v, 0.0, 1.0);
  return t;
}

static void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (!a.same_shape(b)) {
    throw Error(Errc::shape_mismatch, "image_core",
                std::string(op) + " requires tensors of equal shape");
  }
}

Tensor add(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "add");
  Tensor out = a;
  for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] += b.values[i];
  return out;
}

Tensor subtract(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "subtract");
  Tensor out = a;
  for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] -= b.values[i];
  return out;
}

Tensor extract_channel(const Tensor& t, int channel) {
  if (channel < 0 || channel >= t.channels) {
    throw Error(Errc::shape_mismatch, "image_core", "channel index out of range");
  }
  Tensor out(t.height, t.width, 1);
  for (int y = 0; y < t.height; ++y) {
    for (int x = 0; x < t.width; ++x) {
      out.at(y, x, 0) = t.at(y, x, channel);
    }
  }
  return out;
}

Tensor convolve2d_same(const Tensor& plane, const Kernel5x5& kernel) {
  if (plane.channels != 1) {
    throw Error(Errc::shape_mismatch, "image_core",
                "convolve2d_same expects a single-channel plane");
  }
  if (plane.height < 5 || plane.width < 5) {
    throw Error(Errc::dimension_too_small, "image_core",
                "convolve2d_same needs at least a 5x5 plane");
  }
  if (!(kernel.normalizer > 0.0)) {
    throw Error(Errc::domain_error, "image_core", "kernel normalizer must be positive");
  }

  const int h = plane.height;
  const int w = plane.width;
  Tensor out(h, w, 1);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int m = 0; m < 5; ++m) {
        const int yy = std::clamp(y + m - 2, 0, h - 1);
        const double* row = plane.values.data() + static_cast<std::size_t>(yy) * w;
        for (int n = 0; n < 5; ++n) {
          const int xx = std::clamp(x + n - 2, 0, w - 1);
          acc += kernel.at(m, n) * row[xx];
        }
      }
      out.values[static_cast<std::size_t>(y) * w + x] = acc / kernel.normalizer;
    }
  }
  return out;
}

}  // namespace advjnd
