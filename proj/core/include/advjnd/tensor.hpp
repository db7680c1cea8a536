#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace advjnd {

struct Shape3 {
  int height = 0;
  int width = 0;
  int channels = 0;

  bool operator==(const Shape3&) const = default;
  std::size_t volume() const {
    return static_cast<std::size_t>(height) * static_cast<std::size_t>(width) *
           static_cast<std::size_t>(channels);
  }
};

// Dense H x W x C grid of doubles, row-major with the channel index fastest.
// Images keep values in [0,1]; perturbations and threshold maps reuse the
// same storage with their own ranges.
struct Tensor {
  int height = 0;
  int width = 0;
  int channels = 0;
  std::vector<double> values;

  Tensor() = default;
  Tensor(int h, int w, int c, double fill = 0.0)
      : height(h),
        width(w),
        channels(c),
        values(static_cast<std::size_t>(h) * static_cast<std::size_t>(w) *
                   static_cast<std::size_t>(c),
               fill) {}

  Shape3 shape() const { return {height, width, channels}; }
  bool same_shape(const Tensor& other) const { return shape() == other.shape(); }
  std::size_t size() const { return values.size(); }

  std::size_t index(int y, int x, int c) const {
    return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
            static_cast<std::size_t>(x)) *
               static_cast<std::size_t>(channels) +
           static_cast<std::size_t>(c);
  }
  double& at(int y, int x, int c) { return values[index(y, x, c)]; }
  double at(int y, int x, int c) const { return values[index(y, x, c)]; }
};

using ImageTensor = Tensor;   // pixel values in [0,1]
using JndMap = Tensor;        // strictly positive thresholds on the [0,1] scale
using Perturbation = Tensor;  // signed additive noise

// 5x5 stencil with an explicit positive divisor applied after accumulation.
struct Kernel5x5 {
  std::array<double, 25> weights{};
  double normalizer = 1.0;

  double at(int row, int col) const { return weights[static_cast<std::size_t>(row) * 5 + col]; }
};

// Clamp every value into [0,1].
Tensor clamp01(Tensor t);

// Elementwise sum / difference; shapes must match.
Tensor add(const Tensor& a, const Tensor& b);
Tensor subtract(const Tensor& a, const Tensor& b);

// Copy one channel out as an H x W x 1 plane.
Tensor extract_channel(const Tensor& t, int channel);

// Same-size 5x5 correlation of a single-channel plane with replicated
// borders: out(i,j) = (1/normalizer) * sum_{m,n} w(m,n) * in(i+m-2, j+n-2),
// out-of-range coordinates clamped to the nearest edge pixel.
Tensor convolve2d_same(const Tensor& plane, const Kernel5x5& kernel);

}  // namespace advjnd
