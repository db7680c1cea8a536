#pragma once

#include <array>
#include <cstdint>
#include <utility>

#include "advjnd/tensor.hpp"

namespace advjnd {

// Constants of the luminance-adaptation and texture-masking curves, stated
// on the 0..255 luminance scale.
struct JndParams {
  double visibility_threshold = 17.0;  // adaptation threshold at black
  double bright_slope = 3.0 / 128.0;   // adaptation slope above mid grey
  double threshold_floor = 3.0;        // adaptation value at mid grey
  double masking_gain_offset = 0.0001; // texture gain: mg * (a*bg + b), the a
  double masking_gain_slope = 0.115;   // ... and the b
  double masking_bias = 0.5;           // texture bias: lambda - bg * slope
  double masking_bias_slope = 0.01;
};

// 5x5 weighted-mean stencil for local background luminance (normalizer 32).
const Kernel5x5& background_kernel();

// Four directional 5x5 gradient stencils (normalizer 16, weights sum to 0),
// ordered: horizontal-edge, 45-degree, 135-degree, vertical-edge.
const std::array<Kernel5x5, 4>& gradient_kernels();

// Local background luminance of a single-channel plane on the 0..255 scale.
Tensor background_luminance(const Tensor& plane255);

// Max absolute response over the four directional stencils, per pixel.
Tensor max_gradient(const Tensor& plane255);

// Visibility threshold from background luminance alone (0..255 scale).
double luminance_adaptation(double bg, const JndParams& params = {});

// Visibility threshold from local activity (0..255 scale).
double texture_masking(double bg, double mg, const JndParams& params = {});

// Per-pixel, per-channel just-noticeable-difference thresholds on the [0,1]
// pixel scale: max(texture_masking, luminance_adaptation) / 255. Requires
// height >= 5 and width >= 5.
JndMap jnd_map(const ImageTensor& image, const JndParams& params = {});

// Elementwise power of a threshold map; power 2 gives map*map exactly.
JndMap jnd_power(const JndMap& map, double power);

// Draw zero-mean Gaussian noise with variance sigma2, then return
// {plain noisy image, image with the same noise capped per pixel to the
// JND threshold}. Both outputs are clamped to [0,1].
std::pair<ImageTensor, ImageTensor> hide_gaussian_noise(const ImageTensor& image,
                                                        double sigma2,
                                                        std::uint64_t seed,
                                                        const JndParams& params = {});

}  // namespace advjnd
