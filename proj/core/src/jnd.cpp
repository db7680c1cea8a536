#include "advjnd/jnd.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "advjnd/error.hpp"

namespace advjnd {

const Kernel5x5& background_kernel() {
  static const Kernel5x5 kBackground{{
      1, 1, 1, 1, 1,
      1, 2, 2, 2, 1,
      1, 2, 0, 2, 1,
      1, 2, 2, 2, 1,
      1, 1, 1, 1, 1,
  }, 32.0};
  return kBackground;
}

const std::array<Kernel5x5, 4>& gradient_kernels() {
  static const std::array<Kernel5x5, 4> kGradients{{
      // top-to-bottom luminance change
      {{
          0, 0, 0, 0, 0,
          1, 3, 8, 3, 1,
          0, 0, 0, 0, 0,
          -1, -3, -8, -3, -1,
          0, 0, 0, 0, 0,
      }, 16.0},
      // 45-degree diagonal change
      {{
          0, 0, 1, 0, 0,
          0, 8, 3, 0, 0,
          1, 3, 0, -3, -1,
          0, 0, -3, -8, 0,
          0, 0, -1, 0, 0,
      }, 16.0},
      // 135-degree diagonal change
      {{
          0, 0, 1, 0, 0,
          0, 0, 3, 8, 0,
          -1, -3, 0, 3, 1,
          0, -8, -3, 0, 0,
          0, 0, -1, 0, 0,
      }, 16.0},
      // left-to-right luminance change
      {{
          0, 1, 0, -1, 0,
          0, 3, 0, -3, 0,
          0, 8, 0, -8, 0,
          0, 3, 0, -3, 0,
          0, 1, 0, -1, 0,
      }, 16.0},
  }};
  return kGradients;
}

Tensor background_luminance(const Tensor& plane255) {
  return convolve2d_same(plane255, background_kernel());
}

Tensor max_gradient(const Tensor& plane255) {
  const auto& kernels = gradient_kernels();
  Tensor out;
  for (std::size_t k = 0; k < kernels.size(); ++k) {
    Tensor resp = convolve2d_same(plane255, kernels[k]);
    if (k == 0) {
      out = std::move(resp);
      for (double& v : out.values) v = std::fabs(v);
    } else {
      for (std::size_t i = 0; i < out.values.size(); ++i) {
        out.values[i] = std::max(out.values[i], std::fabs(resp.values[i]));
      }
    }
  }
  return out;
}

static void require_luminance_range(double bg) {
  if (!(bg >= 0.0 && bg <= 255.0)) {
    throw Error(Errc::domain_error, "jnd",
                "background luminance must lie in [0,255], got " + std::to_string(bg));
  }
}

double luminance_adaptation(double bg, const JndParams& params) {
  require_luminance_range(bg);
  if (bg <= 127.0) {
    return params.visibility_threshold * (1.0 - std::sqrt(bg / 127.0)) + params.threshold_floor;
  }
  return params.bright_slope * (bg - 127.0) + params.threshold_floor;
}

double texture_masking(double bg, double mg, const JndParams& params) {
  require_luminance_range(bg);
  if (!(mg >= 0.0)) {
    throw Error(Errc::domain_error, "jnd", "max gradient must be nonnegative");
  }
  const double gain = params.masking_gain_offset * bg + params.masking_gain_slope;
  const double bias = params.masking_bias - bg * params.masking_bias_slope;
  return mg * gain + bias;
}

JndMap jnd_map(const ImageTensor& image, const JndParams& params) {
  if (image.height < 5 || image.width < 5) {
    throw Error(Errc::dimension_too_small, "jnd",
                "jnd_map needs images of at least 5x5 pixels");
  }
  JndMap map(image.height, image.width, image.channels);
  for (int c = 0; c < image.channels; ++c) {
    Tensor plane = extract_channel(image, c);
    for (double& v : plane.values) v *= 255.0;
    const Tensor bg = background_luminance(plane);
    const Tensor mg = max_gradient(plane);
    for (int y = 0; y < image.height; ++y) {
      for (int x = 0; x < image.width; ++x) {
        const double b = bg.at(y, x, 0);
        const double g = mg.at(y, x, 0);
        const double threshold =
            std::max(texture_masking(b, g, params), luminance_adaptation(b, params));
        map.at(y, x, c) = threshold / 255.0;
      }
    }
  }
  return map;
}

JndMap jnd_power(const JndMap& map, double power) {
  if (!(power >= 1.0)) {
    throw Error(Errc::domain_error, "jnd", "jnd_power expects power >= 1");
  }
  JndMap out = map;
  if (power == 1.0) return out;
  if (power == 2.0) {
    for (double& v : out.values) v *= v;
    return out;
  }
  for (double& v : out.values) v = std::pow(v, power);
  return out;
}

std::pair<ImageTensor, ImageTensor> hide_gaussian_noise(const ImageTensor& image,
                                                        double sigma2,
                                                        std::uint64_t seed,
                                                        const JndParams& params) {
  if (!(sigma2 > 0.0)) {
    throw Error(Errc::domain_error, "jnd", "noise variance must be positive");
  }
  const JndMap thresholds = jnd_map(image, params);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, std::sqrt(sigma2));

  ImageTensor noisy = image;
  ImageTensor hidden = image;
  for (std::size_t i = 0; i < image.values.size(); ++i) {
    const double n = noise(rng);
    const double cap = thresholds.values[i];
    const double capped = std::copysign(std::min(std::fabs(n), cap), n);
    noisy.values[i] += n;
    hidden.values[i] += capped;
  }
  return {clamp01(std::move(noisy)), clamp01(std::move(hidden))};
}

}  // namespace advjnd
