#include "advjnd/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "advjnd/error.hpp"

namespace advjnd {

namespace {

constexpr double kNormStabilizer = 1e-6;

// Channel-mean luminance at (y, x) with coordinates clamped to the image.
double luminance_at(const ImageTensor& img, int y, int x) {
  y = std::clamp(y, 0, img.height - 1);
  x = std::clamp(x, 0, img.width - 1);
  double sum = 0.0;
  for (int c = 0; c < img.channels; ++c) sum += img.at(y, x, c);
  return sum / img.channels;
}

}  // namespace

HogDescriptor hog_descriptor(const ImageTensor& image, const HogParams& params) {
  if (params.orientations < 1 || params.cell_size < 1) {
    throw Error(Errc::invalid_config, "eval", "bad HOG parameters");
  }
  const int cells_y = image.height / params.cell_size;
  const int cells_x = image.width / params.cell_size;
  if (cells_y < 1 || cells_x < 1) {
    throw Error(Errc::image_too_small, "eval",
                "image smaller than one " + std::to_string(params.cell_size) + "px cell");
  }

  HogDescriptor desc;
  desc.orientations = params.orientations;
  desc.cell_size = params.cell_size;
  desc.cells_y = cells_y;
  desc.cells_x = cells_x;
  desc.bins.assign(static_cast<std::size_t>(cells_y) * cells_x * params.orientations, 0.0);

  const double bin_width = std::numbers::pi / params.orientations;
  for (int cy = 0; cy < cells_y; ++cy) {
    for (int cx = 0; cx < cells_x; ++cx) {
      double* cell =
          desc.bins.data() +
          (static_cast<std::size_t>(cy) * cells_x + cx) * params.orientations;
      for (int dy = 0; dy < params.cell_size; ++dy) {
        for (int dx = 0; dx < params.cell_size; ++dx) {
          const int y = cy * params.cell_size + dy;
          const int x = cx * params.cell_size + dx;
          const double gx = (luminance_at(image, y, x + 1) - luminance_at(image, y, x - 1)) / 2.0;
          const double gy = (luminance_at(image, y + 1, x) - luminance_at(image, y - 1, x)) / 2.0;
          const double mag = std::sqrt(gx * gx + gy * gy);
          if (mag == 0.0) continue;
          double angle = std::atan2(gy, gx);  // (-pi, pi]
          if (angle < 0.0) angle += std::numbers::pi;
          if (angle >= std::numbers::pi) angle = 0.0;
          int bin = static_cast<int>(angle / bin_width);
          if (bin >= params.orientations) bin = params.orientations - 1;
          cell[bin] += mag;
        }
      }
      double norm2 = 0.0;
      for (int b = 0; b < params.orientations; ++b) norm2 += cell[b] * cell[b];
      const double norm = std::sqrt(norm2 + kNormStabilizer * kNormStabilizer);
      for (int b = 0; b < params.orientations; ++b) cell[b] /= norm;
    }
  }
  return desc;
}

double hog_distance(const HogDescriptor& a, const HogDescriptor& b) {
  if (a.orientations != b.orientations || a.cell_size != b.cell_size ||
      a.cells_y != b.cells_y || a.cells_x != b.cells_x) {
    throw Error(Errc::geometry_mismatch, "eval", "HOG descriptors have different geometry");
  }
  double sum2 = 0.0;
  for (std::size_t i = 0; i < a.bins.size(); ++i) {
    const double d = a.bins[i] - b.bins[i];
    sum2 += d * d;
  }
  return std::sqrt(sum2);
}

double psnr(const ImageTensor& reference, const ImageTensor& candidate) {
  if (!reference.same_shape(candidate)) {
    throw Error(Errc::shape_mismatch, "eval", "psnr shapes differ");
  }
  double sum2 = 0.0;
  for (std::size_t i = 0; i < reference.values.size(); ++i) {
    const double d = reference.values[i] - candidate.values[i];
    sum2 += d * d;
  }
  const double mse = sum2 / static_cast<double>(reference.values.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(1.0 / mse);
}

FidelityReport fidelity(const ImageTensor& reference, const ImageTensor& candidate,
                        const HogParams& params) {
  if (!reference.same_shape(candidate)) {
    throw Error(Errc::shape_mismatch, "eval", "fidelity shapes differ");
  }
  FidelityReport report;
  double sum2 = 0.0;
  for (std::size_t i = 0; i < reference.values.size(); ++i) {
    const double d = candidate.values[i] - reference.values[i];
    report.linf = std::max(report.linf, std::fabs(d));
    sum2 += d * d;
  }
  report.l2 = std::sqrt(sum2);
  report.psnr = psnr(reference, candidate);
  report.hog_dist = hog_distance(hog_descriptor(reference, params),
                                 hog_descriptor(candidate, params));
  return report;
}

}  // namespace advjnd
