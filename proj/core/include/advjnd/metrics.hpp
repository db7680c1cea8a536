#pragma once

#include <vector>

#include "advjnd/tensor.hpp"

namespace advjnd {

struct HogParams {
  int orientations = 8;  // unsigned bins over [0, 180) degrees
  int cell_size = 16;    // pixels per cell edge
};

struct HogDescriptor {
  int orientations = 0;
  int cell_size = 0;
  int cells_y = 0;
  int cells_x = 0;
  // cells_y * cells_x * orientations values, cell-major then bin.
  std::vector<double> bins;
};

// Gradient-orientation histogram of the channel-mean luminance. Gradients are
// central differences with edge indices clamped; each pixel's magnitude lands
// entirely in the bin holding its unsigned orientation. Trailing pixels that
// do not fill a cell are dropped, and each cell is L2-normalized with a 1e-6
// stabilizer (a constant image yields all-zero bins).
HogDescriptor hog_descriptor(const ImageTensor& image, const HogParams& params = {});

// Euclidean distance between two descriptors of identical geometry.
double hog_distance(const HogDescriptor& a, const HogDescriptor& b);

// Peak signal-to-noise ratio over [0,1] images: 10*log10(1/mse). Identical
// images yield +infinity.
double psnr(const ImageTensor& reference, const ImageTensor& candidate);

struct FidelityReport {
  double linf = 0.0;
  double l2 = 0.0;
  double psnr = 0.0;  // +infinity when the images are identical
  double hog_dist = 0.0;
};

// Distortion summary of `candidate` against `reference`.
FidelityReport fidelity(const ImageTensor& reference, const ImageTensor& candidate,
                        const HogParams& params = {});

}  // namespace advjnd
