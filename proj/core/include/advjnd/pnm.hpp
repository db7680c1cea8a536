#pragma once

#include <string>

#include "advjnd/tensor.hpp"

namespace advjnd {

// Load a binary PGM (P5) or PPM (P6) with maxval 255. Pixel bytes map to
// [0,1] as v/255. P5 yields a 1-channel tensor, P6 a 3-channel one.
ImageTensor load_image(const std::string& path);

// Save a 1-channel tensor as P5 or a 3-channel tensor as P6, maxval 255.
// Values are clamped to [0,1] and quantized as round(v*255).
void save_image(const ImageTensor& image, const std::string& path);

}  // namespace advjnd
