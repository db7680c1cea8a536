#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "advjnd/tensor.hpp"

namespace advjnd {

// Images plus integer class labels, index-aligned. All images share one shape.
struct LabeledDataset {
  std::vector<ImageTensor> images;
  std::vector<int> labels;
  std::string name;

  std::size_t size() const { return images.size(); }
  bool empty() const { return images.empty(); }
};

// Load an IDX image/label file pair (the MNIST container format):
// big-endian headers, magic 0x00000803 for images and 0x00000801 for labels.
// Pixel bytes map to [0,1] as v/255; images come out single-channel.
LabeledDataset load_idx_dataset(const std::string& images_path,
                                const std::string& labels_path);

// Keep only the first `count` samples (no-op when count >= size).
LabeledDataset truncate_dataset(LabeledDataset data, std::size_t count);

}  // namespace advjnd
