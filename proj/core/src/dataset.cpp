#include "advjnd/dataset.hpp"

#include <cstdint>
#include <fstream>
#include <vector>

#include "advjnd/error.hpp"

namespace advjnd {

namespace {

constexpr std::uint32_t kImageMagic = 0x00000803;
constexpr std::uint32_t kLabelMagic = 0x00000801;

std::uint32_t read_be32(std::istream& in, const std::string& path) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  if (in.gcount() != 4) {
    throw Error(Errc::truncated_file, "image_core", path + " ends inside the IDX header");
  }
  return (std::uint32_t(b[0]) << 24) | (std::uint32_t(b[1]) << 16) |
         (std::uint32_t(b[2]) << 8) | std::uint32_t(b[3]);
}

std::string basename_of(const std::string& path) {
  const std::size_t slash = path.find_last_of("/\\");
  return slash == std::string::npos ? path : path.substr(slash + 1);
}

}  // namespace

LabeledDataset load_idx_dataset(const std::string& images_path,
                                const std::string& labels_path) {
  std::ifstream img_in(images_path, std::ios::binary);
  if (!img_in) throw Error(Errc::io_error, "image_core", "cannot open " + images_path);

  const std::uint32_t img_magic = read_be32(img_in, images_path);
  if (img_magic != kImageMagic) {
    throw Error(Errc::bad_magic, "image_core",
                images_path + " is not an IDX image file");
  }
  const std::uint32_t n = read_be32(img_in, images_path);
  const std::uint32_t rows = read_be32(img_in, images_path);
  const std::uint32_t cols = read_be32(img_in, images_path);
  if (rows == 0 || cols == 0) {
    throw Error(Errc::malformed_header, "image_core", images_path + " has zero-sized images");
  }

  const std::size_t pixels = static_cast<std::size_t>(rows) * cols;
  std::vector<unsigned char> buf(pixels);

  LabeledDataset data;
  data.name = basename_of(images_path);
  data.images.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    img_in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(pixels));
    if (static_cast<std::size_t>(img_in.gcount()) != pixels) {
      throw Error(Errc::truncated_file, "image_core",
                  images_path + " ends before image " + std::to_string(i));
    }
    ImageTensor img(static_cast<int>(rows), static_cast<int>(cols), 1);
    for (std::size_t p = 0; p < pixels; ++p) img.values[p] = buf[p] / 255.0;
    data.images.push_back(std::move(img));
  }

  std::ifstream lab_in(labels_path, std::ios::binary);
  if (!lab_in) throw Error(Errc::io_error, "image_core", "cannot open " + labels_path);

  const std::uint32_t lab_magic = read_be32(lab_in, labels_path);
  if (lab_magic != kLabelMagic) {
    throw Error(Errc::bad_magic, "image_core",
                labels_path + " is not an IDX label file");
  }
  const std::uint32_t m = read_be32(lab_in, labels_path);
  if (m != n) {
    throw Error(Errc::count_mismatch, "image_core",
                "image count " + std::to_string(n) + " != label count " + std::to_string(m));
  }
  std::vector<unsigned char> labels(m);
  lab_in.read(reinterpret_cast<char*>(labels.data()), static_cast<std::streamsize>(m));
  if (static_cast<std::size_t>(lab_in.gcount()) != m) {
    throw Error(Errc::truncated_file, "image_core", labels_path + " ends inside the label data");
  }
  data.labels.assign(labels.begin(), labels.end());
  return data;
}

LabeledDataset truncate_dataset(LabeledDataset data, std::size_t count) {
  if (count < data.images.size()) {
    data.images.resize(count);
    data.labels.resize(count);
  }
  return data;
}

}  // namespace advjnd
