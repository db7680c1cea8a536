#include "advjnd/pnm.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <vector>

#include "advjnd/error.hpp"

namespace advjnd {

namespace {

// Read the next whitespace-separated token, skipping '#' comments.
std::string next_token(std::istream& in) {
  std::string tok;
  int c = in.get();
  while (c != EOF) {
    if (c == '#') {
      while (c != EOF && c != '\n') c = in.get();
    } else if (std::isspace(c)) {
      if (!tok.empty()) {
        in.unget();
        return tok;
      }
    } else {
      tok.push_back(static_cast<char>(c));
      const int peek = in.peek();
      if (peek == EOF || std::isspace(peek) || peek == '#') return tok;
    }
    c = in.get();
  }
  return tok;
}

long parse_header_number(std::istream& in, const char* field) {
  const std::string tok = next_token(in);
  if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos) {
    throw Error(Errc::malformed_header, "image_core",
                std::string("bad ") + field + " in PNM header");
  }
  return std::stol(tok);
}

}  // namespace

ImageTensor load_image(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_error, "image_core", "cannot open " + path);

  const std::string magic = next_token(in);
  int channels = 0;
  if (magic == "P5") {
    channels = 1;
  } else if (magic == "P6") {
    channels = 3;
  } else if (magic == "P1" || magic == "P2" || magic == "P3" || magic == "P4") {
    throw Error(Errc::unsupported_format, "image_core",
                "only binary P5/P6 images are supported, got " + magic);
  } else {
    throw Error(Errc::malformed_header, "image_core", "not a PNM file: " + path);
  }

  const long width = parse_header_number(in, "width");
  const long height = parse_header_number(in, "height");
  const long maxval = parse_header_number(in, "maxval");
  if (width <= 0 || height <= 0) {
    throw Error(Errc::malformed_header, "image_core", "nonpositive PNM dimensions");
  }
  if (maxval != 255) {
    throw Error(Errc::unsupported_format, "image_core",
                "only maxval 255 is supported, got " + std::to_string(maxval));
  }

  // Exactly one whitespace byte separates the header from the raster.
  const int sep = in.get();
  if (sep == EOF || !std::isspace(sep)) {
    throw Error(Errc::malformed_header, "image_core", "missing raster separator");
  }

  const std::size_t count = static_cast<std::size_t>(width) * height * channels;
  std::vector<unsigned char> raw(count);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(count));
  if (static_cast<std::size_t>(in.gcount()) != count) {
    throw Error(Errc::truncated_file, "image_core", "PNM raster shorter than header claims");
  }

  ImageTensor img(static_cast<int>(height), static_cast<int>(width), channels);
  for (std::size_t i = 0; i < count; ++i) img.values[i] = raw[i] / 255.0;
  return img;
}

void save_image(const ImageTensor& image, const std::string& path) {
  if (image.channels != 1 && image.channels != 3) {
    throw Error(Errc::unsupported_format, "image_core",
                "save_image handles 1-channel (P5) or 3-channel (P6) tensors only");
  }
  if (image.height <= 0 || image.width <= 0) {
    throw Error(Errc::shape_mismatch, "image_core", "cannot save an empty image");
  }

  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::io_error, "image_core", "cannot open " + path + " for writing");

  out << (image.channels == 1 ? "P5" : "P6") << "\n"
      << image.width << " " << image.height << "\n255\n";

  std::vector<unsigned char> raw(image.values.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const double v = std::clamp(image.values[i], 0.0, 1.0);
    raw[i] = static_cast<unsigned char>(std::lround(v * 255.0));
  }
  out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (!out) throw Error(Errc::io_error, "image_core", "short write to " + path);
}

}  // namespace advjnd
