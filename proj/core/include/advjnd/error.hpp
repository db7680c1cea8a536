#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace advjnd {

enum class Errc {
  bad_magic,
  truncated_file,
  count_mismatch,
  unsupported_format,
  malformed_header,
  shape_mismatch,
  invalid_label,
  dimension_too_small,
  version_mismatch,
  geometry_mismatch,
  image_too_small,
  empty_dataset,
  unknown_method,
  nonpositive_jnd,
  io_error,
  domain_error,
  invalid_config,
};

// All library failures surface as this exception. what() is a single line
// of the form "subsystem: message" so callers can print it verbatim.
class Error : public std::runtime_error {
 public:
  Error(Errc code, std::string subsystem, const std::string& message)
      : std::runtime_error(subsystem + ": " + message),
        code_(code),
        subsystem_(std::move(subsystem)) {}

  Errc code() const noexcept { return code_; }
  const std::string& subsystem() const noexcept { return subsystem_; }

 private:
  Errc code_;
  std::string subsystem_;
};

}  // namespace advjnd
