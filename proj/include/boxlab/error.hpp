#pragma once

#include <stdexcept>
#include <string>

namespace boxlab {

enum class ErrorCode {
  // frame
  insufficient_landmarks,
  degenerate_axis,
  degenerate_cloud,
  parallel_axes,
  // obox
  empty_mesh,
  invalid_frame,
  // pose
  too_few_correspondences,
  no_consensus,
  empty_correspondences,
  did_not_converge,
  degenerate_result,
  // visibility
  camera_inside_box,
  // evaluate
  not_a_rotation,
  zero_vector,
  no_visible_keypoints,
  // io
  parse_error,
  validation_error,
  io_error,
};

const char* error_code_name(ErrorCode code);

/// Exception carrying a typed error code so callers can branch on the
/// failure kind without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace boxlab
