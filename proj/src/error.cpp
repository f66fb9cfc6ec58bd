#include "boxlab/error.hpp"

namespace boxlab {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::insufficient_landmarks: return "InsufficientLandmarks";
    case ErrorCode::degenerate_axis: return "DegenerateAxis";
    case ErrorCode::degenerate_cloud: return "DegenerateCloud";
    case ErrorCode::parallel_axes: return "ParallelAxes";
    case ErrorCode::empty_mesh: return "EmptyMesh";
    case ErrorCode::invalid_frame: return "InvalidFrame";
    case ErrorCode::too_few_correspondences: return "TooFewCorrespondences";
    case ErrorCode::no_consensus: return "NoConsensus";
    case ErrorCode::empty_correspondences: return "EmptyCorrespondences";
    case ErrorCode::did_not_converge: return "DidNotConverge";
    case ErrorCode::degenerate_result: return "DegenerateResult";
    case ErrorCode::camera_inside_box: return "CameraInsideBox";
    case ErrorCode::not_a_rotation: return "NotARotation";
    case ErrorCode::zero_vector: return "ZeroVector";
    case ErrorCode::no_visible_keypoints: return "NoVisibleKeypoints";
    case ErrorCode::parse_error: return "ParseError";
    case ErrorCode::validation_error: return "ValidationError";
    case ErrorCode::io_error: return "IoError";
  }
  return "UnknownError";
}

}  // namespace boxlab
