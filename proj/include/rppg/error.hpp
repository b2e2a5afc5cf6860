#pragma once

#include <stdexcept>
#include <string>

namespace rppg {

enum class ErrorCode {
  kArgument,         // bad parameter value
  kDimension,        // frame/buffer shape mismatch
  kBounds,           // ROI or index outside the frame
  kDegenerate,       // input makes the operation undefined (zero mean, constant series)
  kFormat,           // malformed or unsupported file content
  kMissingMetadata,  // sidecar metadata absent
  kAlignment,        // no usable pairing between series
  kIo,               // filesystem failure
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace rppg
