#pragma once

#include <stdexcept>
#include <string>

namespace pbmf {

enum class ErrorCode {
  kInvalidArgument = 1,
  kIo,
  kEmptyDataset,
  kParse,
  kSchema,
  kSplit,
  kFormat,
  kCorruption,
  kDivergence,
};

const char* to_string(ErrorCode code) noexcept;

// All failures raised by the library carry one of the codes above so the
// C API can translate them without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace pbmf
