#include "pbmf/error.hpp"

namespace pbmf {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid argument";
    case ErrorCode::kIo: return "i/o error";
    case ErrorCode::kEmptyDataset: return "empty dataset";
    case ErrorCode::kParse: return "parse error";
    case ErrorCode::kSchema: return "schema error";
    case ErrorCode::kSplit: return "split error";
    case ErrorCode::kFormat: return "format error";
    case ErrorCode::kCorruption: return "corruption error";
    case ErrorCode::kDivergence: return "divergence";
  }
  return "unknown error";
}

}  // namespace pbmf
