#pragma once

#include <stdexcept>
#include <string>

namespace pinchlab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define PINCHLAB_DEFINE_ERROR(Name)              \
  class Name : public Error {                     \
   public:                                        \
    explicit Name(const std::string& what_arg)    \
        : Error(#Name ": " + what_arg) {}         \
  };

PINCHLAB_DEFINE_ERROR(InvalidArgument)
PINCHLAB_DEFINE_ERROR(DimensionMismatch)
PINCHLAB_DEFINE_ERROR(DimensionTooLarge)
PINCHLAB_DEFINE_ERROR(DimensionTooSmall)
PINCHLAB_DEFINE_ERROR(SingularFactor)
PINCHLAB_DEFINE_ERROR(LogBranchFailure)
PINCHLAB_DEFINE_ERROR(InvalidNorm)
PINCHLAB_DEFINE_ERROR(NotOrthogonal)
PINCHLAB_DEFINE_ERROR(OverComplete)
PINCHLAB_DEFINE_ERROR(BadVariant)
PINCHLAB_DEFINE_ERROR(RankMismatch)
PINCHLAB_DEFINE_ERROR(FiberTooLarge)
PINCHLAB_DEFINE_ERROR(NotNormal)
PINCHLAB_DEFINE_ERROR(IndexOutOfRange)
PINCHLAB_DEFINE_ERROR(ConfigError)
PINCHLAB_DEFINE_ERROR(IoError)

#undef PINCHLAB_DEFINE_ERROR

}  // namespace pinchlab
