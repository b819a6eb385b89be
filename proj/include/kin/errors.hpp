#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace kin {

// Base of every error raised by the library. Each subclass names one failure
// mode so callers can catch exactly what they can recover from.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define KIN_DEFINE_ERROR(Name)            \
  class Name : public Error {             \
   public:                                \
    using Error::Error;                   \
  }

KIN_DEFINE_ERROR(NonOrthonormalInput);
KIN_DEFINE_ERROR(NotTangent);
KIN_DEFINE_ERROR(InvalidArgument);
KIN_DEFINE_ERROR(OutOfDomain);
KIN_DEFINE_ERROR(DegenerateParameterization);
KIN_DEFINE_ERROR(StepSizeTooLarge);
KIN_DEFINE_ERROR(NegativeAxis);
KIN_DEFINE_ERROR(QuadratureNotConverged);
KIN_DEFINE_ERROR(NotLagrangianNormal);
KIN_DEFINE_ERROR(NotLagrangian);
KIN_DEFINE_ERROR(CoaxialCircles);
KIN_DEFINE_ERROR(NonTransversalSample);
KIN_DEFINE_ERROR(GridUnstable);
KIN_DEFINE_ERROR(ExcessiveDiscards);
KIN_DEFINE_ERROR(DegreeTooHigh);
KIN_DEFINE_ERROR(UnknownVariable);
KIN_DEFINE_ERROR(MeshFormatError);

#undef KIN_DEFINE_ERROR

// Parse failure with the byte offset of the offending token and the set of
// tokens that would have been accepted there.
class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t position, std::vector<std::string> expected, const std::string& what)
      : Error(what), position_(position), expected_(std::move(expected)) {}

  std::size_t position() const noexcept { return position_; }
  const std::vector<std::string>& expected() const noexcept { return expected_; }

 private:
  std::size_t position_;
  std::vector<std::string> expected_;
};

}  // namespace kin
