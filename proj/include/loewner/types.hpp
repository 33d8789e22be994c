#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace loewner {

/// A point of the closed upper half-plane.
using Point = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

/// Which prime end of a slit base is meant when a real point sits exactly at
/// the foot of a removed segment.
enum class Side { None, Left, Right };

enum class Direction { Forward, Inverse };

/// Base class of every error thrown by the library. `kind()` is the stable,
/// machine-readable name used by the CLI error JSON.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define LOEWNER_DEFINE_ERROR(Name)                                   \
  class Name : public Error {                                        \
   public:                                                           \
    explicit Name(const std::string& what) : Error(#Name, what) {}   \
  };

LOEWNER_DEFINE_ERROR(DomainError)
LOEWNER_DEFINE_ERROR(BranchError)
LOEWNER_DEFINE_ERROR(StepError)
LOEWNER_DEFINE_ERROR(CollisionError)
LOEWNER_DEFINE_ERROR(GeometryError)
LOEWNER_DEFINE_ERROR(ResolutionError)
LOEWNER_DEFINE_ERROR(DisjointnessError)
LOEWNER_DEFINE_ERROR(ExhaustedError)
LOEWNER_DEFINE_ERROR(ConvergenceError)
LOEWNER_DEFINE_ERROR(PairingError)
LOEWNER_DEFINE_ERROR(InsufficientData)
LOEWNER_DEFINE_ERROR(InputError)

#undef LOEWNER_DEFINE_ERROR

}  // namespace loewner
