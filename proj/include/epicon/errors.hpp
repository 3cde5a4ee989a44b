#pragma once

#include <stdexcept>
#include <string>

namespace epicon {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ValidationError : Error { using Error::Error; };
struct ParseError : Error { using Error::Error; };
struct UnknownPreset : Error { using Error::Error; };
struct GridMismatch : Error { using Error::Error; };
struct NonFiniteState : Error { using Error::Error; };
struct ExponentNotSuperlinear : Error { using Error::Error; };
struct ExponentNotLinear : Error { using Error::Error; };
struct NotSIR : Error { using Error::Error; };
struct DegenerateDenominator : Error { using Error::Error; };
struct NonconvexNu : Error { using Error::Error; };
struct LinearCostUnsupported : Error { using Error::Error; };
struct SearchSpaceTooLarge : Error { using Error::Error; };
struct NoLinearComponents : Error { using Error::Error; };
struct IOError : Error { using Error::Error; };

}  // namespace epicon
