#pragma once

#include <stdexcept>
#include <string>

namespace ecgap {

/// Base class for every domain error raised by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParseError : Error { using Error::Error; };

// curve layer
struct SingularCurve : Error { using Error::Error; };
struct NotOnCurve : Error { using Error::Error; };
struct MalformedDenominator : Error { using Error::Error; };
struct IdentityPoint : Error { using Error::Error; };
struct TorsionBase : Error { using Error::Error; };

// integer layer
struct BudgetExceeded : Error { using Error::Error; };
struct EmptyInput : Error { using Error::Error; };

// psi ladder / reduction layer
struct CapExceeded : Error { using Error::Error; };
struct NonInvertibleDenominator : Error { using Error::Error; };
struct NonInvertibleTwoY : Error { using Error::Error; };
struct PreconditionViolated : Error { using Error::Error; };
struct BadReduction : Error { using Error::Error; };
struct PointAtInfinityModP : Error { using Error::Error; };

}  // namespace ecgap
