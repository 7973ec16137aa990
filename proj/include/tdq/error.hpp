#pragma once

#include <stdexcept>
#include <string>

namespace tdq {

// Base class for all library errors. Subclasses carry the error names used
// throughout the docs so callers can catch specific failures.
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct BrokenInvolution : Error { using Error::Error; };
struct BrokenRotation : Error { using Error::Error; };
struct Disconnected : Error { using Error::Error; };
struct NonPlanar : Error { using Error::Error; };
struct EmptySourceSet : Error { using Error::Error; };
struct IndexOutOfRange : Error { using Error::Error; };
struct InvalidDyckPath : Error { using Error::Error; };
struct InadmissibleMarkedTree : Error { using Error::Error; };
struct InadmissibleParameters : Error { using Error::Error; };
struct DegenerateCore : Error { using Error::Error; };
struct AcceptanceTooLow : Error { using Error::Error; };
struct TooLarge : Error { using Error::Error; };
struct ArcTooLarge : Error { using Error::Error; };
struct EmptyLeftover : Error { using Error::Error; };
struct SizeMismatch : Error { using Error::Error; };
struct DecorationNotATree : Error { using Error::Error; };
struct WindowTooShort : Error { using Error::Error; };
struct SpineTooShort : Error { using Error::Error; };
struct Exhausted : Error { using Error::Error; };
struct TooFewSamples : Error { using Error::Error; };
struct DegenerateSamples : Error { using Error::Error; };
struct ParseError : Error { using Error::Error; };

}  // namespace tdq
