#pragma once

#include <stdexcept>
#include <string>

namespace brt {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// geometry
class NoIntersection : public Error { using Error::Error; };
class GrazingIncidence : public Error { using Error::Error; };
class ParameterOutOfRange : public Error { using Error::Error; };

// conjugate
class DegenerateDirection : public Error { using Error::Error; };
class EmptyCaustic : public Error { using Error::Error; };
class CenterSource : public Error { using Error::Error; };

// transforms / reconstruct
class SupportViolation : public Error { using Error::Error; };
class DivergenceDetected : public Error { using Error::Error; };
class ZeroReference : public Error { using Error::Error; };
class EmptyLocus : public Error { using Error::Error; };

// phantoms
class CenterOutsideWindow : public Error { using Error::Error; };

/// Bad user input: malformed config, missing file, invalid parameter.
class ValidationError : public Error { using Error::Error; };

}  // namespace brt
