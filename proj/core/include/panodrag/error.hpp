#pragma once

#include <stdexcept>
#include <string>

namespace panodrag {

// Every failure mode the library reports, so callers and tests can match on
// the kind instead of parsing message strings.
enum class ErrorKind {
  kInvalidArgument,        // precondition violated (non-finite, out of range, ...)
  kDegenerateInput,        // zero vector and similar collapsed inputs
  kDegenerateBasis,        // tangent basis requested at a pole
  kDegenerateGreatCircle,  // handle/target coincident or antipodal
  kDegenerateProjection,   // current point parallel to the great-circle normal
  kDimensionMismatch,      // shapes that must agree do not
  kInvalidMetric,          // distance function broke its range contract
  kNotPsd,                 // covariance eigenvalue below tolerance
  kInsufficientSamples,    // statistics over fewer samples than required
  kValidation,             // manifest or case content violates the schema
  kIo,                     // file missing or unreadable
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace panodrag
