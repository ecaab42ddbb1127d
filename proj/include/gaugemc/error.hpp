#ifndef GAUGEMC_ERROR_HPP
#define GAUGEMC_ERROR_HPP

#include <stdexcept>
#include <string>

namespace gaugemc {

// Numeric values are mirrored by gmc_status in gaugemc.h.
enum class ErrorCode {
  InvalidParameter = 1,
  InvalidArgument = 2,
  Shape = 3,
  InvalidSpectrum = 4,
  Unsupported = 5,
  Divergence = 6,
  Extinction = 7,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

inline void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond)
    fail(code, what);
}

}  // namespace gaugemc

#endif
