#pragma once

#include <stdexcept>
#include <string>

namespace lactile {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad sizes, out-of-range parameters, malformed configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A requested partial sum does not fit below the Nyquist frequency N/2.
class FrequencyOverflow : public Error {
 public:
  using Error::Error;
};

/// The Luxemburg bisection could not bracket the norm.
class GaugeError : public Error {
 public:
  using Error::Error;
};

/// A theorem-shaped property failed (coverage, multiplicity, round inequality).
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

namespace detail {

inline void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

}  // namespace detail
}  // namespace lactile
