#pragma once

#include <stdexcept>
#include <string>

namespace dihom {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidComplex : Error {
  using Error::Error;
};

// Raised when a requested dimension exceeds the configured bound.
struct DimensionBound : Error {
  using Error::Error;
};

struct SyntaxError : Error {
  std::size_t line, column;
  SyntaxError(const std::string& msg, std::size_t l, std::size_t c)
      : Error(std::to_string(l) + ":" + std::to_string(c) + ": " + msg), line(l), column(c) {}
};

struct NonConservative : Error {
  std::string subterm;
  NonConservative(const std::string& msg, std::string sub) : Error(msg + ": " + sub), subterm(std::move(sub)) {}
};

struct InconsistentPotential : Error {
  using Error::Error;
};

struct BegForbidden : Error {
  using Error::Error;
};

struct EndpointMismatch : Error {
  using Error::Error;
};

struct NotDefined : Error {
  using Error::Error;
};

struct HypothesisViolated : Error {
  using Error::Error;
};

struct NonDirectedEndpoint : Error {
  using Error::Error;
};

struct NonGeometric : Error {
  using Error::Error;
};

}  // namespace dihom
