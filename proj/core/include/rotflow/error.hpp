#pragma once

#include <stdexcept>
#include <string>

namespace rotflow {

/// Base class of every error raised by the toolkit.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A flow construction recipe violates its geometric invariants.
class InvalidSpec : public Error {
public:
  using Error::Error;
};

/// Malformed or inconsistent input data (tables, grids, configs).
class InvalidInput : public Error {
public:
  using Error::Error;
};

/// The radial IVP integrator could not proceed.
class IvpError : public Error {
public:
  using Error::Error;
};

/// Time integration produced non-finite values or violated its step limits.
class InstabilityError : public Error {
public:
  using Error::Error;
};

} // namespace rotflow
