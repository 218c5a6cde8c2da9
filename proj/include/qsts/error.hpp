#pragma once

#include <stdexcept>
#include <string>

namespace qsts {

// All library failures derive from Error so callers can map them to exit codes.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Register would exceed the simulation qubit cap.
class CapacityError : public Error {
public:
  using Error::Error;
};

class IndexError : public Error {
public:
  using Error::Error;
};

class InvalidArgument : public Error {
public:
  using Error::Error;
};

// A forced measurement outcome has (numerically) zero Born weight.
class ZeroProbabilityError : public Error {
public:
  using Error::Error;
};

class BranchLimitError : public Error {
public:
  using Error::Error;
};

// Secret cannot distinguish wrong corrections from right ones.
class DegenerateSecretError : public Error {
public:
  using Error::Error;
};

class AmbiguityError : public Error {
public:
  using Error::Error;
};

class DerivationError : public Error {
public:
  using Error::Error;
};

// Party/bus protocol violation or stalled session.
class SessionError : public Error {
public:
  using Error::Error;
};

class UnsupportedError : public Error {
public:
  using Error::Error;
};

}  // namespace qsts
