#pragma once

#include <stdexcept>
#include <string>

namespace wdro {

// Root of every exception thrown by the library. Each subsystem derives its
// own failure kinds from it so callers can catch at whichever level suits.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

class SizeExceeded : public Error {
 public:
  using Error::Error;
};

class NumericalFailure : public Error {
 public:
  using Error::Error;
};

class AllWeightsZero : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

class UnsupportedCost : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

class NegativeLambda : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

class InvalidParams : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

class PreconditionViolated : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

// Worst-case recovery found dual masses summing to less than one.
class RecoveryDegenerate : public NumericalFailure {
 public:
  using NumericalFailure::NumericalFailure;
};

class IterationBudgetExceeded : public Error {
 public:
  using Error::Error;
};

// A requested confidence level cannot be reached by any radius.
class Unreachable : public Error {
 public:
  using Error::Error;
};

}  // namespace wdro
