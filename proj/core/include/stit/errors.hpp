#pragma once

#include <stdexcept>
#include <string>

namespace stit {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// geometry
class DegenerateSplit : public Error {
public:
  using Error::Error;
};

// measure
class ProbableMeasureBug : public Error {
public:
  using Error::Error;
};

// stit
class NonfiniteExplosionGuard : public Error {
public:
  using Error::Error;
};
class WindowNotContained : public Error {
public:
  using Error::Error;
};
class InvalidConfig : public Error {
public:
  using Error::Error;
};

// functionals
class RegionNotCovered : public Error {
public:
  using Error::Error;
};

// mixing
class InvalidDistribution : public Error {
public:
  using Error::Error;
};
class InsufficientSamples : public Error {
public:
  using Error::Error;
};
class DegenerateFit : public Error {
public:
  using Error::Error;
};
class InvalidProbes : public Error {
public:
  using Error::Error;
};

// harness
class InvalidParams : public Error {
public:
  using Error::Error;
};

} // namespace stit
