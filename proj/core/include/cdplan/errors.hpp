#pragma once

#include <stdexcept>
#include <string>

namespace cdplan {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidGeometry : public Error {
 public:
  using Error::Error;
};

class ParallelSegments : public Error {
 public:
  ParallelSegments() : Error("segments are parallel") {}
};

class ControlOutOfBounds : public Error {
 public:
  using Error::Error;
};

class NonFiniteEvaluation : public Error {
 public:
  using Error::Error;
};

class NoOverlap : public Error {
 public:
  using Error::Error;
};

class NoFeasibleSolutionFound : public Error {
 public:
  using Error::Error;
};

class NoFeasibleInWindow : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace cdplan
