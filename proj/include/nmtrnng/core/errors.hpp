#pragma once

#include <stdexcept>
#include <string>

namespace nmtrnng {

// Root of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class StackUnderflowError : public Error {
 public:
  using Error::Error;
};

class VocabularyError : public Error {
 public:
  using Error::Error;
};

// Illegal transition for the current parser configuration.
class TransitionError : public Error {
 public:
  using Error::Error;
};

// Gold supervision that does not fit the sentence it annotates.
class SupervisionError : public Error {
 public:
  using Error::Error;
};

// Malformed input file; the message carries the line number.
class ParseError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace nmtrnng
