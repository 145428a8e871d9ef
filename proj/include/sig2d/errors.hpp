#pragma once

#include <stdexcept>
#include <string>

namespace sig2d {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Window or channel outside the image.
class IndexError : public Error {
 public:
  using Error::Error;
};

// Central differences need one pixel of margin around the window.
class MarginError : public Error {
 public:
  using Error::Error;
};

class ParameterError : public Error {
 public:
  using Error::Error;
};

// Malformed inputs: NaN features, dimension or header mismatch.
class DataError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace sig2d
