#pragma once

#include <stdexcept>
#include <string>

namespace minuteman {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A request parameter is out of its documented range.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class NotFoundError : public Error {
 public:
  using Error::Error;
};

/// Audio payload does not match the fixed wire format.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// A chunk or utterance arrived out of its required order.
class SequencingError : public Error {
 public:
  using Error::Error;
};

class BusShutdownError : public Error {
 public:
  using Error::Error;
};

/// An edit operation does not fit the document it targets.
class MalformedEditError : public Error {
 public:
  using Error::Error;
};

}  // namespace minuteman
