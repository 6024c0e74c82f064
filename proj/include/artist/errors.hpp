#pragma once

#include <stdexcept>
#include <string>

namespace artist {

// Every failure raised by the library derives from Error so callers (the
// service in particular) can map families of failures onto status codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Payload or file content that does not decode into a valid value.
class MalformedInput : public Error {
 public:
  using Error::Error;
};

class MalformedPlan : public MalformedInput {
 public:
  using MalformedInput::MalformedInput;
};

class UnknownTechnique : public MalformedInput {
 public:
  explicit UnknownTechnique(std::string name)
      : MalformedInput("unknown simplification technique: '" + name + "'"),
        name_(std::move(name)) {}
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

class InvalidManual : public MalformedInput {
 public:
  using MalformedInput::MalformedInput;
};

class NotFound : public Error {
 public:
  using Error::Error;
};

class ConcurrentUpdateConflict : public Error {
 public:
  using Error::Error;
};

// Remote dependencies (LLM backend, error classifier) could not be reached.
class Unavailable : public Error {
 public:
  using Error::Error;
};

class BackendUnavailable : public Unavailable {
 public:
  using Unavailable::Unavailable;
};

class ClassifierUnavailable : public Unavailable {
 public:
  using Unavailable::Unavailable;
};

class BackendReturnedWrongCount : public Error {
 public:
  BackendReturnedWrongCount(std::size_t expected, std::size_t got)
      : Error("backend returned " + std::to_string(got) + " samples, expected " +
              std::to_string(expected)) {}
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class MissingErrorProbs : public Error {
 public:
  using Error::Error;
};

class UncalibratedSet : public Error {
 public:
  using Error::Error;
};

class RegistryMismatch : public Error {
 public:
  using Error::Error;
};

class EmptyDataset : public Error {
 public:
  using Error::Error;
};

}  // namespace artist
