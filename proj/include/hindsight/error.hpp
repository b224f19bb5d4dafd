#pragma once

#include <stdexcept>
#include <string>

namespace hindsight {

/// Base of every error raised by the pipeline. Each stage throws a subtype
/// so the CLI can map failures onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class CompositionError : public Error {
 public:
  using Error::Error;
};

class IndexError : public Error {
 public:
  using Error::Error;
};

class QueryError : public Error {
 public:
  using Error::Error;
};

class ScoringError : public Error {
 public:
  using Error::Error;
};

class StatsError : public Error {
 public:
  using Error::Error;
};

class AnalysisError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A stage input is absent; the message names the producing subcommand.
class MissingInputError : public Error {
 public:
  using Error::Error;
};

/// An external service (metadata API, encoder subprocess) failed.
class ExternalServiceError : public Error {
 public:
  using Error::Error;
};

/// The scholarly-metadata service failed after all retries.
class IngestError : public ExternalServiceError {
 public:
  using ExternalServiceError::ExternalServiceError;
};

}  // namespace hindsight
