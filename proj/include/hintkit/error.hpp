#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hintkit {

enum class ErrorKind {
  InvalidArgument,
  OutOfRange,
  UnknownSubset,
  UnknownInstance,
  MalformedJson,
  SchemaViolation,
  ValidationFailed,
  BadMagic,
  CorruptArchive,
  Io,
  NetworkError,
  ManifestSchemaError,
  UnknownDataset,
  ChecksumMismatch,
  ProviderError,
  AuthError,
  RateLimited,
  TransportError,
  EmptyCompletion,
  DimensionMismatch,
  MalformedLine,
  InconsistentDimension,
  Offline,
  MissingAnswer,
  GenerationFailed,
  UnparseableCompletion,
  EmptyText,
  UnknownFeature,
  BackendUnavailable,
  NoMetricsFound,
  ConfigError,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library. `path()` carries a JSON-pointer
/// style location (or a line number, q_id, method name) when one applies.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message, std::string path = {});

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& path() const noexcept { return path_; }

 private:
  ErrorKind kind_;
  std::string path_;
};

}  // namespace hintkit
