#include "hintkit/error.hpp"

namespace hintkit {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::OutOfRange: return "OutOfRange";
    case ErrorKind::UnknownSubset: return "UnknownSubset";
    case ErrorKind::UnknownInstance: return "UnknownInstance";
    case ErrorKind::MalformedJson: return "MalformedJson";
    case ErrorKind::SchemaViolation: return "SchemaViolation";
    case ErrorKind::ValidationFailed: return "ValidationFailed";
    case ErrorKind::BadMagic: return "BadMagic";
    case ErrorKind::CorruptArchive: return "CorruptArchive";
    case ErrorKind::Io: return "Io";
    case ErrorKind::NetworkError: return "NetworkError";
    case ErrorKind::ManifestSchemaError: return "ManifestSchemaError";
    case ErrorKind::UnknownDataset: return "UnknownDataset";
    case ErrorKind::ChecksumMismatch: return "ChecksumMismatch";
    case ErrorKind::ProviderError: return "ProviderError";
    case ErrorKind::AuthError: return "AuthError";
    case ErrorKind::RateLimited: return "RateLimited";
    case ErrorKind::TransportError: return "TransportError";
    case ErrorKind::EmptyCompletion: return "EmptyCompletion";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::MalformedLine: return "MalformedLine";
    case ErrorKind::InconsistentDimension: return "InconsistentDimension";
    case ErrorKind::Offline: return "Offline";
    case ErrorKind::MissingAnswer: return "MissingAnswer";
    case ErrorKind::GenerationFailed: return "GenerationFailed";
    case ErrorKind::UnparseableCompletion: return "UnparseableCompletion";
    case ErrorKind::EmptyText: return "EmptyText";
    case ErrorKind::UnknownFeature: return "UnknownFeature";
    case ErrorKind::BackendUnavailable: return "BackendUnavailable";
    case ErrorKind::NoMetricsFound: return "NoMetricsFound";
    case ErrorKind::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

namespace {

std::string compose(ErrorKind kind, const std::string& message, const std::string& path) {
  std::string out(to_string(kind));
  if (!path.empty()) out += "(" + path + ")";
  if (!message.empty()) out += ": " + message;
  return out;
}

}  // namespace

Error::Error(ErrorKind kind, const std::string& message, std::string path)
    : std::runtime_error(compose(kind, message, path)), kind_(kind), path_(std::move(path)) {}

}  // namespace hintkit
