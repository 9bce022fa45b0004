#pragma once

#include <stdexcept>
#include <string>

namespace lmc {

/// Base class for every error raised by the toolkit. `kind()` is a stable
/// machine-readable tag used in the CLI's JSON error output.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept { return "error"; }
};

/// A caller broke a documented precondition (bad index, context too long...).
class ContractViolation : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "contract_violation"; }
};

/// Malformed or insufficient input data.
class DataError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "data_error"; }
};

class TokenizationError : public DataError {
 public:
  using DataError::DataError;
  const char* kind() const noexcept override { return "tokenization_error"; }
};

/// Anything that went wrong while talking to a probability provider.
class ProviderError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "provider_error"; }
};

class TransportError : public ProviderError {
 public:
  using ProviderError::ProviderError;
  const char* kind() const noexcept override { return "transport_error"; }
};

/// The provider answered, but the payload violates the wire contract
/// (NaN or positive log-probs, wrong lengths, out-of-range ids).
class ProtocolError : public ProviderError {
 public:
  using ProviderError::ProviderError;
  const char* kind() const noexcept override { return "protocol_error"; }
};

class CorruptionError : public DataError {
 public:
  using DataError::DataError;
  const char* kind() const noexcept override { return "corruption_error"; }
};

class FingerprintMismatch : public DataError {
 public:
  using DataError::DataError;
  const char* kind() const noexcept override { return "fingerprint_mismatch"; }
};

}  // namespace lmc
