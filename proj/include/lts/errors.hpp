#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace lts {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed caller input: non-finite values, dimension mismatches, bad parameters.
class InvalidInputError : public Error {
 public:
  using Error::Error;
};

/// CSV ingestion failure; message carries row/column coordinates where known.
class CsvError : public Error {
 public:
  using Error::Error;
};

/// A least-squares fit was requested on a rank-deficient row subset.
/// Carries the offending subset as 0-based observation indices (empty when
/// the failure is not tied to a specific subset).
class SingularFitError : public Error {
 public:
  explicit SingularFitError(const std::string& message,
                            std::vector<std::size_t> subset = {})
      : Error(message), subset_(std::move(subset)) {}

  const std::vector<std::size_t>& subset() const { return subset_; }

 private:
  std::vector<std::size_t> subset_;
};

/// Exhaustive enumeration was refused because C(n,h) exceeds the configured cap.
class CapExceededError : public Error {
 public:
  using Error::Error;
};

/// The candidate scan finished without a single boundary point passing the
/// order-statistic test; the message names the assumption most likely violated.
class NoCandidateError : public Error {
 public:
  using Error::Error;
};

/// A residual tie block would generate more subsets than the configured cap.
class DegenerateTieError : public Error {
 public:
  using Error::Error;
};

}  // namespace lts
