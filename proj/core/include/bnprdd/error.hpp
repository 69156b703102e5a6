#pragma once

#include <stdexcept>
#include <string>

namespace bnprdd {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Malformed or inconsistent input data (CSV ingestion, dataset invariants).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A sampler conditional or evaluation produced a non-finite quantity.
/// The message carries a dump of the offending state.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The adherence denominator of a ratio estimator is (statistically) zero.
class ZeroDenominatorError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Too few posterior draws for the requested summary.
class InsufficientDrawsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace bnprdd
