#pragma once

#include <stdexcept>
#include <string>

namespace qdspin {

/// Input outside the mathematical domain of an operation (bad index, bad mask, bad size).
class DomainError : public std::domain_error {
public:
	using std::domain_error::domain_error;
};

/// A numerical routine failed or produced a result that violates a known invariant.
class NumericError : public std::runtime_error {
public:
	using std::runtime_error::runtime_error;
};

/// Poles are (near) coincident, so simple-pole residue formulas do not apply.
/// Callers are expected to fall back to the spectral evolver.
class DegeneratePolesError : public NumericError {
public:
	using NumericError::NumericError;
};

/// A requested dimension exceeds a configured cap.
class CapacityError : public std::length_error {
public:
	using std::length_error::length_error;
};

class NotFoundError : public std::out_of_range {
public:
	using std::out_of_range::out_of_range;
};

} // namespace qdspin
