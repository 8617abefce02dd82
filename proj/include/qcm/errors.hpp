// Exception types shared across the library.
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace qcm {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A matrix violates density-operator invariants (Hermiticity, unit trace,
// positivity, finiteness).
class InvalidState : public Error {
public:
    using Error::Error;
};

// Bad operation argument: arity mismatch, probability out of range,
// invalid register positions, malformed partition.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

// A tensor product would exceed the configured register size cap.
class RegisterOverflow : public Error {
public:
    using Error::Error;
};

class UnknownEnsemble : public Error {
public:
    using Error::Error;
};

class ConsumedEnsemble : public Error {
public:
    using Error::Error;
};

// A two-operand step was handed the same ensemble twice; callers must
// clone first.
class SameOperand : public Error {
public:
    using Error::Error;
};

// Ratio decoding hit a denominator smaller than the configured floor.
class DenominatorNearZero : public Error {
public:
    using Error::Error;
};

// Inversion or division against a value too close to zero.
class DivisorNearZero : public Error {
public:
    using Error::Error;
};

// Sampled denominator estimate is not statistically distinguishable from
// zero at the requested confidence level; more shots are needed.
class DenominatorIndistinguishableFromZero : public Error {
public:
    using Error::Error;
};

// Expression syntax error. Carries the byte offset of the offending token
// and the set of token kinds that would have been accepted there.
class ParseError : public Error {
public:
    ParseError(std::string message, std::size_t offset, std::vector<std::string> expected)
        : Error(std::move(message)), offset_(offset), expected_(std::move(expected)) {}

    std::size_t offset() const { return offset_; }
    const std::vector<std::string>& expected() const { return expected_; }

private:
    std::size_t offset_;
    std::vector<std::string> expected_;
};

// Evaluation failed outside of the dedicated divisor guards (e.g. the
// reference value overflowed to a non-finite double).
class EvaluationError : public Error {
public:
    using Error::Error;
};

}  // namespace qcm
