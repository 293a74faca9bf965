// Error taxonomy shared by all modules.
#pragma once

#include <stdexcept>
#include <string>

namespace mwi {

// Base class for everything this library throws on purpose.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Operand dimensions do not line up.
class ShapeError : public Error {
public:
    using Error::Error;
};

// Requested size exceeds a configured cap (max dimension, leaf budget, ...).
class CapacityError : public Error {
public:
    using Error::Error;
};

// Input violates a documented precondition (non-Hermitian matrix,
// unnormalized weights, non-finite entries, ...).
class ContractViolation : public Error {
public:
    using Error::Error;
};

// An iterative algorithm failed to converge.
class NumericError : public Error {
public:
    using Error::Error;
};

// Degenerate input with no meaningful answer (zero vector, ...).
class DegenerateInput : public Error {
public:
    using Error::Error;
};

// Malformed container state (branching a non-leaf, empty tree, ...).
class StructureError : public Error {
public:
    using Error::Error;
};

} // namespace mwi
