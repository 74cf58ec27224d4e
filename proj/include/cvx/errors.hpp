#pragma once
#include <stdexcept>
#include <string>

namespace cvx {

// Base class for all failures raised by the library.
class FlowError : public std::runtime_error {
public:
    explicit FlowError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed or inconsistent configuration input.
class InvalidConfig : public FlowError {
public:
    using FlowError::FlowError;
};

// Initial data fails the strict-convexity check.
class NonConvexInput : public FlowError {
public:
    using FlowError::FlowError;
};

// A previously convex state lost strict convexity mid-run.
class LossOfConvexity : public FlowError {
public:
    using FlowError::FlowError;
};

// The constraint projection could not bracket or solve for the offset.
class ProjectionFailure : public FlowError {
public:
    using FlowError::FlowError;
};

// An externally supplied forcing violates its admissibility bound.
class ConstraintViolation : public FlowError {
public:
    using FlowError::FlowError;
};

// The constraint function has a vanishing gradient where one is required.
class DegenerateConstraint : public FlowError {
public:
    using FlowError::FlowError;
};

// Two fields (or a field and a grid) with incompatible node layouts were mixed.
class GridMismatch : public FlowError {
public:
    using FlowError::FlowError;
};

} // namespace cvx
