#pragma once

#include <stdexcept>
#include <string>

namespace hyperres {

// Broad failure classes. The CLI maps each class to a distinct exit code.
enum class ErrorClass { validation, numerical, inconsistency };

class Error : public std::runtime_error {
public:
    Error(ErrorClass cls, const std::string& what) : std::runtime_error(what), cls_(cls) {}
    ErrorClass error_class() const noexcept { return cls_; }

private:
    ErrorClass cls_;
};

// Bad input, including evaluation at a pole of a meromorphic function.
class DomainError : public Error {
public:
    explicit DomainError(const std::string& what) : Error(ErrorClass::validation, what) {}
};

// A tolerance could not be reached inside the allotted budget.
class ConvergenceError : public Error {
public:
    explicit ConvergenceError(const std::string& what) : Error(ErrorClass::numerical, what) {}
};

// Two computations that must agree exactly (integer counts, invariants) did not.
class InconsistencyError : public Error {
public:
    explicit InconsistencyError(const std::string& what) : Error(ErrorClass::inconsistency, what) {}
};

}  // namespace hyperres
