#pragma once

#include <stdexcept>
#include <string>

namespace tcx {

// Base for every error raised by the library. The CLI maps the three
// families below onto its exit codes (1 usage, 2 data, 3 compute).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Caller passed an argument outside the operation's domain.
class ArgumentError : public Error {
public:
    using Error::Error;
};

// Input data is malformed: bad header, unreadable file, broken schema.
class DataError : public Error {
public:
    using Error::Error;
};

// Numerical / structural failures of the complexity pipeline.
class ComputeError : public Error {
public:
    using Error::Error;
};

// A row or column sum that must be positive is zero.
class StructuralError : public ComputeError {
public:
    using ComputeError::ComputeError;
};

// Every RTA entry fell below the threshold.
class EmptyNetworkError : public ComputeError {
public:
    using ComputeError::ComputeError;
};

// The bipartite graph has more than one connected component.
class DisconnectedNetworkError : public ComputeError {
public:
    DisconnectedNetworkError(const std::string& what, std::size_t components)
        : ComputeError(what), components_(components) {}

    std::size_t components() const noexcept { return components_; }

private:
    std::size_t components_;
};

// The eigenvalue selecting the complexity vector is not simple.
class DegenerateSpectrumError : public ComputeError {
public:
    using ComputeError::ComputeError;
};

class ConvergenceError : public ComputeError {
public:
    ConvergenceError(const std::string& what, double residual)
        : ComputeError(what), residual_(residual) {}

    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

}  // namespace tcx
