#pragma once

#include <stdexcept>
#include <string>

namespace kernel_pi {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Raised when a derivative is requested from a kernel that is not C^2.
class UnsupportedDerivativeError : public Error {
public:
    using Error::Error;
};

// Gram matrix could not be factorized even at the largest jitter.
class SingularGramError : public Error {
public:
    SingularGramError(const std::string& what, double max_jitter)
        : Error(what), max_jitter_(max_jitter) {}
    [[nodiscard]] double max_jitter() const noexcept { return max_jitter_; }

private:
    double max_jitter_;
};

// The assembled Galerkin matrix has no usable PE margin.
class PeViolationError : public Error {
public:
    PeViolationError(const std::string& what, double pe_margin, double threshold)
        : Error(what), pe_margin_(pe_margin), threshold_(threshold) {}

    [[nodiscard]] double pe_margin() const noexcept { return pe_margin_; }
    [[nodiscard]] double threshold() const noexcept { return threshold_; }

private:
    double pe_margin_;
    double threshold_;
};

class NonfiniteError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace kernel_pi
