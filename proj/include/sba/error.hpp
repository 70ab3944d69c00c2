#ifndef SBA_ERROR_HPP
#define SBA_ERROR_HPP

#include <stdexcept>
#include <string>

namespace sba {

// Error categories line up with the CLI exit-code contract.
enum class ErrorKind {
    invalid_argument,
    parse,          // malformed input text or configuration
    model,          // model or measure construction failed
    data,           // observations outside the kernel's sample space
    numerical,      // non-finite quantities during sampling
    io,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

// Zero-mass interval whose left end is -inf on an unbounded-below domain.
class ZeroMassUnboundedInterval : public Error {
public:
    explicit ZeroMassUnboundedInterval(const std::string& what)
        : Error(ErrorKind::model, what) {}
};

class InvalidArray : public Error {
public:
    explicit InvalidArray(const std::string& what)
        : Error(ErrorKind::model, what) {}
};

class DegenerateOutsideInterval : public Error {
public:
    explicit DegenerateOutsideInterval(const std::string& what)
        : Error(ErrorKind::model, what) {}
};

class DomainError : public Error {
public:
    explicit DomainError(const std::string& what)
        : Error(ErrorKind::data, what) {}
};

class AllMinusInfinity : public Error {
public:
    explicit AllMinusInfinity(const std::string& what)
        : Error(ErrorKind::data, what) {}
};

class NonFiniteTarget : public Error {
public:
    explicit NonFiniteTarget(const std::string& what)
        : Error(ErrorKind::numerical, what) {}
};

class TooFewSamples : public Error {
public:
    explicit TooFewSamples(const std::string& what)
        : Error(ErrorKind::invalid_argument, what) {}
};

}  // namespace sba

#endif  // SBA_ERROR_HPP
