#pragma once

#include <stdexcept>
#include <string>

namespace fracvar {

// Base of every error raised by the library. Each subclass maps onto one
// failure class callers are expected to distinguish.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DomainError : public Error { public: using Error::Error; };
class RangeError : public Error { public: using Error::Error; };
class OrderError : public Error { public: using Error::Error; };
class GridMismatch : public Error { public: using Error::Error; };
class AxisError : public Error { public: using Error::Error; };
class LengthMismatch : public Error { public: using Error::Error; };
class BoundaryViolation : public Error { public: using Error::Error; };
class EvalError : public Error { public: using Error::Error; };
class ArityError : public Error { public: using Error::Error; };
class ConfigError : public Error { public: using Error::Error; };

class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t position)
        : Error(what + " at position " + std::to_string(position)), position_(position) {}
    std::size_t position() const { return position_; }

private:
    std::size_t position_;
};

}  // namespace fracvar
