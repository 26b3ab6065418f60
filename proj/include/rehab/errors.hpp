#pragma once

#include <stdexcept>
#include <string>

namespace rehab {

// Base for all library errors. Context accumulated via add_context() is
// prepended to what(), so a failure deep inside a session run still names
// the task and stage it happened in.
class Error : public std::runtime_error {
public:
    explicit Error(std::string message)
        : std::runtime_error(""), message_(std::move(message)) {}

    const char* what() const noexcept override { return message_.c_str(); }

    void add_context(const std::string& context) {
        message_ = context + ": " + message_;
    }

private:
    std::string message_;
};

// Bad configuration, bad CLI input, inputs that do not cover the rule
// vocabulary. CLI exit code 2.
class ConfigError : public Error {
public:
    using Error::Error;
};

// Lexical or semantic error in a .frules file, with 1-based location.
class ParseError : public ConfigError {
public:
    ParseError(int line, int column, const std::string& message)
        : ConfigError("line " + std::to_string(line) + ", col " +
                      std::to_string(column) + ": " + message),
          line_(line), column_(column) {}

    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }

private:
    int line_;
    int column_;
};

// Well-formed request whose answer does not exist in the problem domain
// (target out of reach, no rule fired, trace too short). CLI exit code 4.
class DomainError : public Error {
public:
    using Error::Error;
};

// |c3| > 1 in the inverse kinematics solve: target outside the annular
// workspace.
class UnreachableError : public DomainError {
public:
    using DomainError::DomainError;
};

// Target on the shoulder axis (x = y = 0), yaw undefined.
class SingularError : public DomainError {
public:
    using DomainError::DomainError;
};

// Every rule fired with strength zero; the caller decides the fallback.
class NoRuleFiredError : public DomainError {
public:
    using DomainError::DomainError;
};

}  // namespace rehab
