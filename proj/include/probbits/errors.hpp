#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace probbits {

enum class ErrorKind {
    InvalidWeight,
    InvalidVector,
    InvalidRange,
    Overflow,
    ManagerMismatch,
    SyntaxError,
    CompileError,
    UnsatisfiableEvidence,
    EnumerationTooLarge,
    Io,
};

const char* error_kind_name(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    Error(ErrorKind kind, const std::string& message, uint32_t line, uint32_t column)
        : std::runtime_error(message), kind_(kind), line_(line), column_(column) {}

    ErrorKind kind() const { return kind_; }
    uint32_t line() const { return line_; }      // 1-based, 0 if not applicable
    uint32_t column() const { return column_; }  // 1-based, 0 if not applicable

private:
    ErrorKind kind_;
    uint32_t line_ = 0;
    uint32_t column_ = 0;
};

}  // namespace probbits
