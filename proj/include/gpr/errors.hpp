#pragma once

#include <stdexcept>
#include <string>

namespace gpr {

enum class ErrorKind {
    empty_attribute_set,
    format_error,
    bad_config,
    size_mismatch,
    shape_mismatch,
    empty_slice,
    bad_k,
    bad_label,
    degenerate_batch,
    non_finite_loss,
    dim_mismatch,
    no_relevant,
    io_error,
};

inline const char* error_name(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::empty_attribute_set: return "EmptyAttributeSet";
        case ErrorKind::format_error:        return "FormatError";
        case ErrorKind::bad_config:          return "BadConfig";
        case ErrorKind::size_mismatch:       return "SizeMismatch";
        case ErrorKind::shape_mismatch:      return "ShapeMismatch";
        case ErrorKind::empty_slice:         return "EmptySlice";
        case ErrorKind::bad_k:               return "BadK";
        case ErrorKind::bad_label:           return "BadLabel";
        case ErrorKind::degenerate_batch:    return "DegenerateBatch";
        case ErrorKind::non_finite_loss:     return "NonFiniteLoss";
        case ErrorKind::dim_mismatch:        return "DimMismatch";
        case ErrorKind::no_relevant:         return "NoRelevant";
        case ErrorKind::io_error:            return "IoError";
    }
    return "UnknownError";
}

// All library failures surface as Error; kind() identifies the contract that
// was violated and name() is what the CLI prints on the diagnostic stream.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(std::string(error_name(kind)) + ": " + message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }
    const char* name() const noexcept { return error_name(kind_); }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void raise(ErrorKind kind, const std::string& message) {
    throw Error(kind, message);
}

} // namespace gpr
