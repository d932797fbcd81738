#pragma once

#include <stdexcept>
#include <string>

namespace lfpca {

enum class ErrorKind {
    InvalidArgument,
    Io,
    Format,
    State,
    DegenerateInput,
    Numeric,
};

const char* to_string(ErrorKind kind) noexcept;

// Base of every error the library throws; `kind()` drives CLI exit codes.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

#define LFPCA_DEFINE_ERROR(Name, Kind)                                   \
    class Name : public Error {                                          \
    public:                                                              \
        explicit Name(const std::string& message) : Error(Kind, message) {} \
    }

LFPCA_DEFINE_ERROR(InvalidArgument, ErrorKind::InvalidArgument);
LFPCA_DEFINE_ERROR(IoError, ErrorKind::Io);
LFPCA_DEFINE_ERROR(FormatError, ErrorKind::Format);
LFPCA_DEFINE_ERROR(StateError, ErrorKind::State);
LFPCA_DEFINE_ERROR(DegenerateInput, ErrorKind::DegenerateInput);
LFPCA_DEFINE_ERROR(NumericError, ErrorKind::Numeric);

#undef LFPCA_DEFINE_ERROR

} // namespace lfpca
