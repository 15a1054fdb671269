#pragma once

#include <stdexcept>
#include <string>

namespace vgreg {

enum class ErrorKind {
    InvalidArgument,
    DegenerateInput,
    InsufficientCorrespondences,
    NoConsensus,
    EmptyInlierSet,
    EmptyInput,
    ParseError,
    UnsupportedFormat,
    IoError,
};

const char* to_string(ErrorKind kind);

/// Base for every failure raised by the library. `kind()` lets callers
/// branch without a catch clause per subclass.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

#define VGREG_DEFINE_ERROR(Name)                                          \
    class Name : public Error {                                           \
    public:                                                               \
        explicit Name(const std::string& message)                         \
            : Error(ErrorKind::Name, message) {}                          \
    };

VGREG_DEFINE_ERROR(InvalidArgument)
VGREG_DEFINE_ERROR(DegenerateInput)
VGREG_DEFINE_ERROR(InsufficientCorrespondences)
VGREG_DEFINE_ERROR(NoConsensus)
VGREG_DEFINE_ERROR(EmptyInlierSet)
VGREG_DEFINE_ERROR(EmptyInput)
VGREG_DEFINE_ERROR(UnsupportedFormat)
VGREG_DEFINE_ERROR(IoError)

#undef VGREG_DEFINE_ERROR

/// Malformed file content. `location` is a 1-based line number for text
/// formats or a byte offset for binary ones (0 when unknown).
class ParseError : public Error {
public:
    ParseError(const std::string& message, std::size_t location = 0)
        : Error(ErrorKind::ParseError, message), location_(location) {}

    std::size_t location() const noexcept { return location_; }

private:
    std::size_t location_;
};

}  // namespace vgreg
