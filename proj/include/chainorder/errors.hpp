#pragma once

#include <stdexcept>
#include <string>

namespace chainorder {

// Base of every error thrown by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DuplicateAssociationError : Error { using Error::Error; };
struct SelfAssociationError : Error { using Error::Error; };
struct UnknownChainError : Error { using Error::Error; };
struct UnknownBlockError : Error { using Error::Error; };
struct UnknownReferenceError : Error { using Error::Error; };
struct EmptyChainError : Error { using Error::Error; };
struct UnknownEventError : Error { using Error::Error; };
struct CyclicReferencesError : Error { using Error::Error; };
struct InvalidSnapshotError : Error { using Error::Error; };
struct TooLargeError : Error { using Error::Error; };
struct InvalidWindowError : Error { using Error::Error; };
struct InvalidConfigError : Error { using Error::Error; };
struct InvalidTraceError : Error { using Error::Error; };

// Malformed input document; `path` points at the offending field.
struct ParseError : Error {
    std::string path;

    explicit ParseError(const std::string& msg, std::string path_str = {})
        : Error(path_str.empty() ? msg : msg + " (at " + path_str + ")"),
          path(std::move(path_str)) {}
};

} // namespace chainorder
