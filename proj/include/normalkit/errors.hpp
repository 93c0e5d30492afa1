#pragma once

#include <stdexcept>
#include <string>

namespace normalkit {

// Base class for all domain errors raised by the library.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed input text (gluing files, vectors, scripts). Carries line/column.
struct ParseError : Error {
    int line = 0;
    int col = 0;
    ParseError(const std::string& msg, int line_, int col_)
        : Error("parse error at line " + std::to_string(line_) + ", col " + std::to_string(col_) +
                ": " + msg),
          line(line_),
          col(col_) {}
};

// Structurally invalid triangulation (unglued face, non-involutive gluing, ...).
struct InvalidTriangulation : Error {
    using Error::Error;
};

// Operation called outside its precondition (unmatched vector, stale disc, ...).
struct DomainError : Error {
    using Error::Error;
};

}  // namespace normalkit
