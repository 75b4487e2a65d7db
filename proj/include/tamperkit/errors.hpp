#pragma once

#include <stdexcept>
#include <string>

namespace tamperkit {

/// Base class for every error the library throws on purpose.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Mismatched image/mask/vector dimensions.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// Rectangle or coordinate outside the addressed buffer.
class BoundsError : public Error {
public:
    using Error::Error;
};

/// Iterative solver stopped above tolerance at the iteration cap.
class NonConvergence : public Error {
public:
    NonConvergence(const std::string& what, double residual, int iterations)
        : Error(what), residual(residual), iterations(iterations) {}
    double residual = 0.0;
    int iterations = 0;
};

/// Network/transport failure talking to the annotator endpoint.
class TransportError : public Error {
public:
    using Error::Error;
};

/// Annotator reply body could not be interpreted.
class MalformedResponse : public Error {
public:
    using Error::Error;
};

/// Filtering requires a non-empty ground-truth OCR string.
class EmptyGroundTruth : public Error {
public:
    using Error::Error;
};

/// Scoring a sample whose record lacks the needed ground truth.
class MissingGroundTruth : public Error {
public:
    using Error::Error;
};

/// Aggregation over an empty collection.
class EmptyInput : public Error {
public:
    using Error::Error;
};

/// File could not be opened, read or written.
class IoError : public Error {
public:
    using Error::Error;
};

/// Structurally invalid manifest, config or fixture content.
class SchemaError : public Error {
public:
    using Error::Error;
    SchemaError(const std::string& file, size_t line, const std::string& what)
        : Error(file + ":" + std::to_string(line) + ": " + what) {}
};

/// Image encode/decode failure.
class CodecError : public Error {
public:
    using Error::Error;
};

} // namespace tamperkit
