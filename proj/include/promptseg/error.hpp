#pragma once

#include <stdexcept>
#include <string>

namespace promptseg {

// Base of every error the library throws; `what()` is suitable for a log line.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

// A mask with no foreground pixels reached an operation that needs one.
class EmptyMask : public Error {
public:
    explicit EmptyMask(std::string image_id = {})
        : Error(image_id.empty() ? std::string("mask has no foreground pixels")
                                 : "mask has no foreground pixels: " + image_id),
          image_id_(std::move(image_id)) {}

    const std::string& image_id() const noexcept { return image_id_; }

private:
    std::string image_id_;
};

// Clamping a perturbed box to the image left nothing.
class DegenerateBox : public Error {
public:
    using Error::Error;
};

class PredictorFailure : public Error {
public:
    PredictorFailure(const std::string& msg, std::string captured_output)
        : Error(msg), output_(std::move(captured_output)) {}

    const std::string& captured_output() const noexcept { return output_; }

private:
    std::string output_;
};

}  // namespace promptseg
