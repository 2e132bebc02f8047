#pragma once

#include <stdexcept>
#include <string>

namespace curriculum {

/// Base class for every failure raised by the toolkit. Messages name the
/// offending record (line, id, step) whenever one exists.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InputError : public Error {
public:
    using Error::Error;
};

class ConsistencyError : public Error {
public:
    using Error::Error;
};

}  // namespace curriculum
