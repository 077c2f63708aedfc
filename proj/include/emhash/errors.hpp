#pragma once

#include <stdexcept>
#include <string>

namespace emhash {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid model parameters or configuration.
class ParameterError : public Error {
public:
    using Error::Error;
};

// Access to a block index that is not allocated.
class DeviceError : public Error {
public:
    using Error::Error;
};

// A block write would exceed b items, or a memory reservation would exceed m words.
class CapacityError : public Error {
public:
    using Error::Error;
};

class DuplicateError : public Error {
public:
    using Error::Error;
};

// Operation called outside its documented precondition.
class PreconditionError : public Error {
public:
    using Error::Error;
};

// A structural invariant was broken. Always a bug in table code.
class InvariantError : public Error {
public:
    using Error::Error;
};

} // namespace emhash
