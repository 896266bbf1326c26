#pragma once

#include <stdexcept>
#include <string>

namespace blogrank {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input that could not be parsed: malformed records, corrupt snapshots.
class ParseError : public Error {
public:
    using Error::Error;
};

/// Files that cannot be opened, read or written.
class IoError : public Error {
public:
    using Error::Error;
};

/// Caller passed arguments outside an operation's domain.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

}  // namespace blogrank
