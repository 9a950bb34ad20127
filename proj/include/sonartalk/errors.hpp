#pragma once

#include <stdexcept>
#include <string>

namespace sonartalk {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid configuration value or roster.
class ConfigError : public Error {
public:
    using Error::Error;
};

// Caller handed in a value that violates an operation's precondition.
class InputError : public Error {
public:
    using Error::Error;
};

// Streaming protocol misuse, e.g. non-monotone frame indices.
class StreamError : public Error {
public:
    using Error::Error;
};

// A decoder broke the forced-prefix or chunk-count contract.
class DecoderContractError : public Error {
public:
    using Error::Error;
};

class FrameTooLargeError : public Error {
public:
    using Error::Error;
};

class ScenarioError : public Error {
public:
    using Error::Error;
};

class JournalError : public Error {
public:
    using Error::Error;
};

class ConnectionError : public Error {
public:
    using Error::Error;
};

}  // namespace sonartalk
