// Copyright (C) 2026 The ACS Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace acs {

/// Base class of every error raised by the simulator libraries.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Malformed buffer, file or descriptor.
class FormatError : public Error {
public:
    using Error::Error;
};

/// User-supplied configuration that fails validation (CLI exit code 2).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Arithmetic overflow of a modeled fixed-width register.
class OverflowError : public Error {
public:
    using Error::Error;
};

}  // namespace acs
