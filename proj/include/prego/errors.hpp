// Copyright (C) 2026 The prego authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace prego {

// Base class for every error raised by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A caller handed us something malformed (empty stream, bad label, ...).
struct InvalidInputError : Error {
    using Error::Error;
};

// A value type's structural invariant does not hold (non-contiguous
// segments, span/stream length mismatch, ...).
struct InvariantViolationError : Error {
    using Error::Error;
};

// Dataset files that do not conform to the documented schema.
struct LoadError : Error {
    using Error::Error;
};

// The completion service could not be reached or kept failing after the
// configured retries. Infrastructure trouble, not a model answer.
struct ClientError : Error {
    using Error::Error;
};

// The completion service replied, but not with the JSON envelope we speak.
struct ProtocolError : Error {
    using Error::Error;
};

}  // namespace prego
