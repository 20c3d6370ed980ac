// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace readrank {

// Base class for all readrank errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input data (bad records, schema violations, I/O).
// The CLI maps these to exit code 2.
class DataError : public Error {
public:
    using Error::Error;
};

// Invalid parameters or flag combinations. The CLI maps these to exit code 1.
class UsageError : public Error {
public:
    using Error::Error;
};

// An answer or gold string that is empty after normalization. Distinct so
// callers can filter degenerate predictions instead of aborting a run.
class EmptyAnswerError : public DataError {
public:
    using DataError::DataError;
};

} // namespace readrank
