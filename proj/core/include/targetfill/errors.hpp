// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>

namespace targetfill {

// Denoiser failed to produce an estimate (worker crash, bad output, ...).
class BackendError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// The worker violated the FDN1 framing or message contract.
class ProtocolError : public BackendError {
public:
    using BackendError::BackendError;
};

}  // namespace targetfill

namespace targetfill {

// Image file could not be read, decoded or written.
class ImageIoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace targetfill
