#pragma once

#include <stdexcept>
#include <string>

namespace ideabench {

// Error taxonomy maps onto CLI exit codes: ConfigError -> 1,
// BackendError -> 2, DataError -> 3.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : Error {
    using Error::Error;
};

// Transport failures, auth/quota rejections, malformed backend replies.
struct BackendError : Error {
    using Error::Error;
};

// Corpus/file-format problems: parse failures, invariant violations.
struct DataError : Error {
    using Error::Error;
};

}  // namespace ideabench
