#pragma once

#include <stdexcept>

namespace isp {

// A non-finite response reached an accumulator or reader.
struct DataQualityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Time steps arrived out of order.
struct SequenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A file or stream does not match its declared layout.
struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A segment set does not tile its step range.
struct IntegrityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace isp
