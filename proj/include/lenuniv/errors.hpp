#pragma once

#include <stdexcept>
#include <string>

namespace lenuniv {

struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed textual or JSON input (CLI exit code 2).
struct parse_error : error {
    using error::error;
};

// Structurally valid input that violates a precondition (CLI exit code 2).
struct input_error : error {
    using error::error;
};

// A pinned budget or cap was exceeded (CLI exit code 3).
struct resource_limit_error : error {
    using error::error;
};

} // namespace lenuniv
