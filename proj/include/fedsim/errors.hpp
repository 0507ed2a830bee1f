#pragma once

#include <stdexcept>

namespace fedsim {

// A caller violated a documented precondition.
struct contract_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A numeric routine produced a non-finite value.
struct numeric_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// File or stream problem.
struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid experiment configuration.
struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Device sampling left an edge without any device; the round sample must
// be re-drawn.
struct empty_edge_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace fedsim
