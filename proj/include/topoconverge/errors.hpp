#pragma once

#include <stdexcept>
#include <string>

namespace topo {

// Input-class failures (malformed files, bad configuration, degenerate data).
// The CLI maps these to exit code 2.
struct input_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Resource-budget failures (cell / matrix / diagram size limits).
// The CLI maps these to exit code 3.
struct capacity_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct bad_magic : input_error {
    using input_error::input_error;
};
struct shape_mismatch : input_error {
    using input_error::input_error;
};
struct non_finite : input_error {
    using input_error::input_error;
};
struct io_failure : input_error {
    using input_error::input_error;
};
struct parse_error : input_error {
    using input_error::input_error;
};
struct non_monotone_steps : input_error {
    using input_error::input_error;
};
struct degenerate_scale : input_error {
    using input_error::input_error;
};
struct empty_diagram : input_error {
    using input_error::input_error;
};
struct grid_mismatch : input_error {
    using input_error::input_error;
};
struct undefined_correlation : input_error {
    using input_error::input_error;
};
struct insufficient_snapshots : input_error {
    using input_error::input_error;
};
struct degenerate_domain : input_error {
    using input_error::input_error;
};

struct capacity_exceeded : capacity_error {
    using capacity_error::capacity_error;
};

} // namespace topo
