#pragma once

#include <stdexcept>
#include <string>

namespace hjb {

/// Base class for all solver errors. Hard precondition violations throw;
/// iteration caps do not (solvers report converged=false and keep the best
/// iterate instead).
class error : public std::runtime_error {
public:
    explicit error(const std::string& msg) : std::runtime_error(msg) {}
};

/// dx does not tile (hi - lo) into a whole number of cells on some axis.
class non_conforming_spacing : public error {
    using error::error;
};

/// Spatial dimension outside the supported range 1..3, or mismatched extents.
class dimension_out_of_range : public error {
    using error::error;
};

/// A requested split leaves some subdomain slab without a single node.
class too_many_splits : public error {
    using error::error;
};

/// Interpolation point lies outside the closed domain box.
class point_outside_domain : public error {
    using error::error;
};

/// Semi-Lagrangian discount factor requires lambda * h < 1.
class cfl_violation : public error {
    using error::error;
};

/// A stencil column is neither an unknown nor covered by fixed values.
class missing_fixed_value : public error {
    using error::error;
};

/// Linear-system factorization failed or the solve residual is out of tolerance.
class singular_system : public error {
    using error::error;
};

/// Target set contains no grid node at the requested resolution.
class empty_target : public error {
    using error::error;
};

/// Unrecognized problem name or malformed configuration.
class unknown_problem : public error {
    using error::error;
};

class config_error : public error {
    using error::error;
};

/// File could not be opened or written; the message names the path.
class io_error : public error {
    using error::error;
};

} // namespace hjb
