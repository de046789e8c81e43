#pragma once

#include "spgs/limit_solver.hpp"
#include "spgs/sp_solver.hpp"

namespace fixture {

// Canonical family mu = 1, q = 4, cw = 0 on the default grid; built once per process.
inline const spgs::Nonlinearity& cubic() {
    static const spgs::Nonlinearity nl = spgs::Nonlinearity::canonical(1.0, 4.0, 0.0);
    return nl;
}

inline const spgs::GridPtr& default_grid() {
    static const spgs::GridPtr g = spgs::RadialGrid::make(30.0, 3000);
    return g;
}

inline const spgs::SolutionBranch& cubic_branch() {
    static const spgs::SolutionBranch b =
        spgs::continuation(cubic(), default_grid(), {0.2, 0.1, 0.05, 0.02, 0.01, 0.005});
    return b;
}

} // namespace fixture
