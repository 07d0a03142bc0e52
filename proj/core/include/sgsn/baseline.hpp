#pragma once

#include <sgsn/solver.hpp>

namespace sgsn {

using BaselineResult = SolveResult;

/// Plain proximal gradient on the dual: z^{k+1} = v^k, with the same
/// subspace identification, stopping rule and trace as solve().
BaselineResult solve_pg(const DualProblem &P, SgsnConfig cfg, std::optional<Vector> z0 = std::nullopt,
                        const IterationObserver &observer = {});

} // namespace sgsn
