#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "kpe/convexroof.hpp"
#include "kpe/qstate.hpp"

namespace kpe {

// One z-y-z Euler triple per qubit; the product of the per-qubit factors is
// the local unitary U_1 x ... x U_N.
struct LocalUnitaryParams {
    std::vector<std::array<double, 3>> euler;

    static LocalUnitaryParams identity(int n) { return {std::vector<std::array<double, 3>>(n, {0.0, 0.0, 0.0})}; }
    int n_qubits() const { return static_cast<int>(euler.size()); }
};

CMat su2_from_euler(double alpha, double beta, double gamma);

PureState apply_local_unitaries(const PureState& psi, const LocalUnitaryParams& u);
DensityMatrix apply_local_unitaries(const DensityMatrix& rho, const LocalUnitaryParams& u);

// Average of rho over all N! qubit permutations. Idempotent, trace
// preserving, permutation invariant. Guarded at N <= permutation_sum_cap.
DensityMatrix pi_part(const DensityMatrix& rho);

// pi_part of U rho U^dag.
DensityMatrix pi_part_rotated(const DensityMatrix& rho, const LocalUnitaryParams& u);

struct Prop1Options {
    int restarts = 30;
    int max_iters = 80;
    std::uint64_t seed = 0;
    ConvexRoofOptions inner = light_inner_defaults();

    static ConvexRoofOptions light_inner_defaults() {
        ConvexRoofOptions o;
        o.restarts = 1;
        o.max_iters = 60;
        return o;
    }
};

// Searches local unitaries to maximize the measure of the rotated PI part.
// When the best rotated PI part is pure the value comes from the exact pure
// measure and is a certified lower bound of the measure of rho; otherwise the
// inner value is itself an upper estimate and the result is only heuristic.
MeasureEstimate prop1_bound_search(const DensityMatrix& rho, int k,
                                   const Prop1Options& opts = {});

}  // namespace kpe
