#pragma once

#include <vector>

#include "kpe/partitions.hpp"
#include "kpe/qstate.hpp"

namespace kpe {

struct PureMeasureResult {
    double value = 0.0;
    Partition argmin_partition;
    std::vector<double> per_block_concurrence;
};

// Bipartite concurrence of `block` against its complement,
// sqrt(2 * [1 - Tr(rho_block^2)]), with the radicand clamped at zero.
// block must be a proper nonempty subset of 1..N.
double block_concurrence(const PureState& psi, const QubitSubset& block);

// Minimum over all partitions with blocks of size <= k of the mean block
// concurrence. The reported argmin is the first partition in stream order
// achieving the minimum. Requires 1 <= k <= N-1 and N within the dense cap.
PureMeasureResult ek_pure(const PureState& psi, int k);

}  // namespace kpe
