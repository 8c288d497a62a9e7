#include "kpe/concurrence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace kpe {

double block_concurrence(const PureState& psi, const QubitSubset& block) {
    validate_subset(block, psi.n_qubits);
    if (block.size() >= psi.n_qubits)
        throw validation_error("block must be a proper subset of the qubits");
    return std::sqrt(2.0 * std::max(0.0, reduced_impurity(psi, block.mask(psi.n_qubits))));
}

PureMeasureResult ek_pure(const PureState& psi, int k) {
    const int n = psi.n_qubits;
    if (n < 2) throw validation_error("the measure needs at least two qubits");
    if (n > dense_density_cap) {
        std::ostringstream os;
        os << "partition scan for " << n << " qubits exceeds the dense cap of "
           << dense_density_cap;
        throw cap_error(os.str());
    }
    if (k < 1 || k > n - 1) {
        std::ostringstream os;
        os << "k = " << k << " out of range 1..N-1 = " << (n - 1);
        throw std::invalid_argument(os.str());
    }

    // Block concurrence depends only on the subset, so memoize per bitmask.
    const std::uint32_t dim_masks = std::uint32_t{1} << n;
    std::vector<double> memo(dim_masks, -1.0);
    auto block_value = [&](std::uint32_t mask) {
        double& slot = memo[mask];
        if (slot < 0.0)
            slot = std::sqrt(2.0 * std::max(0.0, reduced_impurity(psi, mask)));
        return slot;
    };

    double best = std::numeric_limits<double>::infinity();
    Partition best_partition;
    std::vector<double> best_terms;

    PartitionStream stream(n, k);
    std::vector<double> terms;
    while (auto part = stream.next()) {
        const int m = part->block_count();
        terms.clear();
        double sum = 0.0;
        bool pruned = false;
        for (const auto& block : part->blocks) {
            sum += block_value(block.mask(n));
            terms.push_back(block_value(block.mask(n)));
            if (sum >= best * m) {  // cannot strictly beat the incumbent
                pruned = true;
                break;
            }
        }
        if (pruned) continue;
        const double mean = sum / m;
        if (mean < best) {
            best = mean;
            best_partition = *part;
            best_terms = terms;
        }
    }

    PureMeasureResult out;
    out.value = best;
    out.argmin_partition = std::move(best_partition);
    out.per_block_concurrence = std::move(best_terms);
    return out;
}

}  // namespace kpe
