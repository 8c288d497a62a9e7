#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kpe/concurrence.hpp"
#include "kpe/partitions.hpp"
#include "kpe/qstate.hpp"

namespace kpe {

enum class EstimateStatus { exact, upper_bound, heuristic_lower_bound };

const char* to_string(EstimateStatus s);

// A pure-state ensemble {p_i, |psi_i>} of a density matrix.
struct Decomposition {
    std::vector<double> weights;
    std::vector<PureState> states;
};

// Checks weights (nonnegative, sum 1 within 1e-10) and that the ensemble
// reproduces `target` entrywise within 1e-8. Throws validation_error.
void validate_decomposition(const Decomposition& dec, const DensityMatrix& target);

struct ConvexRoofOptions {
    // 0 selects the default min(max(r^2, 2r), 24) for rank r; an explicit
    // value must be >= r. A seeded ensemble longer than this widens it.
    int ensemble_size = 0;
    int restarts = 20;
    int max_iters = 500;
    std::uint64_t seed = 0;
    // Optional known decomposition of the input; evaluated as a candidate and
    // used as a local-search start.
    std::optional<Decomposition> initial;
    // Above this parameter count the simplex search is skipped and only the
    // candidate starts are evaluated.
    int nm_dim_cap = 600;
};

struct MeasureEstimate {
    double value = 0.0;
    EstimateStatus status = EstimateStatus::upper_bound;
    std::optional<Partition> partition_witness;        // pure / certified path
    std::optional<Decomposition> decomposition_witness;  // ensemble path
    std::vector<double> optimizer_trace;  // best value per restart
    std::uint64_t seed = 0;
    int rank = 0;
    std::string note;
};

// Convex-roof upper bound on the mixed-state measure: minimizes the ensemble
// average of the pure-state measure over parametrized decompositions of rho.
// Rank-1 inputs short-circuit to the exact pure value. The result is always
// an upper bound (exact only for rank-1 inputs); deterministic given seed.
MeasureEstimate ek_mixed_upper(const DensityMatrix& rho, int k,
                               const ConvexRoofOptions& opts = {});

}  // namespace kpe
