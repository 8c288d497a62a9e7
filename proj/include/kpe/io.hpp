#pragma once

#include <string>
#include <variant>

#include "kpe/qstate.hpp"

namespace kpe {

// State file format, shared across the toolkit:
//   {"n_qubits": N, "kind": "pure"|"density", "data": ...}
// Pure data is a list of [re, im] pairs of length 2^N; density data is a
// row-major list of 2^N lists of [re, im] pairs. Readers validate and reject
// inputs that violate the state invariants, naming the failed check.

using StateVariant = std::variant<PureState, DensityMatrix>;

void write_state_file(const std::string& path, const PureState& psi);
void write_state_file(const std::string& path, const DensityMatrix& rho);

StateVariant read_state_file(const std::string& path);

int state_qubits(const StateVariant& state);

}  // namespace kpe
