#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <initializer_list>
#include <vector>

#include "kpe/errors.hpp"

namespace kpe {

using Complex = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

namespace tol {
inline constexpr double pure_norm = 1e-10;   // | ||psi||^2 - 1 |
inline constexpr double hermitian = 1e-9;    // entrywise |rho - rho^dag|
inline constexpr double trace_one = 1e-10;   // | Tr(rho) - 1 |
inline constexpr double psd_floor = -1e-9;   // smallest admissible eigenvalue
inline constexpr double rank_eps = 1e-10;    // eigenvalue threshold for rank decisions
}  // namespace tol

// Dense-storage guards. Larger N is served by the analytic element oracles.
inline constexpr int dense_density_cap = 10;
inline constexpr int dense_pure_cap = 16;
inline constexpr int permutation_sum_cap = 8;  // N! averaging in the PI part

// Basis convention, used everywhere: basis index i (1-based) encodes the bit
// string b1 b2 ... bN with qubit 1 most significant, i = 1 + sum_j b_j 2^(N-j).
// Amplitudes and matrix entries are stored 0-based, so the paper-style element
// rho_{i,j} is entries(i-1, j-1). Qubit q occupies bit position (N - q) of the
// 0-based index.

struct PureState {
    int n_qubits = 0;
    CVec amplitudes;

    Eigen::Index dim() const { return amplitudes.size(); }
};

struct DensityMatrix {
    int n_qubits = 0;
    CMat entries;

    Eigen::Index dim() const { return entries.rows(); }
};

// Sorted distinct qubit labels in 1..N.
struct QubitSubset {
    std::vector<int> indices;

    static QubitSubset of(std::initializer_list<int> labels);
    static QubitSubset from_mask(std::uint32_t mask, int n);

    // Bitmask over the 0-based basis index: qubit q contributes bit (n - q).
    std::uint32_t mask(int n) const;
    QubitSubset complement(int n) const;
    int size() const { return static_cast<int>(indices.size()); }
    bool empty() const { return indices.empty(); }
};

// Explicit validation; constructors do not validate, so noisy inputs from
// files can be diagnosed. Throws validation_error naming the failing invariant.
void validate_pure(const PureState& psi);
void validate_density(const DensityMatrix& rho);
void validate_subset(const QubitSubset& s, int n);

DensityMatrix density_from_pure(const PureState& psi);

PureState tensor_product(const PureState& a, const PureState& b);

// Reduced state on `keep`; kept qubits preserve their original relative order.
DensityMatrix partial_trace(const DensityMatrix& rho, const QubitSubset& keep);

// Tr(rho^2) = ||rho||_F^2 for Hermitian rho.
double purity(const DensityMatrix& rho);

// Purity of the reduced state of a pure state on the qubits of `block_mask`,
// computed from the Gram matrix of the reshaped amplitude vector (never
// materializes the full density matrix).
double reduced_purity(const PureState& psi, std::uint32_t block_mask);

// 1 - Tr(rho_block^2) for the reduced state of a pure state. Near-zero values
// are refined through the singular values of the reshaped amplitude matrix,
// whose cross-term sum has no cancellation, so exact product blocks come out
// at ~1e-30 instead of the ~1e-16 a subtraction would leave.
double reduced_impurity(const PureState& psi, std::uint32_t block_mask);

// Basis relabeling: output bit at position perm(j) equals input bit at
// position j. perm is a bijection of 1..N given as perm[j-1] = perm(j).
PureState permute_qubits(const PureState& psi, const std::vector<int>& perm);
DensityMatrix permute_qubits(const DensityMatrix& rho, const std::vector<int>& perm);

// Single-qubit unitary u (2x2) acting on qubit q, all other qubits untouched.
PureState apply_single_qubit(const PureState& psi, int qubit, const CMat& u);
DensityMatrix apply_single_qubit(const DensityMatrix& rho, int qubit, const CMat& u);

}  // namespace kpe
