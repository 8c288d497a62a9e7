#pragma once

#include <string>

#include "kpe/detect.hpp"
#include "kpe/qstate.hpp"
#include "kpe/rng.hpp"

namespace kpe {

enum class Family { ghz, w, dicke, product };

Family family_from_string(const std::string& name);
std::string to_string(Family f);

// Noise-parameter conventions follow each family's usual presentation and are
// intentionally different:
//   ghz:   rho(p) = p |G><G| + (1-p)/2^N I        (p = GHZ weight, p = 1 pure)
//   w, dicke, product:
//          rho(p) = (1-p) |psi><psi| + p/2^N I    (p = noise weight, p = 0 pure)
struct FamilySpec {
    Family family = Family::ghz;
    int n_qubits = 2;
    double noise_p = 1.0;    // defaulted per family by normalize()
    int excitations = 1;     // dicke only
    std::string bitstring;   // product only

    // Weight carried by the pure family state under the family's convention.
    double pure_weight() const { return family == Family::ghz ? noise_p : 1.0 - noise_p; }
};

void validate_spec(const FamilySpec& spec);

PureState ghz_state(int n);
PureState w_state(int n);
PureState dicke_state(int n, int excitations);
PureState product_basis_state(const std::string& bits);

// The pure family member, ignoring noise.
PureState family_pure_state(const FamilySpec& spec);

// Dense mixture per the family's noise convention (pure cases come back as
// rank-1 density matrices). Subject to the dense cap.
DensityMatrix make_state(const FamilySpec& spec);

inline constexpr int oracle_cap = 24;

// Analytic element accessor; agrees with make_state entrywise where the dense
// form exists. Valid for N <= oracle_cap.
ElementAccessor element_oracle(const FamilySpec& spec);

// Printed closed forms of the two degree curves.
double closed_form_dk_ghz(int n, double p);      // +infinity at p = 0
double closed_form_dtilde_w(int n, double p);

enum class ThresholdKind { boundary, always_detects, never_detects };

struct ThresholdResult {
    ThresholdKind kind = ThresholdKind::boundary;
    double p = 0.0;  // boundary point when kind == boundary
};

// Noise value at which the family's degree rule flips for the given k
// (ghz: detects for p above the boundary; w: detects below it). Both closed
// forms are Moebius in p, so the boundary is solved analytically.
ThresholdResult detection_threshold(Family family, int n, int k);

// Seeded random generators for property suites.
PureState haar_random_pure(int n, Rng& rng);
CMat haar_unitary(int dim, Rng& rng);
DensityMatrix ginibre_density(int n, int rank, Rng& rng);

// Tensor product of Haar-random blocks of size <= k scattered over random
// qubit labels: a k-producible pure state by construction.
PureState random_k_producible_pure(int n, int k, Rng& rng);

// Convex mixture of random k-producible pure states.
DensityMatrix random_k_producible_density(int n, int k, int terms, Rng& rng);

}  // namespace kpe
