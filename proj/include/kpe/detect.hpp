#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "kpe/qstate.hpp"

namespace kpe {

// Abstract read of a density-matrix element in the 1-based convention. Lets
// the detectors run on analytic families far beyond the dense cap.
struct ElementAccessor {
    int n_qubits = 0;
    std::function<Complex(std::uint64_t i, std::uint64_t j)> element;
};

// Accessor over a dense matrix (the matrix is copied and shared).
ElementAccessor dense_accessor(const DensityMatrix& rho);

// Matrix-element functionals:
//   a: corner coherence |rho_{1,2^N}|
//   b: sum of sqrt(rho_{i,i} rho_{2^N-i+1,2^N-i+1}) over interior i
//   c: sum of |rho| over distinct single-excitation coherences (ordered pairs)
//   d: sum of sqrt(rho_{1,1} rho_{..}) over double-excitation populations
//   e: sum of single-excitation populations
struct Functionals {
    double a = 0, b = 0, c = 0, d = 0, e = 0;
};

Functionals functionals(const ElementAccessor& acc);

// ceil(N/k), the minimum block count of any admissible partition.
int min_block_count(int n, int k);

// GHZ-type criterion margin (2^r - 2) a - b with r = ceil(N/k); a positive
// margin certifies (k+1)-partite entanglement, nonpositive is inconclusive.
double criterion_ghz(const Functionals& f, int n, int k);
double criterion_ghz(const ElementAccessor& acc, int k);

// W-type criterion margin c - d - (k-1) e; same verdict semantics.
double criterion_w(const Functionals& f, int k);
double criterion_w(const ElementAccessor& acc, int k);

// log2(b/a + 2); +infinity when a = 0 (the rule can never fire). Detection
// for a given k: value < ceil(N/k).
double degree_dk(const Functionals& f);
double degree_dk(const ElementAccessor& acc);

// (c - d)/e + 1; empty when e = 0 (degenerate, never detects).
// Detection for a given k: value > k.
std::optional<double> degree_dtilde(const Functionals& f);
std::optional<double> degree_dtilde(const ElementAccessor& acc);

struct KVerdict {
    int k = 0;
    int r_used = 0;
    double margin_ghz = 0;
    double margin_w = 0;
    bool via_dk = false;
    bool via_dtilde = false;
    bool via_margin_ghz = false;
    bool via_margin_w = false;
    bool detected = false;  // any rule fired
};

struct DetectionReport {
    int n_qubits = 0;
    Functionals f;
    double dk = 0;  // may be +infinity
    std::optional<double> dtilde;
    std::vector<KVerdict> per_k;
    // Set when the report was computed on the PI part of another state; a
    // detection then carries over to the original state.
    bool pi_part_input = false;
    std::string pi_note;
};

// Aggregated report for the queried k values (each in 1..N-1). A true verdict
// certifies (k+1)-partite entanglement of the state the accessor presents.
DetectionReport detect_report(const ElementAccessor& acc, const std::vector<int>& ks);

std::string report_to_json_string(const DetectionReport& report,
                                  bool include_tolerances = false);

// CSV row form for sweeps.
std::string sweep_csv_header();
std::string sweep_csv_row(int n, int k, double p, const DetectionReport& report);

}  // namespace kpe
