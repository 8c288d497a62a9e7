#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include "kpe/qstate.hpp"

// Independent test-side oracles. These deliberately use different algorithms
// from the library (full-matrix contraction, plain recursion, no memoization)
// so the two routes can check each other.
namespace oracle {

// Reduced matrix by direct contraction: accumulate every full-index pair
// whose traced bits agree.
inline Eigen::MatrixXcd partial_trace(const Eigen::MatrixXcd& rho, int n,
                                      const std::vector<int>& keep) {
    const std::int64_t d = std::int64_t{1} << n;
    const int s = static_cast<int>(keep.size());
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(std::int64_t{1} << s, std::int64_t{1} << s);
    auto kept_bits = [&](std::int64_t x) {
        std::int64_t r = 0;
        for (int q : keep) r = (r << 1) | ((x >> (n - q)) & 1);
        return r;
    };
    auto traced_bits = [&](std::int64_t x) {
        std::int64_t t = 0;
        for (int q = 1; q <= n; ++q) {
            if (std::find(keep.begin(), keep.end(), q) != keep.end()) continue;
            t = (t << 1) | ((x >> (n - q)) & 1);
        }
        return t;
    };
    for (std::int64_t x = 0; x < d; ++x)
        for (std::int64_t y = 0; y < d; ++y)
            if (traced_bits(x) == traced_bits(y))
                out(kept_bits(x), kept_bits(y)) += rho(x, y);
    return out;
}

inline void partitions_rec(int n, int k, int element, std::vector<std::vector<int>>& cur,
                           std::vector<std::vector<std::vector<int>>>& out) {
    if (element > n) {
        out.push_back(cur);
        return;
    }
    // index loop: deeper recursion grows `cur`, which may reallocate
    const std::size_t existing = cur.size();
    for (std::size_t b = 0; b < existing; ++b) {
        if (static_cast<int>(cur[b].size()) >= k) continue;
        cur[b].push_back(element);
        partitions_rec(n, k, element + 1, cur, out);
        cur[b].pop_back();
    }
    cur.push_back({element});
    partitions_rec(n, k, element + 1, cur, out);
    cur.pop_back();
}

// Every partition of {1..n} with blocks of size <= k, in recursion order.
inline std::vector<std::vector<std::vector<int>>> partitions(int n, int k) {
    std::vector<std::vector<std::vector<int>>> out;
    std::vector<std::vector<int>> cur;
    partitions_rec(n, k, 1, cur, out);
    return out;
}

// Mean block concurrence minimized by plain scan over the oracle partitions,
// block purity from the dense reduced matrix via an explicit matrix square.
inline double ek_pure(const kpe::PureState& psi, int k) {
    const Eigen::MatrixXcd rho = psi.amplitudes * psi.amplitudes.adjoint();
    double best = std::numeric_limits<double>::infinity();
    for (const auto& part : partitions(psi.n_qubits, k)) {
        double sum = 0.0;
        for (const auto& block : part) {
            const Eigen::MatrixXcd red = partial_trace(rho, psi.n_qubits, block);
            const double pur = (red * red).trace().real();
            sum += std::sqrt(std::max(0.0, 2.0 * (1.0 - pur)));
        }
        best = std::min(best, sum / static_cast<double>(part.size()));
    }
    return best;
}

inline const std::vector<std::uint64_t> bell = {1,    1,    2,     5,     15,    52,
                                                203,  877,  4140,  21147, 115975};

}  // namespace oracle

namespace testutil {

inline kpe::PureState make_pure(int n, std::initializer_list<std::complex<double>> amps) {
    kpe::PureState s;
    s.n_qubits = n;
    s.amplitudes.resize(static_cast<Eigen::Index>(amps.size()));
    Eigen::Index i = 0;
    for (const auto& a : amps) s.amplitudes(i++) = a;
    return s;
}

inline double max_abs_diff(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    return (a - b).cwiseAbs().maxCoeff();
}

inline std::vector<std::vector<int>> all_permutations(int n) {
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i + 1;
    std::vector<std::vector<int>> out;
    do {
        out.push_back(perm);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return out;
}

}  // namespace testutil
