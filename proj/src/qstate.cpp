#include "kpe/qstate.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>

namespace kpe {

namespace {

std::int64_t dim_for(int n) { return std::int64_t{1} << n; }

void check_qubit_count_pure(int n) {
    if (n < 1) throw validation_error("pure state needs at least one qubit");
    if (n > dense_pure_cap) {
        std::ostringstream os;
        os << "pure state with " << n << " qubits exceeds the dense cap of "
           << dense_pure_cap << "; use the family element oracle for large N";
        throw cap_error(os.str());
    }
}

void check_qubit_count_density(int n) {
    if (n < 1) throw validation_error("density matrix needs at least one qubit");
    if (n > dense_density_cap) {
        std::ostringstream os;
        os << "density matrix with " << n << " qubits exceeds the dense cap of "
           << dense_density_cap << "; use the family element oracle for large N";
        throw cap_error(os.str());
    }
}

}  // namespace

QubitSubset QubitSubset::of(std::initializer_list<int> labels) {
    QubitSubset s;
    s.indices.assign(labels);
    std::sort(s.indices.begin(), s.indices.end());
    return s;
}

QubitSubset QubitSubset::from_mask(std::uint32_t mask, int n) {
    QubitSubset s;
    for (int q = 1; q <= n; ++q)
        if (mask & (std::uint32_t{1} << (n - q))) s.indices.push_back(q);
    return s;
}

std::uint32_t QubitSubset::mask(int n) const {
    std::uint32_t m = 0;
    for (int q : indices) m |= std::uint32_t{1} << (n - q);
    return m;
}

QubitSubset QubitSubset::complement(int n) const {
    QubitSubset s;
    std::size_t pos = 0;
    for (int q = 1; q <= n; ++q) {
        if (pos < indices.size() && indices[pos] == q) {
            ++pos;
        } else {
            s.indices.push_back(q);
        }
    }
    return s;
}

void validate_subset(const QubitSubset& s, int n) {
    if (s.indices.empty()) throw validation_error("qubit subset is empty");
    int prev = 0;
    for (int q : s.indices) {
        if (q < 1 || q > n) {
            std::ostringstream os;
            os << "qubit index " << q << " out of range 1.." << n;
            throw validation_error(os.str());
        }
        if (q == prev) throw validation_error("qubit subset has duplicate indices");
        prev = q;
    }
}

void validate_pure(const PureState& psi) {
    check_qubit_count_pure(psi.n_qubits);
    if (psi.amplitudes.size() != dim_for(psi.n_qubits)) {
        std::ostringstream os;
        os << "amplitude vector has length " << psi.amplitudes.size()
           << ", expected 2^" << psi.n_qubits << " = " << dim_for(psi.n_qubits);
        throw validation_error(os.str());
    }
    const double nrm2 = psi.amplitudes.squaredNorm();
    if (std::abs(nrm2 - 1.0) > tol::pure_norm) {
        std::ostringstream os;
        os << "state is not normalized: squared norm deviates from 1 by "
           << std::abs(nrm2 - 1.0) << " (tolerance " << tol::pure_norm << ")";
        throw validation_error(os.str());
    }
}

void validate_density(const DensityMatrix& rho) {
    check_qubit_count_density(rho.n_qubits);
    const auto d = dim_for(rho.n_qubits);
    if (rho.entries.rows() != d || rho.entries.cols() != d) {
        std::ostringstream os;
        os << "matrix is " << rho.entries.rows() << "x" << rho.entries.cols()
           << ", expected " << d << "x" << d;
        throw validation_error(os.str());
    }
    const double herm = (rho.entries - rho.entries.adjoint()).cwiseAbs().maxCoeff();
    if (herm > tol::hermitian) {
        std::ostringstream os;
        os << "matrix is not Hermitian: max entrywise deviation " << herm
           << " (tolerance " << tol::hermitian << ")";
        throw validation_error(os.str());
    }
    const Complex tr = rho.entries.trace();
    if (std::abs(tr - Complex{1.0, 0.0}) > tol::trace_one) {
        std::ostringstream os;
        os << "trace deviates from 1 by " << std::abs(tr - Complex{1.0, 0.0})
           << " (tolerance " << tol::trace_one << ")";
        throw validation_error(os.str());
    }
    Eigen::SelfAdjointEigenSolver<CMat> es(rho.entries, Eigen::EigenvaluesOnly);
    const double min_eig = es.eigenvalues().minCoeff();
    if (min_eig < tol::psd_floor) {
        std::ostringstream os;
        os << "matrix is not positive semidefinite: smallest eigenvalue "
           << min_eig << " (floor " << tol::psd_floor << ")";
        throw validation_error(os.str());
    }
}

DensityMatrix density_from_pure(const PureState& psi) {
    check_qubit_count_density(psi.n_qubits);
    DensityMatrix rho;
    rho.n_qubits = psi.n_qubits;
    rho.entries = psi.amplitudes * psi.amplitudes.adjoint();
    return rho;
}

PureState tensor_product(const PureState& a, const PureState& b) {
    const int n = a.n_qubits + b.n_qubits;
    check_qubit_count_pure(n);
    PureState out;
    out.n_qubits = n;
    out.amplitudes.resize(a.dim() * b.dim());
    // a's qubits come first (most significant), so the concatenated bit string
    // of (x, y) is x * 2^{n_b} + y.
    for (Eigen::Index x = 0; x < a.dim(); ++x)
        out.amplitudes.segment(x * b.dim(), b.dim()) = a.amplitudes(x) * b.amplitudes;
    return out;
}

DensityMatrix partial_trace(const DensityMatrix& rho, const QubitSubset& keep) {
    validate_subset(keep, rho.n_qubits);
    const int n = rho.n_qubits;
    const int s = keep.size();
    const QubitSubset traced = keep.complement(n);
    const int t = traced.size();

    // Bit shifts of kept/traced qubits in the full index, MSB-first.
    std::vector<int> kshift, tshift;
    for (int q : keep.indices) kshift.push_back(n - q);
    for (int q : traced.indices) tshift.push_back(n - q);

    const std::int64_t dk = dim_for(s);
    const std::int64_t dt = std::int64_t{1} << t;

    auto scatter = [](std::int64_t v, const std::vector<int>& shifts) {
        std::int64_t x = 0;
        const int len = static_cast<int>(shifts.size());
        for (int j = 0; j < len; ++j)
            if (v & (std::int64_t{1} << (len - 1 - j))) x |= std::int64_t{1} << shifts[j];
        return x;
    };

    std::vector<std::int64_t> kscat(dk), tscat(dt);
    for (std::int64_t r = 0; r < dk; ++r) kscat[r] = scatter(r, kshift);
    for (std::int64_t e = 0; e < dt; ++e) tscat[e] = scatter(e, tshift);

    DensityMatrix out;
    out.n_qubits = s;
    out.entries = CMat::Zero(dk, dk);
    for (std::int64_t r = 0; r < dk; ++r)
        for (std::int64_t c = 0; c < dk; ++c) {
            Complex acc{0.0, 0.0};
            for (std::int64_t e = 0; e < dt; ++e)
                acc += rho.entries(kscat[r] | tscat[e], kscat[c] | tscat[e]);
            out.entries(r, c) = acc;
        }
    return out;
}

double purity(const DensityMatrix& rho) { return rho.entries.squaredNorm(); }

namespace {

// Reshape psi into M(row = block bits, col = complement bits), compacting
// bits in their original MSB-first order on both sides.
CMat reshape_by_block(const PureState& psi, std::uint32_t block_mask) {
    const int n = psi.n_qubits;
    const std::int64_t d = dim_for(n);
    const std::uint32_t full = static_cast<std::uint32_t>(d - 1);
    const std::uint32_t comp_mask = full & ~block_mask;
    const int s = std::popcount(block_mask);
    const int t = n - s;
    CMat m(dim_for(s), std::int64_t{1} << t);
    for (std::int64_t x = 0; x < d; ++x) {
        std::int64_t r = 0, c = 0;
        for (int pos = n - 1; pos >= 0; --pos) {
            const std::uint32_t bit = std::uint32_t{1} << pos;
            if (block_mask & bit) {
                r = (r << 1) | ((x >> pos) & 1);
            } else if (comp_mask & bit) {
                c = (c << 1) | ((x >> pos) & 1);
            }
        }
        m(r, c) = psi.amplitudes(x);
    }
    return m;
}

}  // namespace

double reduced_purity(const PureState& psi, std::uint32_t block_mask) {
    return 1.0 - reduced_impurity(psi, block_mask);
}

double reduced_impurity(const PureState& psi, std::uint32_t block_mask) {
    const CMat m = reshape_by_block(psi, block_mask);

    // Fast route: Tr(rho_A^2) is the squared Frobenius norm of the Gram
    // matrix on the smaller side.
    double gram_purity;
    if (m.rows() <= m.cols()) {
        gram_purity = CMat(m * m.adjoint()).squaredNorm();
    } else {
        gram_purity = CMat(m.adjoint() * m).squaredNorm();
    }
    const double norm2 = m.squaredNorm();
    const double fast = 1.0 - gram_purity / (norm2 * norm2);
    if (fast > 1e-8) return fast;

    // Near-zero impurity: singular values carry absolute error ~eps, so the
    // cross-term sum resolves values down to ~eps^2.
    Eigen::JacobiSVD<CMat> svd(m.rows() >= m.cols() ? m : CMat(m.adjoint()));
    const auto& sv = svd.singularValues();
    double total = 0.0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) total += sv(i) * sv(i);
    double cross = 0.0;
    double suffix = 0.0;
    for (Eigen::Index i = sv.size() - 1; i >= 0; --i) {
        const double li = sv(i) * sv(i);
        cross += li * suffix;
        suffix += li;
    }
    return std::max(0.0, 2.0 * cross / (total * total));
}

namespace {

void check_permutation(const std::vector<int>& perm, int n) {
    if (static_cast<int>(perm.size()) != n)
        throw validation_error("malformed permutation: wrong length");
    std::vector<char> seen(n + 1, 0);
    for (int v : perm) {
        if (v < 1 || v > n || seen[v])
            throw validation_error("malformed permutation: not a bijection of 1..N");
        seen[v] = 1;
    }
}

std::vector<std::int64_t> permutation_index_map(const std::vector<int>& perm, int n) {
    const std::int64_t d = dim_for(n);
    std::vector<std::int64_t> map(d);
    for (std::int64_t x = 0; x < d; ++x) {
        std::int64_t y = 0;
        for (int j = 1; j <= n; ++j) {
            const std::int64_t bit = (x >> (n - j)) & 1;
            y |= bit << (n - perm[j - 1]);
        }
        map[x] = y;
    }
    return map;
}

}  // namespace

PureState permute_qubits(const PureState& psi, const std::vector<int>& perm) {
    check_permutation(perm, psi.n_qubits);
    const auto map = permutation_index_map(perm, psi.n_qubits);
    PureState out;
    out.n_qubits = psi.n_qubits;
    out.amplitudes.resize(psi.dim());
    for (Eigen::Index x = 0; x < psi.dim(); ++x) out.amplitudes(map[x]) = psi.amplitudes(x);
    return out;
}

DensityMatrix permute_qubits(const DensityMatrix& rho, const std::vector<int>& perm) {
    check_permutation(perm, rho.n_qubits);
    const auto map = permutation_index_map(perm, rho.n_qubits);
    DensityMatrix out;
    out.n_qubits = rho.n_qubits;
    out.entries.resize(rho.dim(), rho.dim());
    for (Eigen::Index i = 0; i < rho.dim(); ++i)
        for (Eigen::Index j = 0; j < rho.dim(); ++j)
            out.entries(map[i], map[j]) = rho.entries(i, j);
    return out;
}

PureState apply_single_qubit(const PureState& psi, int qubit, const CMat& u) {
    if (qubit < 1 || qubit > psi.n_qubits)
        throw validation_error("qubit index out of range");
    if (u.rows() != 2 || u.cols() != 2)
        throw validation_error("single-qubit unitary must be 2x2");
    const std::int64_t mask = std::int64_t{1} << (psi.n_qubits - qubit);
    PureState out = psi;
    for (std::int64_t x = 0; x < psi.dim(); ++x) {
        if (x & mask) continue;
        const Complex a0 = psi.amplitudes(x);
        const Complex a1 = psi.amplitudes(x | mask);
        out.amplitudes(x) = u(0, 0) * a0 + u(0, 1) * a1;
        out.amplitudes(x | mask) = u(1, 0) * a0 + u(1, 1) * a1;
    }
    return out;
}

DensityMatrix apply_single_qubit(const DensityMatrix& rho, int qubit, const CMat& u) {
    if (qubit < 1 || qubit > rho.n_qubits)
        throw validation_error("qubit index out of range");
    if (u.rows() != 2 || u.cols() != 2)
        throw validation_error("single-qubit unitary must be 2x2");
    const std::int64_t mask = std::int64_t{1} << (rho.n_qubits - qubit);
    DensityMatrix out = rho;
    // rows: A <- u A
    for (std::int64_t x = 0; x < rho.dim(); ++x) {
        if (x & mask) continue;
        const CVec r0 = out.entries.row(x);
        const CVec r1 = out.entries.row(x | mask);
        out.entries.row(x) = u(0, 0) * r0 + u(0, 1) * r1;
        out.entries.row(x | mask) = u(1, 0) * r0 + u(1, 1) * r1;
    }
    // cols: A <- A u^dag
    for (std::int64_t x = 0; x < rho.dim(); ++x) {
        if (x & mask) continue;
        const CVec c0 = out.entries.col(x);
        const CVec c1 = out.entries.col(x | mask);
        out.entries.col(x) = std::conj(u(0, 0)) * c0 + std::conj(u(0, 1)) * c1;
        out.entries.col(x | mask) = std::conj(u(1, 0)) * c0 + std::conj(u(1, 1)) * c1;
    }
    return out;
}

}  // namespace kpe
