#include "kpe/families.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace kpe {

Family family_from_string(const std::string& name) {
    if (name == "ghz") return Family::ghz;
    if (name == "w") return Family::w;
    if (name == "dicke") return Family::dicke;
    if (name == "product") return Family::product;
    throw validation_error("unknown family '" + name + "' (expected ghz, w, dicke, product)");
}

std::string to_string(Family f) {
    switch (f) {
        case Family::ghz: return "ghz";
        case Family::w: return "w";
        case Family::dicke: return "dicke";
        case Family::product: return "product";
    }
    return "?";
}

void validate_spec(const FamilySpec& spec) {
    if (spec.n_qubits < 2) throw validation_error("family states need N >= 2");
    if (spec.noise_p < 0.0 || spec.noise_p > 1.0)
        throw validation_error("noise parameter must lie in [0, 1]");
    if (spec.family == Family::dicke &&
        (spec.excitations < 0 || spec.excitations > spec.n_qubits))
        throw validation_error("dicke excitation count out of range");
    if (spec.family == Family::product) {
        if (static_cast<int>(spec.bitstring.size()) != spec.n_qubits)
            throw validation_error("product bitstring length must equal N");
        for (char c : spec.bitstring)
            if (c != '0' && c != '1')
                throw validation_error("product bitstring must be over {0,1}");
    }
}

PureState ghz_state(int n) {
    PureState s;
    s.n_qubits = n;
    s.amplitudes = CVec::Zero(std::int64_t{1} << n);
    const double a = 1.0 / std::sqrt(2.0);
    s.amplitudes(0) = a;
    s.amplitudes(s.dim() - 1) = a;
    return s;
}

PureState w_state(int n) {
    PureState s;
    s.n_qubits = n;
    s.amplitudes = CVec::Zero(std::int64_t{1} << n);
    const double a = 1.0 / std::sqrt(static_cast<double>(n));
    for (int q = 0; q < n; ++q) s.amplitudes(std::int64_t{1} << q) = a;
    return s;
}

PureState dicke_state(int n, int excitations) {
    PureState s;
    s.n_qubits = n;
    const std::int64_t d = std::int64_t{1} << n;
    s.amplitudes = CVec::Zero(d);
    std::int64_t count = 0;
    for (std::int64_t x = 0; x < d; ++x)
        if (std::popcount(static_cast<std::uint64_t>(x)) == excitations) ++count;
    const double a = 1.0 / std::sqrt(static_cast<double>(count));
    for (std::int64_t x = 0; x < d; ++x)
        if (std::popcount(static_cast<std::uint64_t>(x)) == excitations)
            s.amplitudes(x) = a;
    return s;
}

PureState product_basis_state(const std::string& bits) {
    PureState s;
    s.n_qubits = static_cast<int>(bits.size());
    s.amplitudes = CVec::Zero(std::int64_t{1} << s.n_qubits);
    std::int64_t idx = 0;
    for (char c : bits) idx = (idx << 1) | (c == '1' ? 1 : 0);
    s.amplitudes(idx) = 1.0;
    return s;
}

PureState family_pure_state(const FamilySpec& spec) {
    validate_spec(spec);
    switch (spec.family) {
        case Family::ghz: return ghz_state(spec.n_qubits);
        case Family::w: return w_state(spec.n_qubits);
        case Family::dicke: return dicke_state(spec.n_qubits, spec.excitations);
        case Family::product: return product_basis_state(spec.bitstring);
    }
    throw std::logic_error("unreachable");
}

DensityMatrix make_state(const FamilySpec& spec) {
    validate_spec(spec);
    const int n = spec.n_qubits;
    if (n > dense_density_cap) {
        std::ostringstream os;
        os << "dense family state for " << n << " qubits exceeds the cap of "
           << dense_density_cap << "; use element_oracle instead";
        throw cap_error(os.str());
    }
    const PureState psi = family_pure_state(spec);
    const double w_pure = spec.pure_weight();
    const double w_noise = 1.0 - w_pure;
    DensityMatrix rho;
    rho.n_qubits = n;
    rho.entries = w_pure * (psi.amplitudes * psi.amplitudes.adjoint());
    const double diag = w_noise / static_cast<double>(std::int64_t{1} << n);
    for (Eigen::Index i = 0; i < rho.dim(); ++i) rho.entries(i, i) += diag;
    return rho;
}

ElementAccessor element_oracle(const FamilySpec& spec) {
    validate_spec(spec);
    const int n = spec.n_qubits;
    if (n > oracle_cap) {
        std::ostringstream os;
        os << "element oracle index arithmetic is guarded at N <= " << oracle_cap;
        throw cap_error(os.str());
    }
    const std::uint64_t d = std::uint64_t{1} << n;
    const double w_pure = spec.pure_weight();
    const double noise_diag = (1.0 - w_pure) / static_cast<double>(d);

    auto guard = [d](std::uint64_t i, std::uint64_t j) {
        if (i < 1 || i > d || j < 1 || j > d)
            throw std::out_of_range("element index outside 1..2^N");
    };

    ElementAccessor acc;
    acc.n_qubits = n;
    switch (spec.family) {
        case Family::ghz:
            acc.element = [d, w_pure, noise_diag, guard](std::uint64_t i, std::uint64_t j) {
                guard(i, j);
                double val = 0.0;
                const bool corner_i = (i == 1 || i == d);
                const bool corner_j = (j == 1 || j == d);
                if (corner_i && corner_j) val += w_pure * 0.5;
                if (i == j) val += noise_diag;
                return Complex{val, 0.0};
            };
            break;
        case Family::w:
        case Family::dicke: {
            const int exc = spec.family == Family::w ? 1 : spec.excitations;
            std::uint64_t population = 0;
            for (std::uint64_t x = 0; x < d; ++x)
                if (std::popcount(x) == exc) ++population;
            const double amp2 = w_pure / static_cast<double>(population);
            acc.element = [exc, amp2, noise_diag, guard](std::uint64_t i, std::uint64_t j) {
                guard(i, j);
                double val = 0.0;
                if (std::popcount(i - 1) == exc && std::popcount(j - 1) == exc)
                    val += amp2;
                if (i == j) val += noise_diag;
                return Complex{val, 0.0};
            };
            break;
        }
        case Family::product: {
            std::uint64_t idx = 0;
            for (char c : spec.bitstring) idx = (idx << 1) | (c == '1' ? 1 : 0);
            ++idx;  // 1-based
            acc.element = [idx, w_pure, noise_diag, guard](std::uint64_t i, std::uint64_t j) {
                guard(i, j);
                double val = 0.0;
                if (i == idx && j == idx) val += w_pure;
                if (i == j) val += noise_diag;
                return Complex{val, 0.0};
            };
            break;
        }
    }
    return acc;
}

double closed_form_dk_ghz(int n, double p) {
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("p must lie in [0, 1]");
    if (p == 0.0) return std::numeric_limits<double>::infinity();
    const double num = std::pow(2.0, n - 1) + p - 1.0;
    const double den = std::pow(2.0, n - 2) * p;
    return std::log2(num / den);
}

double closed_form_dtilde_w(int n, double p) {
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("p must lie in [0, 1]");
    const double pw = std::pow(2.0, n);
    const double num = n * pw - (n * pw + n * n - 2.0 * n) * p;
    const double den = pw - (pw - n) * p;
    return num / den;
}

ThresholdResult detection_threshold(Family family, int n, int k) {
    if (n < 2) throw std::invalid_argument("threshold needs N >= 2");
    if (k < 1 || k > n - 1) throw std::invalid_argument("k out of range 1..N-1");
    ThresholdResult out;
    if (family == Family::ghz) {
        // Solve log2((2^{N-1} - 1 + p) / (2^{N-2} p)) = ceil(N/k); the rule
        // fires for p above the boundary.
        const int r = min_block_count(n, k);
        const double boundary = (std::pow(2.0, n - 1) - 1.0) /
                                (std::pow(2.0, n - 2 + r) - 1.0);
        if (boundary >= 1.0) {
            out.kind = ThresholdKind::never_detects;
            out.p = 1.0;
        } else if (boundary <= 0.0) {
            out.kind = ThresholdKind::always_detects;
            out.p = 0.0;
        } else {
            out.kind = ThresholdKind::boundary;
            out.p = boundary;
        }
        return out;
    }
    if (family == Family::w) {
        // Solve (c - d)/e + 1 = k on the W mixture; the rule fires for p
        // below the boundary.
        const double pw = std::pow(2.0, n);
        const double boundary = pw * (n - k) /
                                (n * pw + n * n - 2.0 * n - k * (pw - n));
        if (boundary <= 0.0) {
            out.kind = ThresholdKind::never_detects;
            out.p = 0.0;
        } else if (boundary >= 1.0) {
            out.kind = ThresholdKind::always_detects;
            out.p = 1.0;
        } else {
            out.kind = ThresholdKind::boundary;
            out.p = boundary;
        }
        return out;
    }
    throw std::invalid_argument("thresholds are defined for the ghz and w families");
}

PureState haar_random_pure(int n, Rng& rng) {
    PureState s;
    s.n_qubits = n;
    s.amplitudes.resize(std::int64_t{1} << n);
    for (Eigen::Index i = 0; i < s.dim(); ++i) s.amplitudes(i) = rng.cgaussian();
    s.amplitudes /= s.amplitudes.norm();
    return s;
}

CMat haar_unitary(int dim, Rng& rng) {
    CMat g(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) g(i, j) = rng.cgaussian();
    Eigen::HouseholderQR<CMat> qr(g);
    CMat q = qr.householderQ() * CMat::Identity(dim, dim);
    CMat r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < dim; ++j) {
        const Complex d = r(j, j);
        const double mag = std::abs(d);
        if (mag > 1e-300) q.col(j) *= d / mag;
    }
    return q;
}

DensityMatrix ginibre_density(int n, int rank, Rng& rng) {
    const std::int64_t d = std::int64_t{1} << n;
    if (rank < 1 || rank > d) throw std::invalid_argument("rank out of range");
    CMat g(d, rank);
    for (Eigen::Index i = 0; i < d; ++i)
        for (int j = 0; j < rank; ++j) g(i, j) = rng.cgaussian();
    DensityMatrix rho;
    rho.n_qubits = n;
    rho.entries = g * g.adjoint();
    rho.entries /= rho.entries.trace().real();
    return rho;
}

PureState random_k_producible_pure(int n, int k, Rng& rng) {
    if (k < 1 || k > n) throw std::invalid_argument("k out of range");
    // Random block sizes <= k over a random shuffle of the labels.
    std::vector<int> labels(n);
    std::iota(labels.begin(), labels.end(), 1);
    for (int i = n - 1; i > 0; --i) {
        const int j = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(i + 1));
        std::swap(labels[i], labels[j]);
    }
    std::vector<int> sizes;
    int remaining = n;
    while (remaining > 0) {
        const int cap = std::min(k, remaining);
        const int s = 1 + static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(cap));
        sizes.push_back(s);
        remaining -= s;
    }
    PureState assembled;
    bool first = true;
    for (int s : sizes) {
        PureState block = haar_random_pure(s, rng);
        assembled = first ? block : tensor_product(assembled, block);
        first = false;
    }
    // Position j of the assembled state carries the label labels[j-1].
    std::vector<int> perm(labels.begin(), labels.end());
    return permute_qubits(assembled, perm);
}

DensityMatrix random_k_producible_density(int n, int k, int terms, Rng& rng) {
    if (terms < 1) throw std::invalid_argument("need at least one mixture term");
    std::vector<double> w(terms);
    double sum = 0.0;
    for (double& x : w) {
        x = rng.uniform() + 1e-3;
        sum += x;
    }
    DensityMatrix rho;
    rho.n_qubits = n;
    rho.entries = CMat::Zero(std::int64_t{1} << n, std::int64_t{1} << n);
    for (int t = 0; t < terms; ++t) {
        const PureState psi = random_k_producible_pure(n, k, rng);
        rho.entries += (w[t] / sum) * (psi.amplitudes * psi.amplitudes.adjoint());
    }
    return rho;
}

}  // namespace kpe
