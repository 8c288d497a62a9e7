#include "kpe/convexroof.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "kpe/neldermead.hpp"
#include "kpe/rng.hpp"

namespace kpe {

const char* to_string(EstimateStatus s) {
    switch (s) {
        case EstimateStatus::exact: return "exact";
        case EstimateStatus::upper_bound: return "upper_bound";
        case EstimateStatus::heuristic_lower_bound: return "heuristic_lower_bound";
    }
    return "unknown";
}

void validate_decomposition(const Decomposition& dec, const DensityMatrix& target) {
    if (dec.weights.size() != dec.states.size())
        throw validation_error("decomposition weight/state count mismatch");
    if (dec.weights.empty()) throw validation_error("decomposition is empty");
    double sum = 0.0;
    for (double w : dec.weights) {
        if (w < -1e-12) throw validation_error("decomposition has a negative weight");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-10)
        throw validation_error("decomposition weights do not sum to 1");
    CMat acc = CMat::Zero(target.dim(), target.dim());
    for (std::size_t i = 0; i < dec.states.size(); ++i) {
        if (dec.states[i].dim() != target.dim())
            throw validation_error("decomposition state dimension mismatch");
        acc += dec.weights[i] * (dec.states[i].amplitudes * dec.states[i].amplitudes.adjoint());
    }
    const double dev = (acc - target.entries).cwiseAbs().maxCoeff();
    if (dev > 1e-8) {
        std::ostringstream os;
        os << "decomposition does not reproduce the target state: max entry deviation "
           << dev;
        throw validation_error(os.str());
    }
}

namespace {

struct Spectral {
    int rank = 0;
    CMat phi;  // d x r, rho = phi phi^dag after weight renormalization
    std::vector<double> eigenvalues;
    double truncated_mass = 0.0;
};

Spectral spectral_factor(const DensityMatrix& rho) {
    Eigen::SelfAdjointEigenSolver<CMat> es(rho.entries);
    const auto& vals = es.eigenvalues();
    const auto& vecs = es.eigenvectors();
    std::vector<int> kept;
    double mass = 0.0;
    for (Eigen::Index i = vals.size() - 1; i >= 0; --i) {
        if (vals(i) >= tol::rank_eps) {
            kept.push_back(static_cast<int>(i));
            mass += vals(i);
        }
    }
    Spectral out;
    out.rank = static_cast<int>(kept.size());
    if (out.rank == 0) throw validation_error("state has no eigenvalue above the rank threshold");
    out.truncated_mass = std::max(0.0, 1.0 - mass);
    out.phi.resize(rho.dim(), out.rank);
    for (int c = 0; c < out.rank; ++c) {
        const double w = vals(kept[c]) / mass;  // renormalized weight
        out.eigenvalues.push_back(w);
        out.phi.col(c) = std::sqrt(w) * vecs.col(kept[c]);
    }
    return out;
}

// Canonical thin QR: orthonormal columns with the R diagonal rotated positive,
// so an input that is already an isometry maps to itself.
CMat canonical_isometry(const CMat& x) {
    const Eigen::Index rows = x.rows(), cols = x.cols();
    Eigen::HouseholderQR<CMat> qr(x);
    CMat q = qr.householderQ() * CMat::Identity(rows, cols);
    CMat r = qr.matrixQR().topLeftCorner(cols, cols).triangularView<Eigen::Upper>();
    for (Eigen::Index j = 0; j < cols; ++j) {
        const Complex d = r(j, j);
        const double mag = std::abs(d);
        if (mag > 1e-300) q.col(j) *= d / mag;
    }
    return q;
}

CMat params_to_matrix(const Eigen::VectorXd& theta, int ensemble, int rank) {
    CMat x(ensemble, rank);
    int p = 0;
    for (int i = 0; i < ensemble; ++i)
        for (int j = 0; j < rank; ++j) {
            x(i, j) = Complex(theta(p), theta(p + 1));
            p += 2;
        }
    return x;
}

Eigen::VectorXd matrix_to_params(const CMat& x) {
    Eigen::VectorXd theta(2 * x.rows() * x.cols());
    int p = 0;
    for (Eigen::Index i = 0; i < x.rows(); ++i)
        for (Eigen::Index j = 0; j < x.cols(); ++j) {
            theta(p) = x(i, j).real();
            theta(p + 1) = x(i, j).imag();
            p += 2;
        }
    return theta;
}

Decomposition ensemble_from_isometry(const CMat& v, const CMat& phi, int n_qubits) {
    // Unnormalized ensemble vectors are the columns of phi * v^T; every
    // fixed-length decomposition of rho arises from some isometry v.
    const CMat w = phi * v.transpose();
    Decomposition dec;
    for (Eigen::Index i = 0; i < w.cols(); ++i) {
        const double p = w.col(i).squaredNorm();
        if (p < 1e-14) continue;
        PureState s;
        s.n_qubits = n_qubits;
        s.amplitudes = w.col(i) / std::sqrt(p);
        dec.weights.push_back(p);
        dec.states.push_back(std::move(s));
    }
    return dec;
}

double ensemble_objective(const Decomposition& dec, int k) {
    double acc = 0.0;
    for (std::size_t i = 0; i < dec.states.size(); ++i)
        acc += dec.weights[i] * ek_pure(dec.states[i], k).value;
    return acc;
}

// Parameter start that reproduces a given decomposition: solve phi * v^T = w
// for v; for a valid ensemble v is an isometry, so the canonical QR map
// returns it unchanged.
CMat isometry_from_decomposition(const Decomposition& dec, const CMat& phi) {
    CMat w(phi.rows(), static_cast<Eigen::Index>(dec.states.size()));
    for (std::size_t i = 0; i < dec.states.size(); ++i)
        w.col(static_cast<Eigen::Index>(i)) =
            std::sqrt(dec.weights[i]) * dec.states[i].amplitudes;
    Eigen::CompleteOrthogonalDecomposition<CMat> cod(phi);
    CMat vt = cod.solve(w);  // r x L
    return vt.transpose();
}

}  // namespace

MeasureEstimate ek_mixed_upper(const DensityMatrix& rho, int k,
                               const ConvexRoofOptions& opts) {
    const int n = rho.n_qubits;
    if (n > dense_density_cap) {
        std::ostringstream os;
        os << "mixed-state estimation for " << n << " qubits exceeds the dense cap of "
           << dense_density_cap;
        throw cap_error(os.str());
    }
    if (k < 1 || k > n - 1) {
        std::ostringstream os;
        os << "k = " << k << " out of range 1..N-1 = " << (n - 1);
        throw std::invalid_argument(os.str());
    }

    const Spectral spec = spectral_factor(rho);
    MeasureEstimate est;
    est.seed = opts.seed;
    est.rank = spec.rank;
    if (spec.truncated_mass > 0.0) {
        std::ostringstream os;
        os << "dropped spectral mass " << spec.truncated_mass
           << " below the eigenvalue threshold " << tol::rank_eps << "; ";
        est.note += os.str();
    }

    if (spec.rank == 1) {
        PureState top;
        top.n_qubits = n;
        top.amplitudes = spec.phi.col(0) / spec.phi.col(0).norm();
        const PureMeasureResult pure = ek_pure(top, k);
        est.value = pure.value;
        est.status = EstimateStatus::exact;
        est.partition_witness = pure.argmin_partition;
        Decomposition dec;
        dec.weights = {1.0};
        dec.states = {top};
        est.decomposition_witness = std::move(dec);
        est.optimizer_trace = {pure.value};
        est.note += "rank-1 input, singleton decomposition forced";
        return est;
    }

    const int r = spec.rank;
    int ensemble = opts.ensemble_size > 0
                       ? opts.ensemble_size
                       : std::min(std::max(r * r, 2 * r), 24);
    if (opts.initial) ensemble = std::max<int>(ensemble, static_cast<int>(opts.initial->states.size()));
    if (ensemble < r) {
        std::ostringstream os;
        os << "ensemble length " << ensemble << " is infeasible for rank " << r
           << "; pass an ensemble size of at least the rank";
        throw std::invalid_argument(os.str());
    }

    const int dim = 2 * ensemble * r;
    auto objective = [&](const Eigen::VectorXd& theta) {
        const CMat v = canonical_isometry(params_to_matrix(theta, ensemble, r));
        return ensemble_objective(ensemble_from_isometry(v, spec.phi, n), k);
    };

    // Candidate starts: the seeded decomposition when given, then the
    // eigendecomposition embedding, then random isometries per restart.
    std::vector<Eigen::VectorXd> starts;
    if (opts.initial) {
        validate_decomposition(*opts.initial, rho);
        CMat v0 = isometry_from_decomposition(*opts.initial, spec.phi);
        if (v0.rows() < ensemble) {
            CMat padded = CMat::Zero(ensemble, r);
            padded.topRows(v0.rows()) = v0;
            v0 = padded;
        }
        starts.push_back(matrix_to_params(v0));
    }
    {
        CMat id = CMat::Zero(ensemble, r);
        for (int j = 0; j < r; ++j) id(j, j) = 1.0;
        starts.push_back(matrix_to_params(id));
    }

    double best = std::numeric_limits<double>::infinity();
    Eigen::VectorXd best_theta;
    const bool refine = dim <= opts.nm_dim_cap;
    if (!refine)
        est.note += "parameter count above the simplex cap, candidate starts only; ";

    const int total_restarts = std::max<int>(opts.restarts, static_cast<int>(starts.size()));
    for (int restart = 0; restart < total_restarts; ++restart) {
        Eigen::VectorXd theta0;
        if (restart < static_cast<int>(starts.size())) {
            theta0 = starts[restart];
        } else {
            Rng rng(Rng::derive(opts.seed, static_cast<std::uint64_t>(restart)));
            theta0.resize(dim);
            for (int i = 0; i < dim; ++i) theta0(i) = rng.gaussian();
        }
        double val = objective(theta0);
        Eigen::VectorXd xbest = theta0;
        if (refine && opts.max_iters > 0) {
            const auto nm = nelder_mead(objective, theta0, 0.25, opts.max_iters);
            if (nm.value < val) {
                val = nm.value;
                xbest = nm.x;
            }
        }
        est.optimizer_trace.push_back(val);
        if (val < best) {
            best = val;
            best_theta = xbest;
        }
    }

    est.value = best;
    est.status = EstimateStatus::upper_bound;
    const CMat v = canonical_isometry(params_to_matrix(best_theta, ensemble, r));
    est.decomposition_witness = ensemble_from_isometry(v, spec.phi, n);
    return est;
}

}  // namespace kpe
