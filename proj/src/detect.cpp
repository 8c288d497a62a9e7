#include "kpe/detect.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <sstream>

#include <json.hpp>

namespace kpe {

namespace {

double clamped_real(Complex z) { return std::max(0.0, z.real()); }

void check_accessor(const ElementAccessor& acc) {
    if (acc.n_qubits < 2) throw validation_error("detector needs at least two qubits");
    if (!acc.element) throw validation_error("element accessor is empty");
}

// Hermitian spot check on a few index pairs.
void spot_check_hermitian(const ElementAccessor& acc) {
    const std::uint64_t d = std::uint64_t{1} << acc.n_qubits;
    const std::uint64_t pairs[][2] = {{1, d}, {2, 3}, {2, d - 1}, {d / 2, d / 2 + 1}};
    for (const auto& p : pairs) {
        const Complex upper = acc.element(p[0], p[1]);
        const Complex lower = acc.element(p[1], p[0]);
        if (std::abs(upper - std::conj(lower)) > 1e-10)
            throw validation_error("element accessor is not Hermitian at a spot-checked pair");
    }
}

}  // namespace

ElementAccessor dense_accessor(const DensityMatrix& rho) {
    auto shared = std::make_shared<CMat>(rho.entries);
    ElementAccessor acc;
    acc.n_qubits = rho.n_qubits;
    acc.element = [shared](std::uint64_t i, std::uint64_t j) {
        return (*shared)(static_cast<Eigen::Index>(i - 1), static_cast<Eigen::Index>(j - 1));
    };
    return acc;
}

Functionals functionals(const ElementAccessor& acc) {
    check_accessor(acc);
    const int n = acc.n_qubits;
    const std::uint64_t d = std::uint64_t{1} << n;
    Functionals f;

    f.a = std::abs(acc.element(1, d));
    for (std::uint64_t i = 2; i <= d - 1; ++i) {
        const double di = clamped_real(acc.element(i, i));
        const double dj = clamped_real(acc.element(d - i + 1, d - i + 1));
        f.b += std::sqrt(di * dj);
    }
    const double rho11 = clamped_real(acc.element(1, 1));
    for (int i = 0; i < n; ++i) {
        const std::uint64_t exc_i = (std::uint64_t{1} << i) + 1;
        f.e += std::abs(acc.element(exc_i, exc_i));
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            const std::uint64_t exc_j = (std::uint64_t{1} << j) + 1;
            f.c += std::abs(acc.element(exc_i, exc_j));
            const std::uint64_t dbl = (std::uint64_t{1} << i) + (std::uint64_t{1} << j) + 1;
            f.d += std::sqrt(rho11 * clamped_real(acc.element(dbl, dbl)));
        }
    }
    return f;
}

int min_block_count(int n, int k) { return (n + k - 1) / k; }

double criterion_ghz(const Functionals& f, int n, int k) {
    const int r = min_block_count(n, k);
    return (std::pow(2.0, r) - 2.0) * f.a - f.b;
}

double criterion_ghz(const ElementAccessor& acc, int k) {
    return criterion_ghz(functionals(acc), acc.n_qubits, k);
}

double criterion_w(const Functionals& f, int k) { return f.c - f.d - (k - 1) * f.e; }

double criterion_w(const ElementAccessor& acc, int k) {
    return criterion_w(functionals(acc), k);
}

double degree_dk(const Functionals& f) {
    if (f.a <= 0.0) return std::numeric_limits<double>::infinity();
    return std::log2(f.b / f.a + 2.0);
}

double degree_dk(const ElementAccessor& acc) { return degree_dk(functionals(acc)); }

std::optional<double> degree_dtilde(const Functionals& f) {
    if (f.e <= 0.0) return std::nullopt;
    return (f.c - f.d) / f.e + 1.0;
}

std::optional<double> degree_dtilde(const ElementAccessor& acc) {
    return degree_dtilde(functionals(acc));
}

DetectionReport detect_report(const ElementAccessor& acc, const std::vector<int>& ks) {
    check_accessor(acc);
    spot_check_hermitian(acc);
    const int n = acc.n_qubits;
    for (int k : ks) {
        if (k < 1 || k > n - 1) {
            std::ostringstream os;
            os << "k = " << k << " out of range 1..N-1 = " << (n - 1);
            throw std::invalid_argument(os.str());
        }
    }

    DetectionReport report;
    report.n_qubits = n;
    report.f = functionals(acc);
    report.dk = degree_dk(report.f);
    report.dtilde = degree_dtilde(report.f);

    std::vector<int> sorted = ks;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    for (int k : sorted) {
        KVerdict v;
        v.k = k;
        v.r_used = min_block_count(n, k);
        v.margin_ghz = criterion_ghz(report.f, n, k);
        v.margin_w = criterion_w(report.f, k);
        v.via_dk = report.dk < static_cast<double>(v.r_used);
        v.via_dtilde = report.dtilde.has_value() && *report.dtilde > static_cast<double>(k);
        v.via_margin_ghz = v.margin_ghz > 0.0;
        v.via_margin_w = v.margin_w > 0.0;
        v.detected = v.via_dk || v.via_dtilde || v.via_margin_ghz || v.via_margin_w;
        report.per_k.push_back(v);
    }
    return report;
}

std::string report_to_json_string(const DetectionReport& report, bool include_tolerances) {
    nlohmann::json j;
    j["n_qubits"] = report.n_qubits;
    j["functionals"] = {{"A", report.f.a}, {"B", report.f.b}, {"C", report.f.c},
                        {"D", report.f.d}, {"E", report.f.e}};
    if (std::isinf(report.dk)) {
        j["dk"] = nullptr;
        j["dk_infinite"] = true;
    } else {
        j["dk"] = report.dk;
        j["dk_infinite"] = false;
    }
    if (report.dtilde) {
        j["dtilde"] = *report.dtilde;
        j["dtilde_defined"] = true;
    } else {
        j["dtilde"] = nullptr;
        j["dtilde_defined"] = false;
    }
    nlohmann::json verdicts = nlohmann::json::object();
    nlohmann::json margins = nlohmann::json::object();
    nlohmann::json r_used = nlohmann::json::object();
    for (const auto& v : report.per_k) {
        const std::string key = std::to_string(v.k);
        verdicts[key] = {{"via_dk", v.via_dk},
                         {"via_dtilde", v.via_dtilde},
                         {"via_criterion_ghz", v.via_margin_ghz},
                         {"via_criterion_w", v.via_margin_w},
                         {"detected_k_plus_1_partite_entanglement", v.detected}};
        margins[key] = {{"ghz", v.margin_ghz}, {"w", v.margin_w}};
        r_used[key] = v.r_used;
    }
    j["verdicts"] = verdicts;
    j["margins"] = margins;
    j["r_used"] = r_used;
    j["pi_part_input"] = report.pi_part_input;
    if (report.pi_part_input) j["pi_note"] = report.pi_note;
    if (include_tolerances) {
        j["tolerances"] = {{"hermitian", tol::hermitian},
                           {"trace_one", tol::trace_one},
                           {"psd_floor", tol::psd_floor},
                           {"pure_norm", tol::pure_norm}};
    }
    return j.dump(2);
}

namespace {

std::string fmt12(double x) {
    if (std::isinf(x)) return "inf";
    if (std::isnan(x)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return buf;
}

}  // namespace

std::string sweep_csv_header() {
    return "N,k,p,A,B,C,D,E,dk,dtilde,verdict_dk,verdict_dtilde";
}

std::string sweep_csv_row(int n, int k, double p, const DetectionReport& report) {
    const KVerdict* v = nullptr;
    for (const auto& kv : report.per_k)
        if (kv.k == k) v = &kv;
    if (!v) throw std::invalid_argument("requested k is not part of the report");
    std::ostringstream os;
    os << n << ',' << k << ',' << fmt12(p) << ',' << fmt12(report.f.a) << ','
       << fmt12(report.f.b) << ',' << fmt12(report.f.c) << ',' << fmt12(report.f.d)
       << ',' << fmt12(report.f.e) << ',' << fmt12(report.dk) << ','
       << (report.dtilde ? fmt12(*report.dtilde) : "nan") << ',' << (v->via_dk ? 1 : 0)
       << ',' << (v->via_dtilde ? 1 : 0);
    return os.str();
}

}  // namespace kpe
