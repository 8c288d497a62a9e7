#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "kpe/convexroof.hpp"
#include "kpe/detect.hpp"
#include "kpe/families.hpp"
#include "kpe/io.hpp"
#include "kpe/pisym.hpp"

namespace {

using nlohmann::json;

std::string fmt12(double x) {
    if (std::isinf(x)) return "inf";
    if (std::isnan(x)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return buf;
}

struct InputOptions {
    std::string state_path;
    std::string family_name;
    int n = 0;
    double p = -1.0;  // family default applied later
    int excitations = 1;
    std::string bitstring;

    bool from_file() const { return !state_path.empty(); }

    kpe::FamilySpec spec() const {
        kpe::FamilySpec s;
        s.family = kpe::family_from_string(family_name);
        s.n_qubits = n;
        s.noise_p = p >= 0.0 ? p : (s.family == kpe::Family::ghz ? 1.0 : 0.0);
        s.excitations = excitations;
        s.bitstring = bitstring;
        return s;
    }

    std::string describe() const {
        if (from_file()) return "file:" + state_path;
        std::string out = "family:" + family_name + " n=" + std::to_string(n);
        if (p >= 0.0) out += " p=" + fmt12(p);
        return out;
    }
};

void add_input_options(CLI::App* cmd, InputOptions& in, bool file_allowed = true) {
    if (file_allowed)
        cmd->add_option("--state", in.state_path, "state file (JSON) to analyze");
    cmd->add_option("--family", in.family_name, "family: ghz, w, dicke, product");
    cmd->add_option("--n", in.n, "number of qubits for a family state");
    cmd->add_option("--p", in.p,
                    "family noise parameter (ghz: weight of the GHZ term; "
                    "w/dicke/product: weight of the white-noise term)");
    cmd->add_option("--excitations", in.excitations, "dicke excitation count");
    cmd->add_option("--bitstring", in.bitstring, "product-state bit string");
}

void require_input(const InputOptions& in) {
    if (!in.from_file() && in.family_name.empty())
        throw kpe::validation_error("no input: pass --state or --family/--n");
    if (!in.from_file() && in.n < 2)
        throw kpe::validation_error("family input needs --n of at least 2");
}

kpe::DensityMatrix load_density(const InputOptions& in) {
    if (in.from_file()) {
        auto state = kpe::read_state_file(in.state_path);
        if (std::holds_alternative<kpe::PureState>(state))
            return kpe::density_from_pure(std::get<kpe::PureState>(state));
        return std::get<kpe::DensityMatrix>(state);
    }
    return kpe::make_state(in.spec());
}

void emit(const std::string& text, const std::string& output_path) {
    if (output_path.empty()) {
        std::cout << text << '\n';
        return;
    }
    std::ofstream out(output_path);
    if (!out) throw kpe::validation_error("cannot write output file '" + output_path + "'");
    out << text << '\n';
}

json decomposition_to_json(const kpe::Decomposition& dec) {
    json weights = json::array();
    json states = json::array();
    for (std::size_t i = 0; i < dec.weights.size(); ++i) {
        weights.push_back(dec.weights[i]);
        json amp = json::array();
        for (Eigen::Index a = 0; a < dec.states[i].dim(); ++a)
            amp.push_back({dec.states[i].amplitudes(a).real(),
                           dec.states[i].amplitudes(a).imag()});
        states.push_back(std::move(amp));
    }
    return {{"weights", weights}, {"states", states}};
}

json estimate_to_json(const kpe::MeasureEstimate& est, int k) {
    json j;
    j["k"] = k;
    j["value"] = est.value;
    j["status"] = kpe::to_string(est.status);
    j["rank"] = est.rank;
    j["seed"] = est.seed;
    j["optimizer_trace"] = est.optimizer_trace;
    if (!est.note.empty()) j["note"] = est.note;
    json witness = json::object();
    if (est.partition_witness) witness["partition"] = est.partition_witness->render();
    if (est.decomposition_witness)
        witness["decomposition"] = decomposition_to_json(*est.decomposition_witness);
    j["witness"] = witness;
    return j;
}

json tolerances_json() {
    return {{"hermitian", kpe::tol::hermitian},
            {"trace_one", kpe::tol::trace_one},
            {"psd_floor", kpe::tol::psd_floor},
            {"pure_norm", kpe::tol::pure_norm}};
}

int run_gen(const InputOptions& in, const std::string& output, bool as_pure) {
    if (in.family_name.empty())
        throw kpe::validation_error("gen needs --family and --n");
    if (output.empty()) throw kpe::validation_error("gen needs --output");
    const kpe::FamilySpec spec = in.spec();
    if (as_pure) {
        kpe::write_state_file(output, kpe::family_pure_state(spec));
    } else {
        kpe::write_state_file(output, kpe::make_state(spec));
    }
    std::cout << "wrote " << output << '\n';
    return 0;
}

int run_measure(const InputOptions& in, int k, const kpe::ConvexRoofOptions& opts,
                const std::string& output, bool tolerance_report) {
    require_input(in);
    json j;
    j["input"] = in.describe();
    if (tolerance_report) j["tolerances"] = tolerances_json();

    std::optional<kpe::PureState> pure;
    if (in.from_file()) {
        auto state = kpe::read_state_file(in.state_path);
        if (std::holds_alternative<kpe::PureState>(state))
            pure = std::get<kpe::PureState>(state);
    } else if (in.spec().pure_weight() >= 1.0) {
        pure = kpe::family_pure_state(in.spec());
    }

    if (pure) {
        const auto res = kpe::ek_pure(*pure, k);
        j["n_qubits"] = pure->n_qubits;
        j["k"] = k;
        j["value"] = res.value;
        j["status"] = "exact";
        j["witness"] = {{"partition", res.argmin_partition.render()}};
        j["per_block_concurrence"] = res.per_block_concurrence;
    } else {
        const kpe::DensityMatrix rho = load_density(in);
        const auto est = kpe::ek_mixed_upper(rho, k, opts);
        j["n_qubits"] = rho.n_qubits;
        j.update(estimate_to_json(est, k));
    }
    emit(j.dump(2), output);
    return 0;
}

kpe::DetectionReport build_report(const InputOptions& in, const std::vector<int>& ks,
                                  bool use_pi) {
    if (use_pi) {
        const kpe::DensityMatrix rho = load_density(in);
        const kpe::DensityMatrix pi = kpe::pi_part(rho);
        auto report = kpe::detect_report(kpe::dense_accessor(pi), ks);
        report.pi_part_input = true;
        report.pi_note =
            "PI-part verdict: a detection on the permutation-averaged state "
            "implies the same detection for the original state";
        return report;
    }
    if (!in.from_file() && in.n > kpe::dense_density_cap)
        return kpe::detect_report(kpe::element_oracle(in.spec()), ks);
    if (in.from_file())
        return kpe::detect_report(kpe::dense_accessor(load_density(in)), ks);
    return kpe::detect_report(kpe::element_oracle(in.spec()), ks);
}

int run_detect(const InputOptions& in, const std::vector<int>& ks, bool use_pi,
               const std::string& output, bool tolerance_report) {
    require_input(in);
    if (ks.empty()) throw kpe::validation_error("detect needs at least one --k");
    const auto report = build_report(in, ks, use_pi);
    emit(kpe::report_to_json_string(report, tolerance_report), output);
    return 0;
}

int run_pi(const InputOptions& in, const std::string& output,
           const std::string& report_path, const std::vector<int>& ks,
           bool tolerance_report) {
    require_input(in);
    if (output.empty()) throw kpe::validation_error("pi needs --output for the PI state file");
    const kpe::DensityMatrix rho = load_density(in);
    const kpe::DensityMatrix pi = kpe::pi_part(rho);
    kpe::write_state_file(output, pi);
    std::cout << "wrote " << output << '\n';
    if (!report_path.empty()) {
        if (ks.empty()) throw kpe::validation_error("pi --report needs at least one --k");
        auto report = kpe::detect_report(kpe::dense_accessor(pi), ks);
        report.pi_part_input = true;
        report.pi_note =
            "PI-part verdict: a detection on the permutation-averaged state "
            "implies the same detection for the original state";
        emit(kpe::report_to_json_string(report, tolerance_report), report_path);
    }
    return 0;
}

int run_sweep(const InputOptions& in, double p_start, double p_stop, double p_step,
              const std::vector<int>& ks, const std::string& output) {
    if (in.family_name.empty()) throw kpe::validation_error("sweep needs --family and --n");
    if (ks.empty()) throw kpe::validation_error("sweep needs at least one --k");
    if (p_step <= 0.0) throw kpe::validation_error("sweep needs --p-step > 0");
    if (p_stop < p_start) throw kpe::validation_error("sweep grid is empty");
    if (output.empty()) throw kpe::validation_error("sweep needs --output");

    std::vector<int> sorted = ks;
    std::sort(sorted.begin(), sorted.end());

    std::ostringstream csv;
    csv << kpe::sweep_csv_header() << '\n';
    const int steps = static_cast<int>(std::round((p_stop - p_start) / p_step));
    for (int i = 0; i <= steps; ++i) {
        const double p = p_start + i * p_step;
        if (p > 1.0 + 1e-12) break;
        kpe::FamilySpec spec = in.spec();
        spec.noise_p = std::min(p, 1.0);
        const auto report = kpe::detect_report(kpe::element_oracle(spec), sorted);
        for (int k : sorted)
            csv << kpe::sweep_csv_row(spec.n_qubits, k, spec.noise_p, report) << '\n';
    }
    std::ofstream out(output);
    if (!out) throw kpe::validation_error("cannot write output file '" + output + "'");
    out << csv.str();
    std::cout << "wrote " << output << '\n';
    return 0;
}

int run_repro(const std::string& figure, double step, const std::string& output) {
    if (output.empty()) throw kpe::validation_error("repro needs --output");
    if (step <= 0.0) throw kpe::validation_error("repro needs --step > 0");
    std::ostringstream csv;
    const int steps = static_cast<int>(std::round(1.0 / step));

    if (figure == "fig1") {
        // Degree of the GHZ/white-noise mixture; cells where the curve
        // reaches N are omitted, matching the published plot range.
        const std::vector<int> ns = {3, 4, 10};
        csv << "p";
        for (int n : ns) csv << ",Dk_N" << n;
        csv << '\n';
        for (int i = 0; i <= steps; ++i) {
            const double p = std::min(1.0, i * step);
            std::vector<std::string> cells;
            bool any = false;
            for (int n : ns) {
                kpe::FamilySpec spec;
                spec.family = kpe::Family::ghz;
                spec.n_qubits = n;
                spec.noise_p = p;
                const double dk = kpe::degree_dk(kpe::functionals(kpe::element_oracle(spec)));
                const double closed = kpe::closed_form_dk_ghz(n, p);
                if (std::isfinite(dk) != std::isfinite(closed) ||
                    (std::isfinite(dk) && std::abs(dk - closed) > 1e-9))
                    throw std::logic_error("detector path disagrees with the closed form");
                if (std::isfinite(dk) && dk < static_cast<double>(n)) {
                    cells.push_back(fmt12(dk));
                    any = true;
                } else {
                    cells.push_back("");
                }
            }
            if (!any) continue;
            csv << fmt12(p);
            for (const auto& c : cells) csv << ',' << c;
            csv << '\n';
        }
    } else if (figure == "fig2") {
        // Degree of the W/white-noise mixture; cells below 1 are not drawn.
        const std::vector<int> ns = {6, 8, 12};
        csv << "p";
        for (int n : ns) csv << ",Dtilde_N" << n;
        csv << '\n';
        for (int i = 0; i <= steps; ++i) {
            const double p = std::min(1.0, i * step);
            std::vector<std::string> cells;
            bool any = false;
            for (int n : ns) {
                kpe::FamilySpec spec;
                spec.family = kpe::Family::w;
                spec.n_qubits = n;
                spec.noise_p = p;
                const auto dt = kpe::degree_dtilde(kpe::functionals(kpe::element_oracle(spec)));
                const double closed = kpe::closed_form_dtilde_w(n, p);
                if (!dt || std::abs(*dt - closed) > 1e-9)
                    throw std::logic_error("detector path disagrees with the closed form");
                if (*dt >= 1.0) {
                    cells.push_back(fmt12(*dt));
                    any = true;
                } else {
                    cells.push_back("");
                }
            }
            if (!any) continue;
            csv << fmt12(p);
            for (const auto& c : cells) csv << ',' << c;
            csv << '\n';
        }
    } else {
        throw kpe::validation_error("repro figure must be fig1 or fig2");
    }

    std::ofstream out(output);
    if (!out) throw kpe::validation_error("cannot write output file '" + output + "'");
    out << csv.str();
    std::cout << "wrote " << output << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"(k+1)-partite entanglement toolkit: measures, bounds and detectors "
                 "for N-qubit states"};
    app.require_subcommand(1);

    // gen
    auto* gen = app.add_subcommand("gen", "generate a family state file");
    InputOptions gen_in;
    std::string gen_output;
    bool gen_pure = false;
    add_input_options(gen, gen_in, /*file_allowed=*/false);
    gen->add_option("--output", gen_output, "state file to write")->required();
    gen->add_flag("--pure", gen_pure, "write the pure family state instead of the mixture");

    // measure
    auto* measure = app.add_subcommand("measure", "entanglement measure of a state");
    InputOptions measure_in;
    int measure_k = 1;
    std::string measure_output;
    kpe::ConvexRoofOptions roof;
    bool measure_tol = false;
    add_input_options(measure, measure_in);
    measure->add_option("--k", measure_k, "producibility bound k (detects (k+1)-partite)")
        ->required();
    measure->add_option("--ensemble-size", roof.ensemble_size,
                        "decomposition length (0 = automatic)");
    measure->add_option("--restarts", roof.restarts, "optimizer restarts");
    measure->add_option("--max-iters", roof.max_iters, "simplex iterations per restart");
    measure->add_option("--seed", roof.seed, "optimizer seed");
    measure->add_option("--output", measure_output, "report file (default: stdout)");
    measure->add_flag("--tolerance-report", measure_tol, "include tolerances in the report");

    // detect
    auto* detect = app.add_subcommand("detect", "criteria and degree detection report");
    InputOptions detect_in;
    std::vector<int> detect_ks;
    bool detect_pi = false;
    std::string detect_output;
    bool detect_tol = false;
    add_input_options(detect, detect_in);
    detect->add_option("--k", detect_ks, "k values to test (repeatable)")->required();
    detect->add_flag("--pi", detect_pi, "detect on the PI part and label accordingly");
    detect->add_option("--output", detect_output, "report file (default: stdout)");
    detect->add_flag("--tolerance-report", detect_tol, "include tolerances in the report");

    // pi
    auto* pi = app.add_subcommand("pi", "permutation-average a state");
    InputOptions pi_in;
    std::string pi_output, pi_report;
    std::vector<int> pi_ks;
    bool pi_tol = false;
    add_input_options(pi, pi_in);
    pi->add_option("--output", pi_output, "PI state file to write")->required();
    pi->add_option("--report", pi_report, "also write a detection report here");
    pi->add_option("--k", pi_ks, "k values for the report");
    pi->add_flag("--tolerance-report", pi_tol, "include tolerances in the report");

    // sweep
    auto* sweep = app.add_subcommand("sweep", "CSV sweep of detectors over a noise grid");
    InputOptions sweep_in;
    double p_start = 0.0, p_stop = 1.0, p_step = 0.01;
    std::vector<int> sweep_ks;
    std::string sweep_output;
    add_input_options(sweep, sweep_in, /*file_allowed=*/false);
    sweep->add_option("--p-start", p_start, "grid start");
    sweep->add_option("--p-stop", p_stop, "grid stop");
    sweep->add_option("--p-step", p_step, "grid step");
    sweep->add_option("--k", sweep_ks, "k values (repeatable)")->required();
    sweep->add_option("--output", sweep_output, "CSV file to write")->required();

    // repro
    auto* repro = app.add_subcommand("repro", "reproduce the degree-curve figures as CSV");
    std::string repro_figure, repro_output;
    double repro_step = 0.01;
    repro->add_option("--figure", repro_figure, "fig1 or fig2")->required();
    repro->add_option("--output", repro_output, "CSV file to write")->required();
    repro->add_option("--step", repro_step, "p-grid step");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) return run_gen(gen_in, gen_output, gen_pure);
        if (measure->parsed())
            return run_measure(measure_in, measure_k, roof, measure_output, measure_tol);
        if (detect->parsed())
            return run_detect(detect_in, detect_ks, detect_pi, detect_output, detect_tol);
        if (pi->parsed()) return run_pi(pi_in, pi_output, pi_report, pi_ks, pi_tol);
        if (sweep->parsed())
            return run_sweep(sweep_in, p_start, p_stop, p_step, sweep_ks, sweep_output);
        if (repro->parsed()) return run_repro(repro_figure, repro_step, repro_output);
    } catch (const kpe::cap_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const kpe::validation_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
