#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "kpe/detect.hpp"
#include "kpe/families.hpp"
#include "kpe/io.hpp"
#include "test_helpers.hpp"

using namespace kpe;
namespace fs = std::filesystem;

namespace {

fs::path work_dir() {
    const fs::path dir = fs::temp_directory_path() / "kpe_cli_tests";
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

#ifdef KPE_CLI_PATH
int run_cli(const std::string& args) {
    const std::string cmd = std::string(KPE_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}
#endif

}  // namespace

TEST_CASE("state files round trip") {
    const auto dir = work_dir();

    const PureState w = w_state(3);
    write_state_file((dir / "w3.json").string(), w);
    const auto read_pure = read_state_file((dir / "w3.json").string());
    REQUIRE(std::holds_alternative<PureState>(read_pure));
    CHECK((std::get<PureState>(read_pure).amplitudes - w.amplitudes).norm() < 1e-14);

    FamilySpec spec;
    spec.family = Family::ghz;
    spec.n_qubits = 2;
    spec.noise_p = 0.5;
    const DensityMatrix rho = make_state(spec);
    write_state_file((dir / "ghz2.json").string(), rho);
    const auto read_rho = read_state_file((dir / "ghz2.json").string());
    REQUIRE(std::holds_alternative<DensityMatrix>(read_rho));
    CHECK(testutil::max_abs_diff(std::get<DensityMatrix>(read_rho).entries, rho.entries) <
          1e-14);
}

TEST_CASE("readers reject invalid files with descriptive errors") {
    const auto dir = work_dir();

    {
        std::ofstream out(dir / "bad_norm.json");
        out << R"({"n_qubits":1,"kind":"pure","data":[[0.5,0],[0.5,0]]})";
    }
    CHECK_THROWS_WITH_AS(read_state_file((dir / "bad_norm.json").string()),
                         doctest::Contains("not normalized"), validation_error);

    {
        std::ofstream out(dir / "bad_herm.json");
        out << R"({"n_qubits":1,"kind":"density","data":[[[0.5,0],[0.2,0]],[[0.0,0],[0.5,0]]]})";
    }
    CHECK_THROWS_WITH_AS(read_state_file((dir / "bad_herm.json").string()),
                         doctest::Contains("Hermitian"), validation_error);

    {
        std::ofstream out(dir / "bad_len.json");
        out << R"({"n_qubits":2,"kind":"pure","data":[[1,0],[0,0]]})";
    }
    CHECK_THROWS_AS(read_state_file((dir / "bad_len.json").string()), validation_error);

    {
        std::ofstream out(dir / "bad_kind.json");
        out << R"({"n_qubits":1,"kind":"ket","data":[[1,0],[0,0]]})";
    }
    CHECK_THROWS_AS(read_state_file((dir / "bad_kind.json").string()), validation_error);

    {
        std::ofstream out(dir / "bad_json.json");
        out << "not json at all";
    }
    CHECK_THROWS_AS(read_state_file((dir / "bad_json.json").string()), validation_error);

    CHECK_THROWS_AS(read_state_file((dir / "missing.json").string()), validation_error);
}

#ifdef KPE_CLI_PATH

TEST_CASE("cli: gen then detect equals in-memory detection") {
    const auto dir = work_dir();
    const auto state = dir / "ghz3_mix.json";
    const auto report = dir / "ghz3_report.json";
    REQUIRE(run_cli("gen --family ghz --n 3 --p 0.5 --output " + state.string()) == 0);
    REQUIRE(run_cli("detect --state " + state.string() + " --k 1 --k 2 --output " +
                    report.string()) == 0);

    FamilySpec spec;
    spec.family = Family::ghz;
    spec.n_qubits = 3;
    spec.noise_p = 0.5;
    const auto direct = detect_report(dense_accessor(make_state(spec)), {1, 2});

    const auto j = nlohmann::json::parse(slurp(report));
    CHECK(std::abs(j["functionals"]["A"].get<double>() - direct.f.a) < 1e-12);
    CHECK(std::abs(j["functionals"]["B"].get<double>() - direct.f.b) < 1e-12);
    CHECK(std::abs(j["dk"].get<double>() - direct.dk) < 1e-12);
    CHECK(j["verdicts"]["2"]["detected_k_plus_1_partite_entanglement"].get<bool>() ==
          direct.per_k[1].detected);
}

TEST_CASE("cli: measure reference values") {
    const auto dir = work_dir();
    const auto out = dir / "measure.json";

    REQUIRE(run_cli("measure --family ghz --n 3 --p 1 --k 2 --output " + out.string()) == 0);
    auto j = nlohmann::json::parse(slurp(out));
    CHECK(j["value"].get<double>() == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(j["status"] == "exact");

    REQUIRE(run_cli("measure --family w --n 3 --p 0 --k 1 --output " + out.string()) == 0);
    j = nlohmann::json::parse(slurp(out));
    CHECK(j["value"].get<double>() ==
          doctest::Approx(2.0 * std::sqrt(2.0) / 3.0).epsilon(1e-10));

    const auto product = dir / "product000.json";
    REQUIRE(run_cli("gen --family product --bitstring 000 --n 3 --pure --output " +
                    product.string()) == 0);
    REQUIRE(run_cli("measure --state " + product.string() + " --k 1 --output " +
                    out.string()) == 0);
    j = nlohmann::json::parse(slurp(out));
    CHECK(j["value"].get<double>() == doctest::Approx(0.0));
    CHECK(j["witness"]["partition"] == "{1}|{2}|{3}");
}

TEST_CASE("cli: detection verdicts across the reference thresholds") {
    const auto dir = work_dir();
    const auto out = dir / "detect.json";

    REQUIRE(run_cli("detect --family w --n 6 --p 0.5 --k 5 --output " + out.string()) == 0);
    auto j = nlohmann::json::parse(slurp(out));
    CHECK(j["verdicts"]["5"]["via_dtilde"].get<bool>());

    REQUIRE(run_cli("detect --family ghz --n 3 --p 0.1 --k 1 --output " + out.string()) == 0);
    j = nlohmann::json::parse(slurp(out));
    CHECK_FALSE(j["verdicts"]["1"]["detected_k_plus_1_partite_entanglement"].get<bool>());

    REQUIRE(run_cli("detect --family ghz --n 3 --p 0.3 --k 1 --output " + out.string()) == 0);
    j = nlohmann::json::parse(slurp(out));
    CHECK(j["verdicts"]["1"]["detected_k_plus_1_partite_entanglement"].get<bool>());

    // white noise from a state file: nothing fires
    const auto noise = dir / "whitenoise.json";
    REQUIRE(run_cli("gen --family ghz --n 3 --p 0 --output " + noise.string()) == 0);
    REQUIRE(run_cli("detect --state " + noise.string() + " --k 1 --k 2 --output " +
                    out.string()) == 0);
    j = nlohmann::json::parse(slurp(out));
    for (const auto& k : {"1", "2"})
        CHECK_FALSE(j["verdicts"][k]["detected_k_plus_1_partite_entanglement"].get<bool>());
}

TEST_CASE("cli: pi subcommand emits the averaged state and a labeled report") {
    const auto dir = work_dir();
    const auto in = dir / "prod001.json";
    const auto pi_state = dir / "prod001_pi.json";
    const auto report = dir / "prod001_pi_report.json";
    REQUIRE(run_cli("gen --family product --bitstring 001 --n 3 --pure --output " +
                    in.string()) == 0);
    REQUIRE(run_cli("pi --state " + in.string() + " --output " + pi_state.string() +
                    " --report " + report.string() + " --k 1") == 0);

    const auto state = read_state_file(pi_state.string());
    REQUIRE(std::holds_alternative<DensityMatrix>(state));
    const auto& rho = std::get<DensityMatrix>(state);
    CHECK(rho.entries(1, 1).real() == doctest::Approx(1.0 / 3.0));
    CHECK(rho.entries(2, 2).real() == doctest::Approx(1.0 / 3.0));
    CHECK(rho.entries(4, 4).real() == doctest::Approx(1.0 / 3.0));

    const auto j = nlohmann::json::parse(slurp(report));
    CHECK(j["pi_part_input"].get<bool>());
    CHECK_FALSE(j["verdicts"]["1"]["detected_k_plus_1_partite_entanglement"].get<bool>());
}

TEST_CASE("cli: sweeps are deterministic and ordered") {
    const auto dir = work_dir();
    const auto a = dir / "sweep_a.csv";
    const auto b = dir / "sweep_b.csv";
    const std::string args =
        "sweep --family w --n 6 --p-start 0 --p-stop 1 --p-step 0.25 --k 1 --k 5 --output ";
    REQUIRE(run_cli(args + a.string()) == 0);
    REQUIRE(run_cli(args + b.string()) == 0);
    const std::string text = slurp(a);
    CHECK(text == slurp(b));
    std::istringstream lines(text);
    std::string header;
    std::getline(lines, header);
    CHECK(header == sweep_csv_header());
    int rows = 0;
    std::string line;
    while (std::getline(lines, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 10);  // 5 grid points x 2 k values
}

TEST_CASE("cli: figure reproductions") {
    const auto dir = work_dir();
    const auto fig1 = dir / "fig1.csv";
    const auto fig2 = dir / "fig2.csv";
    REQUIRE(run_cli("repro --figure fig1 --output " + fig1.string()) == 0);
    REQUIRE(run_cli("repro --figure fig2 --output " + fig2.string()) == 0);

    // fig1 keeps the p=1 row with the N=3 curve at exactly 1
    bool saw_p1 = false;
    {
        std::istringstream lines(slurp(fig1));
        std::string line;
        std::getline(lines, line);
        CHECK(line == "p,Dk_N3,Dk_N4,Dk_N10");
        while (std::getline(lines, line)) {
            if (line.rfind("1,", 0) == 0) {
                saw_p1 = true;
                CHECK(line == "1,1,1,1");
            }
        }
    }
    CHECK(saw_p1);

    // fig2 starts at the noiseless point (value N) and drops the p=1 row
    {
        std::istringstream lines(slurp(fig2));
        std::string line;
        std::getline(lines, line);
        CHECK(line == "p,Dtilde_N6,Dtilde_N8,Dtilde_N12");
        bool saw_p0 = false, saw_p1_fig2 = false;
        while (std::getline(lines, line)) {
            if (line.rfind("0,", 0) == 0) {
                saw_p0 = true;
                CHECK(line == "0,6,8,12");
            }
            if (line.rfind("1,", 0) == 0) saw_p1_fig2 = true;
        }
        CHECK(saw_p0);
        CHECK_FALSE(saw_p1_fig2);
    }
}

TEST_CASE("cli: exit codes distinguish malformed input from cap violations") {
    const auto dir = work_dir();
    const auto bad = dir / "broken.json";
    {
        std::ofstream out(bad);
        out << R"({"n_qubits":1,"kind":"pure","data":[[0.4,0],[0.4,0]]})";
    }
    CHECK(run_cli("measure --state " + bad.string() + " --k 1") == 2);
    CHECK(run_cli("measure --family ghz --n 11 --p 0.5 --k 1") == 3);
    CHECK(run_cli("detect --family bogus --n 3 --k 1") == 2);
}

#endif  // KPE_CLI_PATH
