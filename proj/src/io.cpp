#include "kpe/io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace kpe {

namespace {

using nlohmann::json;

json complex_pair(const Complex& z) { return json::array({z.real(), z.imag()}); }

Complex parse_pair(const json& j, const char* what) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
        std::ostringstream os;
        os << what << " entries must be [re, im] pairs";
        throw validation_error(os.str());
    }
    return {j[0].get<double>(), j[1].get<double>()};
}

json load_document(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw validation_error("cannot open state file '" + path + "'");
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& e) {
        throw validation_error("state file '" + path + "' is not valid JSON: " + e.what());
    }
    return doc;
}

void store_document(const std::string& path, const json& doc) {
    std::ofstream out(path);
    if (!out) throw validation_error("cannot write state file '" + path + "'");
    out << doc.dump(2) << '\n';
}

}  // namespace

void write_state_file(const std::string& path, const PureState& psi) {
    validate_pure(psi);
    json data = json::array();
    for (Eigen::Index i = 0; i < psi.dim(); ++i)
        data.push_back(complex_pair(psi.amplitudes(i)));
    store_document(path, {{"n_qubits", psi.n_qubits}, {"kind", "pure"}, {"data", data}});
}

void write_state_file(const std::string& path, const DensityMatrix& rho) {
    validate_density(rho);
    json data = json::array();
    for (Eigen::Index i = 0; i < rho.dim(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < rho.dim(); ++j)
            row.push_back(complex_pair(rho.entries(i, j)));
        data.push_back(std::move(row));
    }
    store_document(path, {{"n_qubits", rho.n_qubits}, {"kind", "density"}, {"data", data}});
}

StateVariant read_state_file(const std::string& path) {
    const json doc = load_document(path);
    if (!doc.is_object() || !doc.contains("n_qubits") || !doc.contains("kind") ||
        !doc.contains("data"))
        throw validation_error("state file must carry n_qubits, kind and data fields");
    if (!doc["n_qubits"].is_number_integer())
        throw validation_error("n_qubits must be an integer");
    const int n = doc["n_qubits"].get<int>();
    if (n < 1) throw validation_error("n_qubits must be positive");
    const std::string kind = doc["kind"].get<std::string>();
    const auto& data = doc["data"];

    if (kind == "pure") {
        if (n > dense_pure_cap) {
            std::ostringstream os;
            os << "pure state with " << n << " qubits exceeds the dense cap of "
               << dense_pure_cap;
            throw cap_error(os.str());
        }
        const std::int64_t d = std::int64_t{1} << n;
        if (!data.is_array() || static_cast<std::int64_t>(data.size()) != d) {
            std::ostringstream os;
            os << "pure data must be a list of length 2^" << n << " = " << d;
            throw validation_error(os.str());
        }
        PureState psi;
        psi.n_qubits = n;
        psi.amplitudes.resize(d);
        for (std::int64_t i = 0; i < d; ++i)
            psi.amplitudes(i) = parse_pair(data[static_cast<std::size_t>(i)], "pure data");
        validate_pure(psi);
        return psi;
    }
    if (kind == "density") {
        if (n > dense_density_cap) {
            std::ostringstream os;
            os << "density matrix with " << n << " qubits exceeds the dense cap of "
               << dense_density_cap;
            throw cap_error(os.str());
        }
        const std::int64_t d = std::int64_t{1} << n;
        if (!data.is_array() || static_cast<std::int64_t>(data.size()) != d)
            throw validation_error("density data must have 2^N rows");
        DensityMatrix rho;
        rho.n_qubits = n;
        rho.entries.resize(d, d);
        for (std::int64_t i = 0; i < d; ++i) {
            const auto& row = data[static_cast<std::size_t>(i)];
            if (!row.is_array() || static_cast<std::int64_t>(row.size()) != d)
                throw validation_error("density data rows must have 2^N entries");
            for (std::int64_t j = 0; j < d; ++j)
                rho.entries(i, j) = parse_pair(row[static_cast<std::size_t>(j)], "density data");
        }
        validate_density(rho);
        return rho;
    }
    throw validation_error("kind must be 'pure' or 'density', got '" + kind + "'");
}

int state_qubits(const StateVariant& state) {
    if (std::holds_alternative<PureState>(state))
        return std::get<PureState>(state).n_qubits;
    return std::get<DensityMatrix>(state).n_qubits;
}

}  // namespace kpe
