#include "qtel/channel_io.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

namespace qtel {

using nlohmann::json;

std::string channel_to_json(const PureState& state, int bob_qubit) {
    if (bob_qubit < 1 || bob_qubit > state.n_qubits) throw ArgumentError("bob qubit outside register");
    json amps = json::array();
    for (Eigen::Index k = 0; k < state.dim(); ++k) {
        Complex c = state.amplitudes[k];
        if (c == Complex{0, 0}) continue;
        amps.push_back({{"basis_index", k}, {"re", c.real()}, {"im", c.imag()}});
    }
    json doc = {{"format", ChannelFile::kFormatTag},
                {"n_qubits", state.n_qubits},
                {"bob_qubit", bob_qubit},
                {"amplitudes", std::move(amps)}};
    return doc.dump(2) + "\n";
}

void write_channel_file(const std::string& path, const PureState& state, int bob_qubit) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot open '" + path + "' for writing");
    out << channel_to_json(state, bob_qubit);
    if (!out) throw FormatError("write to '" + path + "' failed");
}

ChannelFile channel_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw FormatError(std::string("channel file is not valid JSON: ") + e.what());
    }
    try {
        if (doc.at("format").get<std::string>() != ChannelFile::kFormatTag)
            throw FormatError("unsupported channel format tag");
        int n = doc.at("n_qubits").get<int>();
        int bob = doc.at("bob_qubit").get<int>();
        if (n < 1 || n > kMaxQubits) throw FormatError("n_qubits out of range");
        if (bob < 1 || bob > n) throw FormatError("bob_qubit outside register");

        Vec amps = Vec::Zero(Eigen::Index{1} << n);
        for (const auto& entry : doc.at("amplitudes")) {
            auto idx = entry.at("basis_index").get<std::int64_t>();
            if (idx < 0 || idx >= amps.size()) throw FormatError("basis_index out of range");
            amps[static_cast<Eigen::Index>(idx)] =
                Complex{entry.at("re").get<double>(), entry.at("im").get<double>()};
        }
        if (std::abs(amps.norm() - 1.0) > 1e-9)
            throw FormatError("channel amplitudes are not normalized within 1e-9");
        return ChannelFile{PureState::normalized(n, std::move(amps)), bob};
    } catch (const json::exception& e) {
        throw FormatError(std::string("malformed channel file: ") + e.what());
    }
}

ChannelFile read_channel_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open '" + path + "'");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return channel_from_json(text);
}

}  // namespace qtel
