// ChannelFile serialization: JSON with the schema
//   { "format": "magnon-channel/1", "n_qubits": N, "bob_qubit": B,
//     "amplitudes": [ { "basis_index": k, "re": x, "im": y }, ... ] }
// Amplitudes with |c| = 0 are omitted; entries are sorted by basis_index.
#pragma once

#include <string>

#include "qtel/quantum_core.hpp"

namespace qtel {

struct ChannelFile {
    static constexpr const char* kFormatTag = "magnon-channel/1";

    PureState state;
    int bob_qubit;
};

/// Serializes the channel; byte output is deterministic for fixed inputs.
std::string channel_to_json(const PureState& state, int bob_qubit);
void write_channel_file(const std::string& path, const PureState& state, int bob_qubit);

/// Throws FormatError for unreadable files, tag mismatches, out-of-range
/// indices or norm violations beyond 1e-9; the loaded state is renormalized.
ChannelFile read_channel_file(const std::string& path);
ChannelFile channel_from_json(const std::string& text);

}  // namespace qtel
