// Full teleportation protocol: branch decomposition of the channel on Bob's
// qubit, Alice's orthonormal measurement, Bob's unitary corrections, and
// per-outcome / averaged fidelities for pure or decohered channels.
//
// Register layout: the unknown input qubit is prepended to the channel, so
// the joint register is [input, channel_1 .. channel_N]; Alice holds the
// input qubit plus every channel qubit except Bob's.
#pragma once

#include <cstdint>
#include <vector>

#include "qtel/quantum_core.hpp"

namespace qtel {

/// A teleportation task: channel, Bob's site, and the unknown input (a,b).
struct TeleportSetup {
    PureState channel;
    int bob_site;
    Complex a;
    Complex b;
};

/// Unnormalized branch vectors of the channel split on Bob's qubit,
///   channel = phi0 |0>_B + phi1 |1>_B,
/// lifted into Alice's register (input qubit as the leading factor):
///   xi1 = |0> phi0,  xi4 = |1> phi1,  xi2 = |0> phi1,  xi3 = |1> phi0.
struct XiVectors {
    int alice_qubits;  // 1 + (N-1)
    Vec xi1, xi2, xi3, xi4;
};

/// Orthonormal measurement basis for Alice. The four primary vectors are the
/// normalized combinations (xi1_hat +/- xi4_hat)/sqrt(2) and
/// (xi2_hat +/- xi3_hat)/sqrt(2); for channels obeying the perfect-
/// teleportation condition these coincide with (xi1 +/- xi4) / sqrt(|xi1|^2
/// + |xi4|^2). `balanced` flags whether that condition holds.
struct MeasurementBasis {
    std::vector<Vec> vectors;
    int primary_count = 4;
    bool balanced = true;
    double imbalance = 0.0;  // | |xi1|^2 - |xi4|^2 |
};

/// Measurement basis plus the frozen per-outcome data derived from the ideal
/// channel: conditional operators T_m (Bob's unnormalized state is T_m (a,b))
/// and the correction unitaries (adjoint of the polar factor of T_m).
struct TeleportPlan {
    int bob_site;
    MeasurementBasis basis;
    std::vector<Eigen::Matrix2cd> conditional_ops;
    std::vector<Eigen::Matrix2cd> corrections;
};

struct OutcomeRecord {
    int index;
    double probability;
    DensityMatrix bob_state;  // Bob's conditional state before correction
    Eigen::Matrix2cd correction;
    double fidelity_after_correction;  // 0 for probability ~ 0 outcomes
};

struct ProtocolReport {
    std::vector<OutcomeRecord> outcomes;
    double average_fidelity;
    bool perfect;                // average fidelity = 1 within 1e-9
    double success_probability;  // total weight of exact-recovery outcomes
};

enum class ChannelVerdict { perfect, probabilistic, broken };

/// Per-outcome conditional operators with their singular values. Verdict is
/// `perfect` iff every non-null operator is proportional to a unitary within
/// 1e-9 (equivalently: outcome probabilities are input-independent),
/// `broken` if the channel cannot be decomposed or some outcome destroys the
/// input irrecoverably, otherwise `probabilistic`.
struct ChannelAnalysis {
    std::vector<Eigen::Matrix2cd> conditional_ops;
    std::vector<std::pair<double, double>> singular_values;  // descending per outcome
    ChannelVerdict verdict;
};

XiVectors xi_decompose(const PureState& channel, int bob_site);

/// Throws DecompositionError when <phi0|phi1> != 0 within 1e-10 and
/// ProtocolError when a branch has zero norm.
MeasurementBasis build_measurement_basis(const XiVectors& xi);

TeleportPlan make_teleport_plan(const PureState& channel, int bob_site);

ProtocolReport run_teleport(const TeleportSetup& setup);

/// Same protocol with density-matrix arithmetic and the basis/corrections
/// frozen from the ideal channel. Completion outcomes may acquire weight for
/// decohered channels; they are corrected with the identity.
ProtocolReport run_teleport_mixed(const DensityMatrix& channel, const TeleportPlan& plan,
                                  Complex a, Complex b);

/// Exact input average: mean fidelity over the six axial states (+/-x, +/-y,
/// +/-z), which equals the uniform average for any protocol linear in the
/// input state.
double average_fidelity(const PureState& channel, int bob_site);
double average_fidelity(const DensityMatrix& channel, const TeleportPlan& plan);

/// Monte Carlo cross-check over Haar-random inputs with an explicit seed.
double average_fidelity_monte_carlo(const PureState& channel, int bob_site, int samples,
                                    std::uint64_t seed);
double average_fidelity_monte_carlo(const DensityMatrix& channel, const TeleportPlan& plan,
                                    int samples, std::uint64_t seed);

ChannelAnalysis analyze_channel(const PureState& channel, int bob_site);

/// Independent first-principles oracle (explicit joint construction, dense
/// projectors, its own basis completion and polar decomposition); N <= 6.
ProtocolReport brute_force_teleport(const TeleportSetup& setup);

}  // namespace qtel
