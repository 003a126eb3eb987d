// Construction of teleportation channel states, evaluation of the
// perfect-teleportation conditions, and root solving for the switch-off
// times of the chain and ring interactions.
#pragma once

#include <optional>
#include <vector>

#include "qtel/magnon_dynamics.hpp"
#include "qtel/quantum_core.hpp"

namespace qtel {

enum class BranchSign { plus, minus };
enum class PhaseProfile { fourier, uniform, explicit_list };

/// Parameters of an n-magnon channel on N qubits. With the fourier profile
/// the non-Bob one-magnon terms carry phases e^{i 2 pi j / N}.
struct ChannelSpec {
    int n_qubits;
    int magnon_count = 1;
    int bob_site = 1;
    BranchSign sign = BranchSign::plus;
    PhaseProfile profile = PhaseProfile::fourier;
    std::vector<double> phases;  // used only with explicit_list; one entry per site
};

/// Residual of a teleportation condition; satisfied iff |residual| <= tolerance.
struct ConditionReport {
    double residual;
    bool satisfied;
    double tolerance;
};

/// Window and resolution for the oscillatory root scans.
struct RootSearch {
    double theta_lo;
    double theta_hi;
    double grid_step = 0.01;
    double tolerance = 1e-9;
    int max_roots = 1000;

    RootSearch(double lo, double hi, double step = 0.01, double tol = 1e-9, int max = 1000);
};

/// Sentinel ring size selecting the N -> infinity Bessel asymptotics.
inline constexpr int kRingInfinity = -1;

/// Residual |C_bob|^2 - sum_{i != bob} |C_i|^2 of the one-magnon condition.
ConditionReport one_magnon_condition(const MagnonAmplitudes& c, int bob_site, double tolerance = 1e-9);

/// One-magnon channel
///   1/sqrt(2(N-1)) sum_{j != bob} e^{i phi_j} |flip j>  +/-  1/sqrt(2) |flip bob>
PureState build_one_magnon_channel(int n_qubits, int bob_site, BranchSign sign = BranchSign::plus,
                                   PhaseProfile profile = PhaseProfile::fourier,
                                   const std::vector<double>& phases = {});

/// Dispatches on magnon_count (phase profiles apply to one-magnon channels).
PureState build_channel(const ChannelSpec& spec);

/// n-magnon channel: equal superposition of all n-magnon configurations of
/// the non-Bob sites with Bob |0>, plus relative weight sqrt((N-n)/n) of all
/// (n-1)-magnon configurations with Bob |1>; both branches carry weight 1/2.
PureState build_n_magnon_channel(int n_qubits, int magnons, int bob_site,
                                 BranchSign sign = BranchSign::plus);

/// (|100> + |010> + |001> + |111>)/2 — equal-footing state mixing magnon
/// numbers 1 and 3.
PureState build_w_like();

/// (|0...0> + |1...1>)/sqrt(2)
PureState build_ghz(int n_qubits);

/// Left-hand side of the 3-qubit switch-off condition,
///   3 cos(theta(1+2 delta)/2) + cos(3 theta/2) + (3/2) cos((1-delta) theta) - 1,
/// which equals (9/2)(|a1|^2 - |a2|^2 - |a3|^2) for tri_evolve amplitudes.
double tri_condition_lhs(double theta, double delta);

/// 2 |alpha_1(theta)|^2 - 1 for the N-site ring (zero iff the return
/// probability equals one half).
double ring_condition_lhs(int n_sites, double theta);

/// All roots of tri_condition_lhs in the search window, ascending.
std::vector<double> solve_tri_times(double delta, const RootSearch& search);

/// All roots of ring_condition_lhs; with n_sites = kRingInfinity solves
/// J0(theta)^2 = 1/2 instead.
std::vector<double> solve_ring_times(int n_sites, const RootSearch& search);

/// Closed-form switch-off times of the perfectly closed 3-qubit chain,
///   (2/3)(2 pi n + arccos(-1/8)).
double closed_form_tau(int period_index);

/// First theta past the switch-off root where the finite-N return
/// probability exceeds the no-revival limit J0(theta)^2 by `excess`
/// (scanned with `step`); nullopt if no revival below theta_hi.
std::optional<double> ring_revival_time(int n_sites, double theta_hi, double excess = 0.02,
                                        double step = 0.01);

}  // namespace qtel
