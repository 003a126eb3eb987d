// Nuclear-spin-bath decoherence: per-site envelope attenuation of Pauli
// correlators, an exact central-spin oracle for small baths, and the
// GHZ-versus-modified-W fidelity comparison.
#pragma once

#include <map>
#include <optional>
#include <vector>

#include "qtel/quantum_core.hpp"
#include "qtel/teleport_protocol.hpp"

namespace qtel {

/// Per-site bath time constants tau_i. A site may be given tau directly or
/// the pair (K_i, N_i) with tau_i = 2 / (K_i sqrt(N_i)).
struct BathSpec {
    std::vector<double> site_tau;

    explicit BathSpec(std::vector<double> taus);
    static BathSpec from_couplings(const std::vector<std::pair<double, double>>& coupling_and_count);
    static BathSpec uniform(int sites, double tau);

    int sites() const { return static_cast<int>(site_tau.size()); }
};

/// Single-site decay factor
///   f(t) = 1/3 + (2/3)(1 - t^2/tau^2) e^{-t^2 / 2 tau^2},
/// with f(0) = 1, f(tau) = 1/3, global minimum ~0.0358 at t = sqrt(3) tau,
/// and f -> 1/3 as t -> infinity. Always in (0, 1].
double envelope(double t, double tau);

/// Attenuates every correlator c_P by prod_{i in support(P)} f_i(t). The map
/// is a product of single-site depolarizing channels, so the output is a
/// valid density matrix with the trace preserved exactly.
DensityMatrix decohere(const DensityMatrix& state, const BathSpec& bath, double t);
DensityMatrix decohere(const CorrelatorTable& table, const BathSpec& bath, double t);
CorrelatorTable decohere_table(const CorrelatorTable& table, const BathSpec& bath, double t);

/// One electron spin coupled isotropically to `bath_size` spin-1/2 nuclei,
/// H = K S . I_total, bath initially maximally mixed.
struct ExactBathModel {
    double coupling;
    int bath_size;

    ExactBathModel(double k, int m);
    double tau() const;  // 2 / (K sqrt(m))
    /// Precession rate of the total-bath-spin-I sector, Lambda = K(I + 1/2)/2;
    /// the electron attenuation in that sector oscillates at 2 Lambda.
    double sector_lambda(double total_spin) const;
};

/// Exact evolution of the central-spin model. The Hamiltonian conserves
/// total magnetization, so the eigenproblem is solved per magnetization
/// block; this is cross-checked against a plain dense evolution in the test
/// suite. Construction costs the eigendecomposition; evaluations are cheap.
class ExactBathEvolver {
  public:
    explicit ExactBathEvolver(const ExactBathModel& model);

    /// Reduced qubit state Tr_bath[ U (rho (x) I/2^m) U^dagger ].
    DensityMatrix evolve(double t, const DensityMatrix& qubit_state) const;

    /// Isotropic Bloch-vector attenuation factor (mean over the x,y,z axes).
    double attenuation(double t) const;
    /// Largest spread between the per-axis attenuation factors.
    double anisotropy(double t) const;

    const ExactBathModel& model() const { return model_; }

  private:
    std::array<double, 3> axis_factors(double t) const;

    ExactBathModel model_;
    std::vector<std::vector<int>> block_states_;  // basis indices per magnetization block
    std::vector<Eigen::VectorXd> block_evals_;
    std::vector<Mat> block_evecs_;
};

/// One-call convenience wrapper around ExactBathEvolver::evolve.
DensityMatrix exact_bath_evolve(const ExactBathModel& model, double t, const DensityMatrix& qubit_state);

/// Per-weight attenuation summary and/or a fidelity-versus-time curve.
struct DecayReport {
    std::vector<double> times;
    std::vector<double> fidelities;
    double report_time = 0.0;
    // per correlator weight: (min, max) attenuation over the strings of that
    // weight (min == max for uniform baths)
    std::map<int, std::pair<double, double>> weight_attenuation;
    std::map<PauliString, double> string_attenuation;
};

/// Decoheres the channel on a time grid and runs the protocol with the plan
/// frozen from the ideal channel; records the six-state average fidelity.
DecayReport fidelity_vs_time(const PureState& channel, int bob_site, const BathSpec& bath,
                             const std::vector<double>& t_grid);

struct GhzWComparison {
    DecayReport modified_w;
    DecayReport ghz;
    std::optional<double> first_crossing;  // first grid t with F_W > F_GHZ strictly
};

/// Fidelity-versus-time curves of the 3-qubit modified-W channel
/// (sqrt(2)|100> + |010> + |001>)/2 with Bob on site 1 and of GHZ_3 under the
/// same bath.
GhzWComparison compare_ghz_w(const BathSpec& bath, const std::vector<double>& t_grid);

/// Groups the table's correlators by weight and reports the attenuation
/// factor per group at time t.
DecayReport correlation_decay_report(const CorrelatorTable& table, const BathSpec& bath, double t);

}  // namespace qtel
