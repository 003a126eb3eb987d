// One-magnon dynamics of the 3-qubit Delta-chain and the N-site closed ring,
// a dense full-Hilbert evolution oracle, and the large-N Bessel asymptotics.
//
// All times are dimensionless, theta = J*t (the exchange strength J is the
// time unit; with J ~ 0.01 eV one unit of theta is roughly 0.07 ps).
#pragma once

#include <array>

#include "qtel/quantum_core.hpp"

namespace qtel {

/// Closed-chain register. `delta` interpolates the 3-qubit chain between
/// open (0) and perfectly closed (1); it is meaningful only for n_qubits = 3,
/// where the bond pattern is J(S1.S2 + S2.S3 + delta S1.S3). Every other size
/// is a plain ring  J sum_i S_i.S_{i+1}  with site N+1 = 1 (for N = 2 the two
/// ring bonds coincide, giving coupling 2J on the single pair).
struct ChainSpec {
    int n_qubits;
    double delta = 1.0;

    ChainSpec(int n, double d = 1.0);
};

/// Analytic one-magnon spectrum of the 3-qubit Delta-chain, energies in
/// units of J:
///   E1 = (2+delta)/4   with eigenvector (1,1,1)/sqrt(3)
///   E2 = -3 delta/4    with eigenvector (1,0,-1)/sqrt(2)
///   E3 = (delta-4)/4   with eigenvector (1,-2,1)/sqrt(6)
/// The eigenvectors are independent of delta (mirror symmetry of the chain).
struct TriSpectrum {
    std::array<double, 3> eigenvalues;
    std::array<Eigen::Vector3d, 3> eigenvectors;
};

TriSpectrum tri_spectrum(double delta);

/// Amplitudes over the flipped-site basis of the one-magnon sector.
struct MagnonAmplitudes {
    int n_sites;
    Vec values;  // entry n-1 = amplitude of |flip at site n>

    MagnonAmplitudes(int n, Vec v);
};

/// Evolution of |100> under the Delta-chain for time theta, from the analytic
/// spectral decomposition.
MagnonAmplitudes tri_evolve(double theta, double delta);

/// Evolution of |10...0> on the N-site ring:
///   alpha_n(theta) = (1/N) sum_k e^{+i theta (1 - cos k)} e^{i k (n-1)},
///   k = 2 pi lambda / N.
/// Phases follow the ring dispersion with the ground-state energy removed;
/// dense_evolve reproduces these amplitudes up to the global ground-state
/// phase e^{-i theta N/4}.
MagnonAmplitudes ring_evolve(int n_sites, double theta);

/// Return amplitude alpha_1(theta) alone; O(N) per call.
Complex ring_alpha1(int n_sites, double theta);

/// Full-Hilbert oracle: e^{-i H theta} psi0 by eigendecomposition of the
/// dense 2^N Hamiltonian of `spec` (spin convention S = sigma/2).
PureState dense_evolve(const ChainSpec& spec, double theta, const PureState& psi0);

/// Dense Hamiltonian of `spec` in units of J (exposed for spectrum checks).
Mat chain_hamiltonian(const ChainSpec& spec);

/// Zeroth-order Bessel function, |x| <= 50.
double bessel_j0(double x);

/// Large-N limit of |alpha_1(theta)|^2, namely J0(theta)^2.
double alpha1_large_n(double theta);

/// Embed one-magnon amplitudes into the full 2^N register.
PureState magnon_to_state(const MagnonAmplitudes& amps);

}  // namespace qtel
