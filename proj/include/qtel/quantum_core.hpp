// Dense state-vector / density-matrix algebra and Pauli-correlator expansion
// for registers of up to kMaxQubits qubits.
//
// Conventions used throughout the toolkit:
//   * qubit 1 is the leftmost factor of a ket and the most significant bit of
//     a basis index: |q1 q2 ... qN>  ->  b = sum_q bit_q * 2^(N-q)
//   * spin operators are S^a = sigma^a / 2; correlator tables store Pauli
//     (sigma) coefficients c_P = Tr(rho P).
#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qtel/errors.hpp"

namespace qtel {

using Complex = std::complex<double>;
using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;

inline constexpr int kMaxQubits = 12;

// Bit position of a 1-based site label inside an n-qubit index.
inline int site_bit(int n_qubits, int site) { return n_qubits - site; }

/// Normalized pure state of an n-qubit register.
struct PureState {
    int n_qubits;
    Vec amplitudes;  // length 2^n_qubits

    PureState(int n, Vec amps);

    Eigen::Index dim() const { return amplitudes.size(); }
    double norm() const { return amplitudes.norm(); }

    /// Computational basis state |index>.
    static PureState basis_state(int n, std::uint64_t index);
    /// Normalizes an arbitrary nonzero vector.
    static PureState normalized(int n, Vec amps);
};

/// Hermitian unit-trace operator on an n-qubit register (validated lazily;
/// see validate_density).
struct DensityMatrix {
    int n_qubits;
    Mat matrix;  // 2^n x 2^n

    DensityMatrix(int n, Mat m);

    Eigen::Index dim() const { return matrix.rows(); }
    double trace_real() const { return matrix.trace().real(); }
};

/// Word over {I,X,Y,Z}; letter k acts on qubit k+1.
struct PauliString {
    std::string letters;

    explicit PauliString(std::string s);

    int size() const { return static_cast<int>(letters.size()); }
    /// Number of non-identity letters.
    int weight() const;

    auto operator<=>(const PauliString&) const = default;
};

/// Real Pauli coefficients of a Hermitian operator:
///   rho = 2^-N sum_P c_P P,   c_P = Tr(rho P).
struct CorrelatorTable {
    int n_qubits;
    std::map<PauliString, double> entries;

    /// Strings with |c_P| > tol.
    std::vector<PauliString> support(double tol = 1e-12) const;
};

// ---- operations ------------------------------------------------------------

/// Kronecker product; a's qubits precede b's.
PureState tensor(const PureState& a, const PureState& b);

DensityMatrix density_from_pure(const PureState& psi);

/// Reduced state on `keep` (1-based sites, any order / duplicates ignored);
/// kept sites stay in their original relative order.
DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<int>& keep);

/// Full Pauli expansion c_P = Tr(rho P) over all 4^N strings.
CorrelatorTable pauli_expand(const DensityMatrix& rho);

DensityMatrix pauli_reconstruct(const CorrelatorTable& table);

/// <psi| rho |psi>
double fidelity_pure(const PureState& psi, const DensityMatrix& rho);

PureState apply_local_unitary(const PureState& state, int site, const Eigen::Matrix2cd& u);
DensityMatrix apply_local_unitary(const DensityMatrix& state, int site, const Eigen::Matrix2cd& u);

// ---- support utilities -----------------------------------------------------

/// Dense matrix of a Pauli string (2^N x 2^N).
Mat pauli_matrix(const PauliString& p);

/// Smallest eigenvalue of a Hermitian matrix.
double min_eigenvalue(const DensityMatrix& rho);

/// Throws unless Hermitian within her_tol, unit trace within her_tol and
/// min eigenvalue >= -eig_tol.
void validate_density(const DensityMatrix& rho, double her_tol = 1e-12, double eig_tol = 1e-10);

}  // namespace qtel
