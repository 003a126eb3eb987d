#include "qtel/quantum_core.hpp"

#include <bit>
#include <algorithm>
#include <cmath>

namespace qtel {

namespace {

void check_qubit_count(int n) {
    if (n < 1) throw ArgumentError("qubit count must be >= 1");
    if (n > kMaxQubits)
        throw CapacityError("register of " + std::to_string(n) + " qubits exceeds the dense cap of " +
                            std::to_string(kMaxQubits));
}

void check_site(int n_qubits, int site) {
    if (site < 1 || site > n_qubits)
        throw ArgumentError("site " + std::to_string(site) + " outside register of " +
                            std::to_string(n_qubits) + " qubits");
}

void check_unitary(const Eigen::Matrix2cd& u) {
    if ((u.adjoint() * u - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff() > 1e-10)
        throw ArgumentError("matrix is not unitary within 1e-10");
}

// Action of one Pauli string on basis ket |j>:  P|j> = v * |image(j)>.
struct PauliAction {
    std::uint64_t flip_mask = 0;                 // X and Y letters
    std::uint64_t z_mask = 0;                    // Y and Z letters contribute signs
    int y_count = 0;

    Complex value(std::uint64_t j) const {
        // phase: prod over Y letters of (bit ? -i : i), times prod over Z of (-1)^bit.
        // Combined: i^y_count * (-1)^{popcount(j & z_mask)}
        int par = std::popcount(j & z_mask) & 1;
        static const Complex ipow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
        Complex v = ipow[y_count & 3];
        return par ? -v : v;
    }
    std::uint64_t image(std::uint64_t j) const { return j ^ flip_mask; }
};

PauliAction make_action(const PauliString& p) {
    PauliAction a;
    int n = p.size();
    for (int s = 1; s <= n; ++s) {
        std::uint64_t bit = std::uint64_t{1} << site_bit(n, s);
        switch (p.letters[s - 1]) {
            case 'I': break;
            case 'X': a.flip_mask |= bit; break;
            case 'Y':
                a.flip_mask |= bit;
                a.z_mask |= bit;
                ++a.y_count;
                break;
            case 'Z': a.z_mask |= bit; break;
        }
    }
    return a;
}

}  // namespace

PureState::PureState(int n, Vec amps) : n_qubits(n), amplitudes(std::move(amps)) {
    check_qubit_count(n);
    if (amplitudes.size() != (Eigen::Index{1} << n))
        throw ArgumentError("amplitude vector length does not match 2^n_qubits");
    if (std::abs(amplitudes.norm() - 1.0) > 1e-6)
        throw ArgumentError("pure state is not normalized");
}

PureState PureState::basis_state(int n, std::uint64_t index) {
    check_qubit_count(n);
    if (index >= (std::uint64_t{1} << n)) throw ArgumentError("basis index out of range");
    Vec v = Vec::Zero(Eigen::Index{1} << n);
    v[static_cast<Eigen::Index>(index)] = 1.0;
    return PureState(n, std::move(v));
}

PureState PureState::normalized(int n, Vec amps) {
    double nrm = amps.norm();
    if (nrm < 1e-14) throw ArgumentError("cannot normalize a zero vector");
    return PureState(n, amps / nrm);
}

DensityMatrix::DensityMatrix(int n, Mat m) : n_qubits(n), matrix(std::move(m)) {
    check_qubit_count(n);
    Eigen::Index d = Eigen::Index{1} << n;
    if (matrix.rows() != d || matrix.cols() != d)
        throw ArgumentError("density matrix shape does not match 2^n_qubits");
}

PauliString::PauliString(std::string s) : letters(std::move(s)) {
    if (letters.empty() || letters.size() > kMaxQubits)
        throw ArgumentError("Pauli string length out of range");
    for (char c : letters)
        if (c != 'I' && c != 'X' && c != 'Y' && c != 'Z')
            throw ArgumentError("Pauli letter must be one of I,X,Y,Z");
}

int PauliString::weight() const {
    return static_cast<int>(std::count_if(letters.begin(), letters.end(), [](char c) { return c != 'I'; }));
}

std::vector<PauliString> CorrelatorTable::support(double tol) const {
    std::vector<PauliString> out;
    for (const auto& [p, c] : entries)
        if (std::abs(c) > tol) out.push_back(p);
    return out;
}

PureState tensor(const PureState& a, const PureState& b) {
    check_qubit_count(a.n_qubits + b.n_qubits);
    Vec out(a.dim() * b.dim());
    for (Eigen::Index i = 0; i < a.dim(); ++i)
        out.segment(i * b.dim(), b.dim()) = a.amplitudes[i] * b.amplitudes;
    return PureState(a.n_qubits + b.n_qubits, std::move(out));
}

DensityMatrix density_from_pure(const PureState& psi) {
    return DensityMatrix(psi.n_qubits, psi.amplitudes * psi.amplitudes.adjoint());
}

DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<int>& keep) {
    int n = rho.n_qubits;
    if (keep.empty()) throw ArgumentError("keep set must be non-empty");
    std::vector<int> sites = keep;
    std::sort(sites.begin(), sites.end());
    sites.erase(std::unique(sites.begin(), sites.end()), sites.end());
    for (int s : sites) check_site(n, s);

    std::vector<int> traced;
    for (int s = 1; s <= n; ++s)
        if (!std::binary_search(sites.begin(), sites.end(), s)) traced.push_back(s);

    int nk = static_cast<int>(sites.size());
    int nt = n - nk;
    // scatter a compact sub-index into the full-register bit positions
    auto scatter = [n](const std::vector<int>& ss, std::uint64_t sub) {
        std::uint64_t full = 0;
        for (std::size_t q = 0; q < ss.size(); ++q)
            if (sub >> (ss.size() - 1 - q) & 1) full |= std::uint64_t{1} << site_bit(n, ss[q]);
        return full;
    };

    Eigen::Index dk = Eigen::Index{1} << nk;
    std::uint64_t dt = std::uint64_t{1} << nt;
    Mat out = Mat::Zero(dk, dk);
    for (Eigen::Index i = 0; i < dk; ++i) {
        std::uint64_t fi = scatter(sites, static_cast<std::uint64_t>(i));
        for (Eigen::Index j = 0; j < dk; ++j) {
            std::uint64_t fj = scatter(sites, static_cast<std::uint64_t>(j));
            Complex acc = 0;
            for (std::uint64_t t = 0; t < dt; ++t) {
                std::uint64_t ft = scatter(traced, t);
                acc += rho.matrix(static_cast<Eigen::Index>(fi | ft), static_cast<Eigen::Index>(fj | ft));
            }
            out(i, j) = acc;
        }
    }
    return DensityMatrix(nk, std::move(out));
}

CorrelatorTable pauli_expand(const DensityMatrix& rho) {
    int n = rho.n_qubits;
    if (n > 10) throw CapacityError("pauli_expand capped at 10 qubits (4^N table)");
    Eigen::Index dim = rho.dim();

    CorrelatorTable table{n, {}};
    std::string word(n, 'I');
    std::uint64_t total = std::uint64_t{1} << (2 * n);
    static const char letters[4] = {'I', 'X', 'Y', 'Z'};
    for (std::uint64_t code = 0; code < total; ++code) {
        std::uint64_t c = code;
        for (int q = n - 1; q >= 0; --q) {
            word[q] = letters[c & 3];
            c >>= 2;
        }
        PauliString p(word);
        PauliAction act = make_action(p);
        // Tr(rho P) = sum_j rho(j, image(j)) * value(j)   [P column j has its
        // single nonzero at row image(j)]
        Complex tr = 0;
        for (Eigen::Index j = 0; j < dim; ++j)
            tr += rho.matrix(j, static_cast<Eigen::Index>(act.image(static_cast<std::uint64_t>(j)))) *
                  act.value(static_cast<std::uint64_t>(j));
        if (std::abs(tr.imag()) > 1e-9)
            throw ArgumentError("operator is not Hermitian: complex Pauli coefficient");
        table.entries.emplace(std::move(p), tr.real());
    }
    return table;
}

DensityMatrix pauli_reconstruct(const CorrelatorTable& table) {
    int n = table.n_qubits;
    check_qubit_count(n);
    Eigen::Index dim = Eigen::Index{1} << n;
    Mat out = Mat::Zero(dim, dim);
    for (const auto& [p, c] : table.entries) {
        if (p.size() != n) throw ArgumentError("Pauli string length does not match table qubit count");
        if (c == 0.0) continue;
        PauliAction act = make_action(p);
        // P has its only nonzero in column j at row image(j), value(j).
        for (Eigen::Index j = 0; j < dim; ++j)
            out(static_cast<Eigen::Index>(act.image(static_cast<std::uint64_t>(j))), j) +=
                c * act.value(static_cast<std::uint64_t>(j));
    }
    out /= static_cast<double>(dim);
    return DensityMatrix(n, std::move(out));
}

double fidelity_pure(const PureState& psi, const DensityMatrix& rho) {
    if (psi.n_qubits != rho.n_qubits) throw ArgumentError("state/operator dimension mismatch");
    return (psi.amplitudes.adjoint() * rho.matrix * psi.amplitudes)(0, 0).real();
}

PureState apply_local_unitary(const PureState& state, int site, const Eigen::Matrix2cd& u) {
    check_site(state.n_qubits, site);
    check_unitary(u);
    std::uint64_t mask = std::uint64_t{1} << site_bit(state.n_qubits, site);
    Vec out = state.amplitudes;
    for (std::uint64_t j = 0; j < static_cast<std::uint64_t>(state.dim()); ++j) {
        if (j & mask) continue;
        Complex a0 = state.amplitudes[static_cast<Eigen::Index>(j)];
        Complex a1 = state.amplitudes[static_cast<Eigen::Index>(j | mask)];
        out[static_cast<Eigen::Index>(j)] = u(0, 0) * a0 + u(0, 1) * a1;
        out[static_cast<Eigen::Index>(j | mask)] = u(1, 0) * a0 + u(1, 1) * a1;
    }
    return PureState(state.n_qubits, std::move(out));
}

DensityMatrix apply_local_unitary(const DensityMatrix& state, int site, const Eigen::Matrix2cd& u) {
    check_site(state.n_qubits, site);
    check_unitary(u);
    int n = state.n_qubits;
    Mat full = Mat::Identity(1, 1);
    for (int s = 1; s <= n; ++s) {
        Mat factor = (s == site) ? Mat(u) : Mat(Mat::Identity(2, 2));
        Mat next(full.rows() * 2, full.cols() * 2);
        for (Eigen::Index i = 0; i < full.rows(); ++i)
            for (Eigen::Index j = 0; j < full.cols(); ++j) next.block(2 * i, 2 * j, 2, 2) = full(i, j) * factor;
        full = std::move(next);
    }
    return DensityMatrix(n, full * state.matrix * full.adjoint());
}

Mat pauli_matrix(const PauliString& p) {
    PauliAction act = make_action(p);
    Eigen::Index dim = Eigen::Index{1} << p.size();
    Mat m = Mat::Zero(dim, dim);
    for (Eigen::Index j = 0; j < dim; ++j)
        m(static_cast<Eigen::Index>(act.image(static_cast<std::uint64_t>(j))), j) =
            act.value(static_cast<std::uint64_t>(j));
    return m;
}

double min_eigenvalue(const DensityMatrix& rho) {
    Eigen::SelfAdjointEigenSolver<Mat> es(rho.matrix, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

void validate_density(const DensityMatrix& rho, double her_tol, double eig_tol) {
    if ((rho.matrix - rho.matrix.adjoint()).cwiseAbs().maxCoeff() > her_tol)
        throw ArgumentError("density matrix is not Hermitian");
    if (std::abs(rho.matrix.trace() - Complex{1, 0}) > her_tol)
        throw ArgumentError("density matrix trace differs from 1");
    if (min_eigenvalue(rho) < -eig_tol) throw ArgumentError("density matrix has a negative eigenvalue");
}

}  // namespace qtel
