#include "qtel/magnon_dynamics.hpp"

#include <cmath>
#include <numbers>

namespace qtel {

namespace {
constexpr Complex kI{0.0, 1.0};

void check_delta(double delta) {
    if (!(delta >= 0.0 && delta <= 1.0)) throw ArgumentError("delta must lie in [0, 1]");
}
}  // namespace

ChainSpec::ChainSpec(int n, double d) : n_qubits(n), delta(d) {
    if (n < 2) throw ArgumentError("chain needs at least 2 qubits");
    check_delta(d);
}

TriSpectrum tri_spectrum(double delta) {
    check_delta(delta);
    TriSpectrum s;
    s.eigenvalues = {(2.0 + delta) / 4.0, -3.0 * delta / 4.0, (delta - 4.0) / 4.0};
    s.eigenvectors = {Eigen::Vector3d(1, 1, 1) / std::sqrt(3.0),
                      Eigen::Vector3d(1, 0, -1) / std::sqrt(2.0),
                      Eigen::Vector3d(1, -2, 1) / std::sqrt(6.0)};
    return s;
}

MagnonAmplitudes::MagnonAmplitudes(int n, Vec v) : n_sites(n), values(std::move(v)) {
    if (n < 2) throw ArgumentError("one-magnon register needs at least 2 sites");
    if (values.size() != n) throw ArgumentError("amplitude count does not match site count");
}

MagnonAmplitudes tri_evolve(double theta, double delta) {
    TriSpectrum s = tri_spectrum(delta);
    // |100> = sum_k <v_k|100> v_k; overlaps 1/sqrt(3), 1/sqrt(2), 1/sqrt(6).
    Vec alpha = Vec::Zero(3);
    for (int k = 0; k < 3; ++k) {
        Complex phase = std::exp(-kI * theta * s.eigenvalues[k]);
        double overlap = s.eigenvectors[k][0];
        alpha += phase * overlap * s.eigenvectors[k].cast<Complex>();
    }
    return MagnonAmplitudes(3, std::move(alpha));
}

MagnonAmplitudes ring_evolve(int n_sites, double theta) {
    if (n_sites < 2) throw ArgumentError("ring needs at least 2 sites");
    Vec alpha = Vec::Zero(n_sites);
    for (int lam = 0; lam < n_sites; ++lam) {
        double k = 2.0 * std::numbers::pi * lam / n_sites;
        Complex mode = std::exp(kI * theta * (1.0 - std::cos(k))) / static_cast<double>(n_sites);
        for (int n = 0; n < n_sites; ++n) alpha[n] += mode * std::exp(kI * (k * n));
    }
    return MagnonAmplitudes(n_sites, std::move(alpha));
}

Complex ring_alpha1(int n_sites, double theta) {
    if (n_sites < 2) throw ArgumentError("ring needs at least 2 sites");
    Complex acc = 0;
    for (int lam = 0; lam < n_sites; ++lam) {
        double k = 2.0 * std::numbers::pi * lam / n_sites;
        acc += std::exp(kI * theta * (1.0 - std::cos(k)));
    }
    return acc / static_cast<double>(n_sites);
}

Mat chain_hamiltonian(const ChainSpec& spec) {
    int n = spec.n_qubits;
    Eigen::Index dim = Eigen::Index{1} << n;

    std::vector<std::pair<int, int>> bonds;  // 1-based site pairs, unit coupling
    std::vector<double> couplings;
    if (n == 3) {
        bonds = {{1, 2}, {2, 3}};
        couplings = {1.0, 1.0};
        if (spec.delta != 0.0) {
            bonds.emplace_back(1, 3);
            couplings.push_back(spec.delta);
        }
    } else {
        for (int s = 1; s <= n; ++s) {
            bonds.emplace_back(s, s % n + 1);
            couplings.push_back(1.0);
        }
    }

    Mat h = Mat::Zero(dim, dim);
    for (std::size_t b = 0; b < bonds.size(); ++b) {
        std::uint64_t m1 = std::uint64_t{1} << site_bit(n, bonds[b].first);
        std::uint64_t m2 = std::uint64_t{1} << site_bit(n, bonds[b].second);
        double g = couplings[b];
        for (std::uint64_t j = 0; j < static_cast<std::uint64_t>(dim); ++j) {
            bool b1 = j & m1, b2 = j & m2;
            // S_i.S_j: diagonal +1/4 aligned, -1/4 anti-aligned; flip-flop 1/2
            h(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)) += g * (b1 == b2 ? 0.25 : -0.25);
            if (b1 != b2) {
                std::uint64_t jf = j ^ m1 ^ m2;
                h(static_cast<Eigen::Index>(jf), static_cast<Eigen::Index>(j)) += g * 0.5;
            }
        }
    }
    return h;
}

PureState dense_evolve(const ChainSpec& spec, double theta, const PureState& psi0) {
    if (psi0.n_qubits != spec.n_qubits) throw ArgumentError("state size does not match chain spec");
    if (spec.n_qubits > kMaxQubits) throw CapacityError("register exceeds dense cap");
    Mat h = chain_hamiltonian(spec);
    Eigen::SelfAdjointEigenSolver<Mat> es(h);
    Vec coeffs = es.eigenvectors().adjoint() * psi0.amplitudes;
    for (Eigen::Index k = 0; k < coeffs.size(); ++k)
        coeffs[k] *= std::exp(-kI * theta * es.eigenvalues()[k]);
    return PureState(spec.n_qubits, es.eigenvectors() * coeffs);
}

double bessel_j0(double x) {
    if (!(std::abs(x) <= 50.0)) throw ArgumentError("bessel_j0 supports |x| <= 50");
    return std::cyl_bessel_j(0.0, std::abs(x));
}

double alpha1_large_n(double theta) {
    double j0 = bessel_j0(theta);
    return j0 * j0;
}

PureState magnon_to_state(const MagnonAmplitudes& amps) {
    int n = amps.n_sites;
    if (n > kMaxQubits) throw CapacityError("register exceeds dense cap");
    Vec full = Vec::Zero(Eigen::Index{1} << n);
    for (int site = 1; site <= n; ++site)
        full[Eigen::Index{1} << site_bit(n, site)] = amps.values[site - 1];
    return PureState(n, std::move(full));
}

}  // namespace qtel
