#include "qtel/spin_bath.hpp"

#include <bit>
#include <cmath>

#include "qtel/channel_builder.hpp"

namespace qtel {

namespace {
constexpr Complex kI{0.0, 1.0};

void check_bath_sites(const BathSpec& bath, int n_qubits) {
    if (bath.sites() != n_qubits)
        throw ArgumentError("bath site count does not match the register");
}
}  // namespace

BathSpec::BathSpec(std::vector<double> taus) : site_tau(std::move(taus)) {
    if (site_tau.empty()) throw ArgumentError("bath needs at least one site");
    for (double tau : site_tau)
        if (!(tau > 0)) throw ArgumentError("bath time constants must be positive");
}

BathSpec BathSpec::from_couplings(const std::vector<std::pair<double, double>>& kn) {
    std::vector<double> taus;
    taus.reserve(kn.size());
    for (auto [k, count] : kn) {
        if (!(k > 0) || !(count > 0)) throw ArgumentError("couplings and spin counts must be positive");
        taus.push_back(2.0 / (k * std::sqrt(count)));
    }
    return BathSpec(std::move(taus));
}

BathSpec BathSpec::uniform(int sites, double tau) {
    if (sites < 1) throw ArgumentError("bath needs at least one site");
    return BathSpec(std::vector<double>(sites, tau));
}

double envelope(double t, double tau) {
    if (!(tau > 0)) throw ArgumentError("tau must be positive");
    if (t < 0) throw ArgumentError("time must be non-negative");
    double u = (t / tau) * (t / tau);
    // grouped so that f(0) = 3/3 and f(tau) = 1/3 are exact
    return (1.0 + 2.0 * (1.0 - u) * std::exp(-0.5 * u)) / 3.0;
}

CorrelatorTable decohere_table(const CorrelatorTable& table, const BathSpec& bath, double t) {
    check_bath_sites(bath, table.n_qubits);
    std::vector<double> f(bath.sites());
    for (int i = 0; i < bath.sites(); ++i) f[i] = envelope(t, bath.site_tau[i]);

    CorrelatorTable out{table.n_qubits, {}};
    for (const auto& [p, c] : table.entries) {
        double factor = 1.0;
        for (int q = 0; q < p.size(); ++q)
            if (p.letters[q] != 'I') factor *= f[q];
        out.entries.emplace(p, c * factor);
    }
    return out;
}

DensityMatrix decohere(const CorrelatorTable& table, const BathSpec& bath, double t) {
    return pauli_reconstruct(decohere_table(table, bath, t));
}

DensityMatrix decohere(const DensityMatrix& state, const BathSpec& bath, double t) {
    return decohere(pauli_expand(state), bath, t);
}

ExactBathModel::ExactBathModel(double k, int m) : coupling(k), bath_size(m) {
    if (!(k > 0)) throw ArgumentError("coupling must be positive");
    if (m < 1) throw ArgumentError("bath needs at least one spin");
    if (m > 10) throw CapacityError("exact bath oracle capped at 10 bath spins");
}

double ExactBathModel::tau() const { return 2.0 / (coupling * std::sqrt(bath_size)); }

double ExactBathModel::sector_lambda(double total_spin) const {
    if (total_spin < 0) throw ArgumentError("total bath spin must be >= 0");
    return coupling * (total_spin + 0.5) / 2.0;
}

ExactBathEvolver::ExactBathEvolver(const ExactBathModel& model) : model_(model) {
    int n = model.bath_size + 1;  // electron + bath, electron = qubit 1 (MSB)
    Eigen::Index dim = Eigen::Index{1} << n;

    // H = K sum_j S_0 . S_j over the bath spins
    Mat h = Mat::Zero(dim, dim);
    std::uint64_t m0 = std::uint64_t{1} << (n - 1);
    for (int j = 1; j <= model.bath_size; ++j) {
        std::uint64_t mj = std::uint64_t{1} << (n - 1 - j);
        for (std::uint64_t b = 0; b < static_cast<std::uint64_t>(dim); ++b) {
            bool b0 = b & m0, bj = b & mj;
            h(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(b)) +=
                model.coupling * (b0 == bj ? 0.25 : -0.25);
            if (b0 != bj)
                h(static_cast<Eigen::Index>(b ^ m0 ^ mj), static_cast<Eigen::Index>(b)) +=
                    model.coupling * 0.5;
        }
    }

    // total magnetization is conserved: diagonalize per popcount block
    block_states_.resize(n + 1);
    for (std::uint64_t b = 0; b < static_cast<std::uint64_t>(dim); ++b)
        block_states_[std::popcount(b)].push_back(static_cast<int>(b));
    for (const auto& states : block_states_) {
        Eigen::Index bd = static_cast<Eigen::Index>(states.size());
        Mat sub(bd, bd);
        for (Eigen::Index r = 0; r < bd; ++r)
            for (Eigen::Index c = 0; c < bd; ++c) sub(r, c) = h(states[r], states[c]);
        Eigen::SelfAdjointEigenSolver<Mat> es(sub);
        block_evals_.push_back(es.eigenvalues());
        block_evecs_.push_back(es.eigenvectors());
    }
}

DensityMatrix ExactBathEvolver::evolve(double t, const DensityMatrix& qubit_state) const {
    if (qubit_state.n_qubits != 1) throw ArgumentError("exact bath oracle evolves one qubit");
    int m = model_.bath_size;
    int n = m + 1;
    std::size_t dim = std::size_t{1} << n;
    std::size_t bath_dim = std::size_t{1} << m;

    // rho_total = rho_qubit (x) I/2^m, block structure over magnetization
    Mat rho = Mat::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    double w = 1.0 / static_cast<double>(bath_dim);
    for (std::size_t b = 0; b < bath_dim; ++b)
        for (int q1 = 0; q1 < 2; ++q1)
            for (int q2 = 0; q2 < 2; ++q2)
                rho(static_cast<Eigen::Index>(q1 * bath_dim + b),
                    static_cast<Eigen::Index>(q2 * bath_dim + b)) = qubit_state.matrix(q1, q2) * w;

    // rho(t)_{kk'} = U_k rho_{kk'} U_k'^dagger blockwise
    std::size_t n_blocks = block_states_.size();
    Mat rho_t = Mat::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (std::size_t k1 = 0; k1 < n_blocks; ++k1) {
        for (std::size_t k2 = 0; k2 < n_blocks; ++k2) {
            const auto& s1 = block_states_[k1];
            const auto& s2 = block_states_[k2];
            Mat blk(static_cast<Eigen::Index>(s1.size()), static_cast<Eigen::Index>(s2.size()));
            bool nonzero = false;
            for (std::size_t r = 0; r < s1.size(); ++r)
                for (std::size_t c = 0; c < s2.size(); ++c) {
                    blk(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rho(s1[r], s2[c]);
                    nonzero |= blk(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) !=
                               Complex{0, 0};
                }
            if (!nonzero) continue;
            Vec ph1 = (-kI * t * block_evals_[k1].array().cast<Complex>()).exp();
            Vec ph2 = (kI * t * block_evals_[k2].array().cast<Complex>()).exp();
            Mat mid = block_evecs_[k1].adjoint() * blk * block_evecs_[k2];
            mid = ph1.asDiagonal() * mid * ph2.asDiagonal();
            Mat evolved = block_evecs_[k1] * mid * block_evecs_[k2].adjoint();
            for (std::size_t r = 0; r < s1.size(); ++r)
                for (std::size_t c = 0; c < s2.size(); ++c)
                    rho_t(s1[r], s2[c]) = evolved(static_cast<Eigen::Index>(r),
                                                  static_cast<Eigen::Index>(c));
        }
    }

    // reduce to the electron qubit
    Mat out = Mat::Zero(2, 2);
    for (int q1 = 0; q1 < 2; ++q1)
        for (int q2 = 0; q2 < 2; ++q2) {
            Complex acc = 0;
            for (std::size_t b = 0; b < bath_dim; ++b)
                acc += rho_t(static_cast<Eigen::Index>(q1 * bath_dim + b),
                             static_cast<Eigen::Index>(q2 * bath_dim + b));
            out(q1, q2) = acc;
        }
    return DensityMatrix(1, std::move(out));
}

std::array<double, 3> ExactBathEvolver::axis_factors(double t) const {
    // evolve the +x, +y, +z Bloch states and read back the same component
    std::array<double, 3> f{};
    const Mat sx = (Mat(2, 2) << 0, 1, 1, 0).finished();
    const Mat sy = (Mat(2, 2) << 0, Complex{0, -1}, Complex{0, 1}, 0).finished();
    const Mat sz = (Mat(2, 2) << 1, 0, 0, -1).finished();
    const std::array<Mat, 3> pauli = {sx, sy, sz};
    for (int axis = 0; axis < 3; ++axis) {
        DensityMatrix in(1, (Mat::Identity(2, 2) + pauli[axis]) * 0.5);
        DensityMatrix out = evolve(t, in);
        f[axis] = (out.matrix * pauli[axis]).trace().real();
    }
    return f;
}

double ExactBathEvolver::attenuation(double t) const {
    auto f = axis_factors(t);
    return (f[0] + f[1] + f[2]) / 3.0;
}

double ExactBathEvolver::anisotropy(double t) const {
    auto f = axis_factors(t);
    return std::max({f[0], f[1], f[2]}) - std::min({f[0], f[1], f[2]});
}

DensityMatrix exact_bath_evolve(const ExactBathModel& model, double t,
                                const DensityMatrix& qubit_state) {
    return ExactBathEvolver(model).evolve(t, qubit_state);
}

DecayReport fidelity_vs_time(const PureState& channel, int bob_site, const BathSpec& bath,
                             const std::vector<double>& t_grid) {
    check_bath_sites(bath, channel.n_qubits);
    if (t_grid.empty()) throw ArgumentError("time grid must be non-empty");
    TeleportPlan plan = make_teleport_plan(channel, bob_site);
    CorrelatorTable table = pauli_expand(density_from_pure(channel));

    DecayReport report;
    report.times = t_grid;
    report.fidelities.reserve(t_grid.size());
    for (double t : t_grid) {
        DensityMatrix rho_t = decohere(table, bath, t);
        report.fidelities.push_back(average_fidelity(rho_t, plan));
    }
    return report;
}

GhzWComparison compare_ghz_w(const BathSpec& bath, const std::vector<double>& t_grid) {
    check_bath_sites(bath, 3);
    // modified-W channel of the closed 3-chain with Bob on the first qubit
    Vec w_amps = Vec::Zero(8);
    w_amps[4] = 1.0 / std::sqrt(2.0);
    w_amps[2] = w_amps[1] = 0.5;
    PureState w_channel(3, std::move(w_amps));
    PureState ghz = build_ghz(3);

    GhzWComparison cmp;
    cmp.modified_w = fidelity_vs_time(w_channel, 1, bath, t_grid);
    cmp.ghz = fidelity_vs_time(ghz, 1, bath, t_grid);
    for (std::size_t k = 0; k < t_grid.size(); ++k) {
        // strict exceedance beyond double-precision noise
        if (cmp.modified_w.fidelities[k] > cmp.ghz.fidelities[k] + 1e-12) {
            cmp.first_crossing = t_grid[k];
            break;
        }
    }
    return cmp;
}

DecayReport correlation_decay_report(const CorrelatorTable& table, const BathSpec& bath, double t) {
    check_bath_sites(bath, table.n_qubits);
    std::vector<double> f(bath.sites());
    for (int i = 0; i < bath.sites(); ++i) f[i] = envelope(t, bath.site_tau[i]);

    DecayReport report;
    report.report_time = t;
    for (const auto& [p, c] : table.entries) {
        double factor = 1.0;
        for (int q = 0; q < p.size(); ++q)
            if (p.letters[q] != 'I') factor *= f[q];
        report.string_attenuation.emplace(p, factor);
        auto [it, inserted] = report.weight_attenuation.try_emplace(p.weight(), factor, factor);
        if (!inserted) {
            it->second.first = std::min(it->second.first, factor);
            it->second.second = std::max(it->second.second, factor);
        }
    }
    return report;
}

}  // namespace qtel
