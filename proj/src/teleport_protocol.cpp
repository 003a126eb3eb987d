#include "qtel/teleport_protocol.hpp"

#include <cmath>
#include <random>

namespace qtel {

namespace {

constexpr double kPerfectTol = 1e-9;
constexpr double kNullTol = 1e-12;

// Split channel index j into (bob bit, index over the remaining qubits in
// original relative order).
struct BobSplit {
    int n_qubits;
    int bob_bit;  // bit position of bob's site

    std::uint64_t rest(std::uint64_t j) const {
        std::uint64_t hi = j >> (bob_bit + 1);
        std::uint64_t lo = j & ((std::uint64_t{1} << bob_bit) - 1);
        return (hi << bob_bit) | lo;
    }
    int bob(std::uint64_t j) const { return static_cast<int>(j >> bob_bit & 1); }
};

BobSplit make_split(int n_qubits, int bob_site) {
    if (bob_site < 1 || bob_site > n_qubits) throw ArgumentError("bob site outside register");
    return {n_qubits, site_bit(n_qubits, bob_site)};
}

void check_input(Complex a, Complex b) {
    if (std::abs(std::norm(a) + std::norm(b) - 1.0) > 1e-12)
        throw ArgumentError("input amplitudes are not normalized");
}

Eigen::Matrix2cd polar_unitary(const Eigen::Matrix2cd& t) {
    Eigen::JacobiSVD<Eigen::Matrix2cd> svd(t, Eigen::ComputeFullU | Eigen::ComputeFullV);
    return svd.matrixU() * svd.matrixV().adjoint();
}

// Joint amplitudes as a (2^N x 2) matrix: row = Alice index (input qubit is
// the leading bit, then the non-Bob channel qubits), column = Bob's bit.
Mat joint_matrix(const PureState& channel, int bob_site, Complex a, Complex b) {
    int n = channel.n_qubits;
    BobSplit split = make_split(n, bob_site);
    Eigen::Index alice_dim = Eigen::Index{1} << n;
    Mat m = Mat::Zero(alice_dim, 2);
    std::uint64_t x_mask = std::uint64_t{1} << (n - 1);
    for (std::uint64_t j = 0; j < static_cast<std::uint64_t>(channel.dim()); ++j) {
        Complex c = channel.amplitudes[static_cast<Eigen::Index>(j)];
        if (c == Complex{0, 0}) continue;
        std::uint64_t r = split.rest(j);
        int bb = split.bob(j);
        m(static_cast<Eigen::Index>(r), bb) += a * c;
        m(static_cast<Eigen::Index>(r | x_mask), bb) += b * c;
    }
    return m;
}

std::vector<Eigen::Matrix2cd> conditional_operators(const PureState& channel, int bob_site,
                                                    const MeasurementBasis& basis) {
    Mat m0 = joint_matrix(channel, bob_site, 1, 0);
    Mat m1 = joint_matrix(channel, bob_site, 0, 1);
    std::vector<Eigen::Matrix2cd> ops;
    ops.reserve(basis.vectors.size());
    for (const Vec& u : basis.vectors) {
        Eigen::Matrix2cd t;
        t.col(0) = (u.adjoint() * m0).transpose();
        t.col(1) = (u.adjoint() * m1).transpose();
        ops.push_back(t);
    }
    return ops;
}

DensityMatrix maximally_mixed_qubit() { return DensityMatrix(1, Mat::Identity(2, 2) * 0.5); }

ProtocolReport finalize_report(std::vector<OutcomeRecord> outcomes) {
    double avg = 0, success = 0;
    for (const auto& rec : outcomes) {
        avg += rec.probability * rec.fidelity_after_correction;
        if (rec.fidelity_after_correction >= 1.0 - kPerfectTol) success += rec.probability;
    }
    return {std::move(outcomes), avg, avg >= 1.0 - kPerfectTol, success};
}

std::vector<Complex> axial_inputs() {
    const double s = 1.0 / std::sqrt(2.0);
    // pairs (a, b) flattened: +z, -z, +x, -x, +y, -y
    return {1, 0, 0, 1, s, s, s, -s, s, Complex{0, s}, s, Complex{0, -s}};
}

std::pair<Complex, Complex> haar_input(std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    Complex a{g(rng), g(rng)}, b{g(rng), g(rng)};
    double nrm = std::sqrt(std::norm(a) + std::norm(b));
    return {a / nrm, b / nrm};
}

}  // namespace

XiVectors xi_decompose(const PureState& channel, int bob_site) {
    int n = channel.n_qubits;
    BobSplit split = make_split(n, bob_site);
    Eigen::Index rest_dim = Eigen::Index{1} << (n - 1);
    Vec phi0 = Vec::Zero(rest_dim), phi1 = Vec::Zero(rest_dim);
    for (std::uint64_t j = 0; j < static_cast<std::uint64_t>(channel.dim()); ++j) {
        Eigen::Index r = static_cast<Eigen::Index>(split.rest(j));
        (split.bob(j) ? phi1 : phi0)[r] += channel.amplitudes[static_cast<Eigen::Index>(j)];
    }
    XiVectors xi;
    xi.alice_qubits = n;
    Eigen::Index dim = Eigen::Index{1} << n;
    xi.xi1 = Vec::Zero(dim);
    xi.xi2 = Vec::Zero(dim);
    xi.xi3 = Vec::Zero(dim);
    xi.xi4 = Vec::Zero(dim);
    xi.xi1.head(rest_dim) = phi0;
    xi.xi2.head(rest_dim) = phi1;
    xi.xi3.tail(rest_dim) = phi0;
    xi.xi4.tail(rest_dim) = phi1;
    return xi;
}

MeasurementBasis build_measurement_basis(const XiVectors& xi) {
    Eigen::Index rest_dim = xi.xi1.size() / 2;
    Vec phi0 = xi.xi1.head(rest_dim);
    Vec phi1 = xi.xi2.head(rest_dim);
    double n0 = phi0.norm(), n1 = phi1.norm();
    if (n0 < kNullTol || n1 < kNullTol)
        throw ProtocolError("degenerate channel: a Bob branch has zero norm");
    if (std::abs(phi0.dot(phi1)) > 1e-10)
        throw DecompositionError("Bob branches are not orthogonal");

    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    Vec h1 = xi.xi1 / n0, h4 = xi.xi4 / n1, h2 = xi.xi2 / n1, h3 = xi.xi3 / n0;
    MeasurementBasis basis;
    basis.vectors = {(h1 + h4) * inv_sqrt2, (h1 - h4) * inv_sqrt2, (h2 + h3) * inv_sqrt2,
                     (h2 - h3) * inv_sqrt2};
    basis.primary_count = 4;
    basis.imbalance = std::abs(n0 * n0 - n1 * n1);
    basis.balanced = basis.imbalance <= kPerfectTol;

    // complete to a full orthonormal basis of Alice's space
    Eigen::Index dim = xi.xi1.size();
    Mat primary(dim, 4);
    for (int k = 0; k < 4; ++k) primary.col(k) = basis.vectors[k];
    Eigen::HouseholderQR<Mat> qr(primary);
    Mat q = qr.householderQ();
    for (Eigen::Index c = 4; c < dim; ++c) basis.vectors.emplace_back(q.col(c));
    return basis;
}

TeleportPlan make_teleport_plan(const PureState& channel, int bob_site) {
    TeleportPlan plan;
    plan.bob_site = bob_site;
    plan.basis = build_measurement_basis(xi_decompose(channel, bob_site));
    plan.conditional_ops = conditional_operators(channel, bob_site, plan.basis);
    plan.corrections.reserve(plan.conditional_ops.size());
    for (const auto& t : plan.conditional_ops) {
        if (t.norm() < kNullTol)
            plan.corrections.push_back(Eigen::Matrix2cd::Identity());
        else
            plan.corrections.push_back(polar_unitary(t).adjoint());
    }
    return plan;
}

ProtocolReport run_teleport(const TeleportSetup& setup) {
    check_input(setup.a, setup.b);
    TeleportPlan plan = make_teleport_plan(setup.channel, setup.bob_site);
    Eigen::Vector2cd chi(setup.a, setup.b);

    std::vector<OutcomeRecord> outcomes;
    outcomes.reserve(plan.conditional_ops.size());
    for (std::size_t m = 0; m < plan.conditional_ops.size(); ++m) {
        Eigen::Vector2cd v = plan.conditional_ops[m] * chi;
        double p = v.squaredNorm();
        if (p < kNullTol) {
            outcomes.push_back(
                {static_cast<int>(m), 0.0, maximally_mixed_qubit(), plan.corrections[m], 0.0});
            continue;
        }
        Eigen::Vector2cd bob = v / std::sqrt(p);
        DensityMatrix bob_state(1, bob * bob.adjoint());
        Eigen::Vector2cd corrected = plan.corrections[m] * bob;
        double fid = std::norm(chi.dot(corrected));
        outcomes.push_back({static_cast<int>(m), p, std::move(bob_state), plan.corrections[m], fid});
    }
    return finalize_report(std::move(outcomes));
}

ProtocolReport run_teleport_mixed(const DensityMatrix& channel, const TeleportPlan& plan,
                                  Complex a, Complex b) {
    check_input(a, b);
    int n = channel.n_qubits;
    Eigen::Index alice_dim = Eigen::Index{1} << n;
    if (plan.basis.vectors.empty() || plan.basis.vectors.front().size() != alice_dim)
        throw ArgumentError("plan dimension does not match channel");

    // rho_joint = |chi><chi| (x) rho_channel, addressed as (alice, bob) pairs
    Eigen::Vector2cd chi(a, b);
    Eigen::Matrix2cd rho_in = chi * chi.adjoint();
    BobSplit split = make_split(n, plan.bob_site);
    std::uint64_t x_mask = std::uint64_t{1} << (n - 1);

    // gather channel index split once
    std::vector<Eigen::Index> rest_of(channel.dim()), bob_of(channel.dim());
    for (std::uint64_t j = 0; j < static_cast<std::uint64_t>(channel.dim()); ++j) {
        rest_of[j] = static_cast<Eigen::Index>(split.rest(j));
        bob_of[j] = split.bob(j);
    }

    std::vector<OutcomeRecord> outcomes;
    outcomes.reserve(plan.basis.vectors.size());
    for (std::size_t m = 0; m < plan.basis.vectors.size(); ++m) {
        const Vec& u = plan.basis.vectors[m];
        // B(bq, bq') = sum over alice indices of u* u rho_joint; accumulate via
        // the two input-qubit blocks of u
        Eigen::Matrix2cd bob_block = Eigen::Matrix2cd::Zero();
        // w[x][rest] = u component; overlap vectors per bob bit:
        // t_b[x] = sum_rest conj(u[(x,rest)]) rho_channel[(rest,b), :] folded with rho_in
        // Work with the contraction s(b) = sum_j conj(u[alice(x, rest_j)]) ... done directly:
        for (int x1 = 0; x1 < 2; ++x1)
            for (int x2 = 0; x2 < 2; ++x2) {
                if (rho_in(x1, x2) == Complex{0, 0}) continue;
                // channel part: M(b1,b2) = sum_{j1,j2} conj(u[rest1|x1]) rho_ch(j1,j2) u[rest2|x2]
                Eigen::Matrix2cd part = Eigen::Matrix2cd::Zero();
                for (std::uint64_t j1 = 0; j1 < static_cast<std::uint64_t>(channel.dim()); ++j1) {
                    Complex uc = std::conj(u[rest_of[j1] | (x1 ? x_mask : 0)]);
                    if (uc == Complex{0, 0}) continue;
                    for (std::uint64_t j2 = 0; j2 < static_cast<std::uint64_t>(channel.dim()); ++j2) {
                        Complex val = channel.matrix(static_cast<Eigen::Index>(j1),
                                                     static_cast<Eigen::Index>(j2));
                        if (val == Complex{0, 0}) continue;
                        part(bob_of[j1], bob_of[j2]) +=
                            uc * val * u[rest_of[j2] | (x2 ? x_mask : 0)];
                    }
                }
                bob_block += rho_in(x1, x2) * part;
            }
        double p = bob_block.trace().real();
        const Eigen::Matrix2cd& correction =
            m < plan.corrections.size() ? plan.corrections[m] : Eigen::Matrix2cd::Identity();
        if (p < kNullTol) {
            outcomes.push_back({static_cast<int>(m), std::max(p, 0.0), maximally_mixed_qubit(),
                                correction, 0.0});
            continue;
        }
        Eigen::Matrix2cd bob_state = bob_block / p;
        Eigen::Matrix2cd corrected = correction * bob_state * correction.adjoint();
        double fid = (chi.adjoint() * corrected * chi)(0, 0).real();
        outcomes.push_back(
            {static_cast<int>(m), p, DensityMatrix(1, std::move(bob_state)), correction, fid});
    }
    return finalize_report(std::move(outcomes));
}

double average_fidelity(const PureState& channel, int bob_site) {
    auto inputs = axial_inputs();
    double acc = 0;
    for (std::size_t k = 0; k < inputs.size(); k += 2)
        acc += run_teleport({channel, bob_site, inputs[k], inputs[k + 1]}).average_fidelity;
    return acc / 6.0;
}

double average_fidelity(const DensityMatrix& channel, const TeleportPlan& plan) {
    auto inputs = axial_inputs();
    double acc = 0;
    for (std::size_t k = 0; k < inputs.size(); k += 2)
        acc += run_teleport_mixed(channel, plan, inputs[k], inputs[k + 1]).average_fidelity;
    return acc / 6.0;
}

double average_fidelity_monte_carlo(const PureState& channel, int bob_site, int samples,
                                    std::uint64_t seed) {
    if (samples < 1) throw ArgumentError("sample count must be >= 1");
    std::mt19937_64 rng(seed);
    double acc = 0;
    for (int k = 0; k < samples; ++k) {
        auto [a, b] = haar_input(rng);
        acc += run_teleport({channel, bob_site, a, b}).average_fidelity;
    }
    return acc / samples;
}

double average_fidelity_monte_carlo(const DensityMatrix& channel, const TeleportPlan& plan,
                                    int samples, std::uint64_t seed) {
    if (samples < 1) throw ArgumentError("sample count must be >= 1");
    std::mt19937_64 rng(seed);
    double acc = 0;
    for (int k = 0; k < samples; ++k) {
        auto [a, b] = haar_input(rng);
        acc += run_teleport_mixed(channel, plan, a, b).average_fidelity;
    }
    return acc / samples;
}

ChannelAnalysis analyze_channel(const PureState& channel, int bob_site) {
    ChannelAnalysis analysis;
    MeasurementBasis basis;
    try {
        basis = build_measurement_basis(xi_decompose(channel, bob_site));
    } catch (const std::runtime_error&) {
        analysis.verdict = ChannelVerdict::broken;
        return analysis;
    }
    analysis.conditional_ops = conditional_operators(channel, bob_site, basis);

    bool all_unitary = true, any_rank_deficient = false;
    for (const auto& t : analysis.conditional_ops) {
        Eigen::JacobiSVD<Eigen::Matrix2cd> svd(t);
        double s1 = svd.singularValues()[0], s2 = svd.singularValues()[1];
        analysis.singular_values.emplace_back(s1, s2);
        if (s1 < kPerfectTol) continue;  // null outcome
        if (s1 - s2 > kPerfectTol) all_unitary = false;
        if (s2 < kPerfectTol) any_rank_deficient = true;
    }
    analysis.verdict = all_unitary          ? ChannelVerdict::perfect
                       : any_rank_deficient ? ChannelVerdict::broken
                                            : ChannelVerdict::probabilistic;
    return analysis;
}

// ---------------------------------------------------------------------------
// Brute-force oracle. Deliberately re-derives everything with its own
// arithmetic: explicit joint vector, dense permutation-free projectors,
// Gram-Schmidt basis completion, closed-form 2x2 polar decomposition.
// ---------------------------------------------------------------------------

namespace {

// sqrt of a 2x2 Hermitian psd matrix: sqrt(M) = (M + sqrt(det) I) / sqrt(tr + 2 sqrt(det))
Eigen::Matrix2cd hermitian_sqrt(const Eigen::Matrix2cd& m) {
    double det = std::max(0.0, (m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0)).real());
    double sq = std::sqrt(det);
    double denom = std::sqrt(std::max(m.trace().real() + 2.0 * sq, 0.0));
    if (denom < 1e-300) return Eigen::Matrix2cd::Zero();
    return (m + sq * Eigen::Matrix2cd::Identity()) / denom;
}

Eigen::Matrix2cd brute_polar_unitary(const Eigen::Matrix2cd& t) {
    Eigen::Matrix2cd p = hermitian_sqrt(t.adjoint() * t);
    double det_p = std::abs((p(0, 0) * p(1, 1) - p(0, 1) * p(1, 0)).real());
    if (det_p < 1e-24) return Eigen::Matrix2cd::Identity();  // rank-deficient: no unique factor
    return t * p.inverse();
}

}  // namespace

ProtocolReport brute_force_teleport(const TeleportSetup& setup) {
    int n = setup.channel.n_qubits;
    if (n > 6) throw CapacityError("brute-force oracle capped at 6 channel qubits");
    check_input(setup.a, setup.b);

    int n_tot = n + 1;                       // input qubit + channel
    std::size_t dim_tot = std::size_t{1} << n_tot;
    std::size_t dim_ch = std::size_t{1} << n;
    std::size_t dim_alice = dim_ch;  // 2^n

    // joint state via digit arithmetic (input qubit = most significant digit)
    Vec joint = Vec::Zero(static_cast<Eigen::Index>(dim_tot));
    for (std::size_t x = 0; x < 2; ++x) {
        Complex amp = x == 0 ? setup.a : setup.b;
        for (std::size_t j = 0; j < dim_ch; ++j)
            joint[static_cast<Eigen::Index>(x * dim_ch + j)] =
                amp * setup.channel.amplitudes[static_cast<Eigen::Index>(j)];
    }

    // alice index of a joint index: remove bob's digit from the channel part
    int bob_place = n - setup.bob_site;  // digit position, 0 = least significant
    auto alice_of = [&](std::size_t big) {
        std::size_t x = big / dim_ch;
        std::size_t ch = big % dim_ch;
        std::size_t high = ch / (std::size_t{1} << (bob_place + 1));
        std::size_t low = ch % (std::size_t{1} << bob_place);
        return x * (dim_ch / 2) + high * (std::size_t{1} << bob_place) + low;
    };
    auto bob_of = [&](std::size_t big) { return big % dim_ch / (std::size_t{1} << bob_place) % 2; };

    // xi vectors from scratch
    Vec xi1 = Vec::Zero(static_cast<Eigen::Index>(dim_alice)),
        xi2 = xi1, xi3 = xi1, xi4 = xi1;
    for (std::size_t j = 0; j < dim_ch; ++j) {
        std::size_t big0 = j;  // x digit = 0
        Complex c = setup.channel.amplitudes[static_cast<Eigen::Index>(j)];
        std::size_t a_low = alice_of(big0);            // x=0 half
        std::size_t a_high = a_low + dim_alice / 2;    // x=1 half
        if (bob_of(big0) == 0) {
            xi1[static_cast<Eigen::Index>(a_low)] += c;
            xi3[static_cast<Eigen::Index>(a_high)] += c;
        } else {
            xi2[static_cast<Eigen::Index>(a_low)] += c;
            xi4[static_cast<Eigen::Index>(a_high)] += c;
        }
    }
    double n1 = xi1.norm(), n4 = xi4.norm();
    if (n1 < kNullTol || n4 < kNullTol) throw ProtocolError("degenerate channel");
    if (std::abs(xi1.dot(xi2)) > 1e-10)
        throw DecompositionError("Bob branches are not orthogonal");

    std::vector<Vec> basis = {(xi1 / n1 + xi4 / n4) / std::sqrt(2.0),
                              (xi1 / n1 - xi4 / n4) / std::sqrt(2.0),
                              (xi2 / n4 + xi3 / n1) / std::sqrt(2.0),
                              (xi2 / n4 - xi3 / n1) / std::sqrt(2.0)};
    // Gram-Schmidt completion over injected computational vectors
    for (std::size_t cand = 0; cand < dim_alice && basis.size() < dim_alice; ++cand) {
        Vec v = Vec::Zero(static_cast<Eigen::Index>(dim_alice));
        v[static_cast<Eigen::Index>(cand)] = 1.0;
        for (const Vec& b : basis) v -= b * b.dot(v);
        double nv = v.norm();
        if (nv > 1e-6) basis.push_back(v / nv);
    }
    if (basis.size() != dim_alice) throw ProtocolError("basis completion failed");

    // frozen corrections from the ideal channel: conditional operator columns
    // are the responses to basis inputs
    std::vector<Eigen::Matrix2cd> corrections(dim_alice);
    std::vector<Eigen::Matrix2cd> t_ops(dim_alice);
    for (std::size_t m = 0; m < dim_alice; ++m) {
        Eigen::Matrix2cd t = Eigen::Matrix2cd::Zero();
        for (std::size_t big = 0; big < dim_tot; ++big) {
            std::size_t x = big / dim_ch;
            Complex c = setup.channel.amplitudes[static_cast<Eigen::Index>(big % dim_ch)];
            if (c == Complex{0, 0}) continue;
            t(static_cast<Eigen::Index>(bob_of(big)), static_cast<Eigen::Index>(x)) +=
                std::conj(basis[m][static_cast<Eigen::Index>(alice_of(big))]) * c;
        }
        t_ops[m] = t;
        corrections[m] = t.norm() < kNullTol ? Eigen::Matrix2cd::Identity()
                                             : Eigen::Matrix2cd(brute_polar_unitary(t).adjoint());
    }

    // exhaustive outcome enumeration with dense projectors
    Eigen::Vector2cd chi(setup.a, setup.b);
    std::vector<OutcomeRecord> outcomes;
    for (std::size_t m = 0; m < dim_alice; ++m) {
        // P|psi> where P = |u><u| (x) I_bob, expressed directly in joint indices
        Vec projected = Vec::Zero(static_cast<Eigen::Index>(dim_tot));
        for (int bb = 0; bb < 2; ++bb) {
            Complex overlap = 0;
            for (std::size_t big = 0; big < dim_tot; ++big)
                if (bob_of(big) == static_cast<std::size_t>(bb))
                    overlap += std::conj(basis[m][static_cast<Eigen::Index>(alice_of(big))]) *
                               joint[static_cast<Eigen::Index>(big)];
            if (overlap == Complex{0, 0}) continue;
            for (std::size_t big = 0; big < dim_tot; ++big)
                if (bob_of(big) == static_cast<std::size_t>(bb))
                    projected[static_cast<Eigen::Index>(big)] +=
                        basis[m][static_cast<Eigen::Index>(alice_of(big))] * overlap;
        }
        double p = projected.squaredNorm();
        if (p < kNullTol) {
            outcomes.push_back(
                {static_cast<int>(m), 0.0, maximally_mixed_qubit(), corrections[m], 0.0});
            continue;
        }
        // Bob's reduced state by explicit partial trace over Alice
        Eigen::Matrix2cd rb = Eigen::Matrix2cd::Zero();
        for (std::size_t b1 = 0; b1 < dim_tot; ++b1)
            for (std::size_t b2 = 0; b2 < dim_tot; ++b2)
                if (alice_of(b1) == alice_of(b2))
                    rb(static_cast<Eigen::Index>(bob_of(b1)), static_cast<Eigen::Index>(bob_of(b2))) +=
                        projected[static_cast<Eigen::Index>(b1)] *
                        std::conj(projected[static_cast<Eigen::Index>(b2)]);
        rb /= p;
        Eigen::Matrix2cd corrected = corrections[m] * rb * corrections[m].adjoint();
        double fid = (chi.adjoint() * corrected * chi)(0, 0).real();
        outcomes.push_back({static_cast<int>(m), p, DensityMatrix(1, rb), corrections[m], fid});
    }
    return finalize_report(std::move(outcomes));
}

}  // namespace qtel
