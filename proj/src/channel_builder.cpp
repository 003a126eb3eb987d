#include "qtel/channel_builder.hpp"

#include <bit>
#include <cmath>
#include <functional>
#include <numbers>

namespace qtel {

namespace {

void check_bob(int n_qubits, int bob_site) {
    if (bob_site < 1 || bob_site > n_qubits) throw ArgumentError("bob site outside register");
}

// Grid scan for sign changes refined by bisection; grazing zeros are caught
// by refining grid-local minima of |f| down to |f| < tolerance.
std::vector<double> scan_roots(const std::function<double(double)>& f, const RootSearch& s) {
    std::vector<double> roots;
    auto push = [&](double r) {
        if (!roots.empty() && std::abs(r - roots.back()) < 10 * s.grid_step &&
            std::abs(r - roots.back()) < 1e-6)
            return;  // duplicate from adjacent cells
        if (static_cast<int>(roots.size()) < s.max_roots) roots.push_back(r);
    };

    auto bisect = [&](double lo, double hi, double flo) {
        for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
            double mid = 0.5 * (lo + hi);
            double fm = f(mid);
            if (fm == 0.0) return mid;
            if ((fm < 0) == (flo < 0)) {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
        }
        return 0.5 * (lo + hi);
    };

    double prev_x = s.theta_lo;
    double prev_f = f(prev_x);
    double before_f = prev_f;  // f one cell earlier, for local-minimum detection
    for (double x = s.theta_lo + s.grid_step; x <= s.theta_hi + 0.5 * s.grid_step;
         x += s.grid_step) {
        double fx = f(std::min(x, s.theta_hi));
        if (prev_f == 0.0) {
            push(prev_x);
        } else if ((prev_f < 0) != (fx < 0)) {
            push(bisect(prev_x, std::min(x, s.theta_hi), prev_f));
        } else if (std::abs(prev_f) <= std::abs(before_f) && std::abs(prev_f) <= std::abs(fx) &&
                   std::abs(prev_f) < std::sqrt(s.tolerance)) {
            // grazing zero candidate: golden-section on |f| over the bracket
            double a = prev_x - s.grid_step, b = std::min(x, s.theta_hi);
            constexpr double inv_phi = 0.6180339887498949;
            double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
            for (int it = 0; it < 120 && b - a > 1e-12; ++it) {
                if (std::abs(f(c)) < std::abs(f(d))) {
                    b = d;
                } else {
                    a = c;
                }
                c = b - inv_phi * (b - a);
                d = a + inv_phi * (b - a);
            }
            double m = 0.5 * (a + b);
            if (std::abs(f(m)) < s.tolerance) push(m);
        }
        before_f = prev_f;
        prev_f = fx;
        prev_x = std::min(x, s.theta_hi);
    }
    if (prev_f == 0.0) push(prev_x);
    return roots;
}

}  // namespace

RootSearch::RootSearch(double lo, double hi, double step, double tol, int max)
    : theta_lo(lo), theta_hi(hi), grid_step(step), tolerance(tol), max_roots(max) {
    if (!(lo < hi)) throw ArgumentError("root search window must have theta_lo < theta_hi");
    if (!(step > 0)) throw ArgumentError("grid step must be positive");
    if (!(tol > 0)) throw ArgumentError("tolerance must be positive");
    if (max < 1) throw ArgumentError("max_roots must be >= 1");
}

ConditionReport one_magnon_condition(const MagnonAmplitudes& c, int bob_site, double tolerance) {
    check_bob(c.n_sites, bob_site);
    double bob_weight = std::norm(c.values[bob_site - 1]);
    double rest = 0;
    for (int i = 0; i < c.n_sites; ++i)
        if (i != bob_site - 1) rest += std::norm(c.values[i]);
    double residual = bob_weight - rest;
    return {residual, std::abs(residual) <= tolerance, tolerance};
}

PureState build_one_magnon_channel(int n_qubits, int bob_site, BranchSign sign, PhaseProfile profile,
                                   const std::vector<double>& phases) {
    if (n_qubits < 2) throw ArgumentError("channel needs at least 2 qubits");
    if (n_qubits > kMaxQubits) throw CapacityError("register exceeds dense cap");
    check_bob(n_qubits, bob_site);
    if (profile == PhaseProfile::explicit_list && static_cast<int>(phases.size()) != n_qubits)
        throw ArgumentError("explicit phase list must have one entry per site");

    Vec amps = Vec::Zero(Eigen::Index{1} << n_qubits);
    double rest_amp = 1.0 / std::sqrt(2.0 * (n_qubits - 1));
    for (int j = 1; j <= n_qubits; ++j) {
        if (j == bob_site) continue;
        double phi = 0.0;
        if (profile == PhaseProfile::fourier)
            phi = 2.0 * std::numbers::pi * j / n_qubits;
        else if (profile == PhaseProfile::explicit_list)
            phi = phases[j - 1];
        amps[Eigen::Index{1} << site_bit(n_qubits, j)] = rest_amp * std::exp(Complex{0, phi});
    }
    double bob_amp = (sign == BranchSign::plus ? 1.0 : -1.0) / std::sqrt(2.0);
    amps[Eigen::Index{1} << site_bit(n_qubits, bob_site)] = bob_amp;
    return PureState(n_qubits, std::move(amps));
}

PureState build_n_magnon_channel(int n_qubits, int magnons, int bob_site, BranchSign sign) {
    if (n_qubits < 2) throw ArgumentError("channel needs at least 2 qubits");
    if (n_qubits > kMaxQubits) throw CapacityError("register exceeds dense cap");
    check_bob(n_qubits, bob_site);
    if (magnons < 1 || magnons > n_qubits - 1)
        throw ArgumentError("magnon count must lie in [1, N-1]");

    std::vector<int> rest;
    for (int s = 1; s <= n_qubits; ++s)
        if (s != bob_site) rest.push_back(s);

    double binom = 1.0;  // C(N-1, n)
    for (int i = 0; i < magnons; ++i) binom = binom * (n_qubits - 1 - i) / (i + 1);
    double norm = 1.0 / std::sqrt(2.0 * binom);
    double branch_weight = std::sqrt(static_cast<double>(n_qubits - magnons) / magnons);
    double bob_branch = (sign == BranchSign::plus ? 1.0 : -1.0) * norm * branch_weight;

    Vec amps = Vec::Zero(Eigen::Index{1} << n_qubits);
    std::uint64_t bob_mask = std::uint64_t{1} << site_bit(n_qubits, bob_site);
    // enumerate subsets of the non-Bob sites by popcount
    for (std::uint64_t sel = 0; sel < (std::uint64_t{1} << rest.size()); ++sel) {
        std::uint64_t idx = 0;
        for (std::size_t q = 0; q < rest.size(); ++q)
            if (sel >> q & 1) idx |= std::uint64_t{1} << site_bit(n_qubits, rest[q]);
        int flips = std::popcount(sel);
        if (flips == magnons) amps[static_cast<Eigen::Index>(idx)] += norm;
        if (flips == magnons - 1) amps[static_cast<Eigen::Index>(idx | bob_mask)] += bob_branch;
    }
    return PureState(n_qubits, std::move(amps));
}

PureState build_channel(const ChannelSpec& spec) {
    if (spec.magnon_count == 1)
        return build_one_magnon_channel(spec.n_qubits, spec.bob_site, spec.sign, spec.profile,
                                        spec.phases);
    return build_n_magnon_channel(spec.n_qubits, spec.magnon_count, spec.bob_site, spec.sign);
}

PureState build_w_like() {
    Vec amps = Vec::Zero(8);
    amps[4] = amps[2] = amps[1] = amps[7] = 0.5;  // |100>,|010>,|001>,|111>
    return PureState(3, std::move(amps));
}

PureState build_ghz(int n_qubits) {
    if (n_qubits < 2) throw ArgumentError("GHZ needs at least 2 qubits");
    if (n_qubits > kMaxQubits) throw CapacityError("register exceeds dense cap");
    Vec amps = Vec::Zero(Eigen::Index{1} << n_qubits);
    amps[0] = amps[amps.size() - 1] = 1.0 / std::sqrt(2.0);
    return PureState(n_qubits, std::move(amps));
}

double tri_condition_lhs(double theta, double delta) {
    if (!(delta >= 0.0 && delta <= 1.0)) throw ArgumentError("delta must lie in [0, 1]");
    return 3.0 * std::cos(theta * (1.0 + 2.0 * delta) / 2.0) + std::cos(1.5 * theta) +
           1.5 * std::cos((1.0 - delta) * theta) - 1.0;
}

double ring_condition_lhs(int n_sites, double theta) {
    return 2.0 * std::norm(ring_alpha1(n_sites, theta)) - 1.0;
}

std::vector<double> solve_tri_times(double delta, const RootSearch& search) {
    if (!(delta >= 0.0 && delta <= 1.0)) throw ArgumentError("delta must lie in [0, 1]");
    return scan_roots([delta](double th) { return tri_condition_lhs(th, delta); }, search);
}

std::vector<double> solve_ring_times(int n_sites, const RootSearch& search) {
    if (n_sites == kRingInfinity)
        return scan_roots(
            [](double th) {
                double j0 = bessel_j0(th);
                return j0 * j0 - 0.5;
            },
            search);
    if (n_sites < 2) throw ArgumentError("ring needs at least 2 sites");
    return scan_roots([n_sites](double th) { return ring_condition_lhs(n_sites, th); }, search);
}

double closed_form_tau(int period_index) {
    if (period_index < 0) throw ArgumentError("period index must be >= 0");
    return (2.0 / 3.0) * (2.0 * std::numbers::pi * period_index + std::acos(-0.125));
}

std::optional<double> ring_revival_time(int n_sites, double theta_hi, double excess, double step) {
    if (n_sites < 2) throw ArgumentError("ring needs at least 2 sites");
    if (!(theta_hi > 0) || !(step > 0) || !(excess > 0)) throw ArgumentError("invalid revival scan");
    // start past the first switch-off root so the initial decay is excluded
    RootSearch first(1e-9, 2.5, 0.005);
    auto roots = solve_ring_times(n_sites, first);
    double start = roots.empty() ? 1.2 : roots.front() + step;
    for (double th = start; th <= theta_hi; th += step) {
        // J0 evaluated without the 50-unit interface cap: the scan legitimately
        // passes theta ~ N for large rings
        double j0 = std::cyl_bessel_j(0.0, th);
        if (std::norm(ring_alpha1(n_sites, th)) > j0 * j0 + excess) return th;
    }
    return std::nullopt;
}

}  // namespace qtel
