// qtel — command-line front end: builds channels, solves switch-off times,
// runs the teleportation protocol and decoherence sweeps, and emits
// figure-reproduction data as CSV/JSON.
//
// Exit codes: 0 success, 1 argument error, 2 no solution in window,
// 3 I/O or format error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qtel/channel_builder.hpp"
#include "qtel/channel_io.hpp"
#include "qtel/magnon_dynamics.hpp"
#include "qtel/spin_bath.hpp"
#include "qtel/teleport_protocol.hpp"

namespace {

using nlohmann::json;

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

struct Window {
    double lo = 0.0, hi = 20.0;
};

Window parse_window(const std::string& text) {
    Window w;
    char colon;
    std::istringstream in(text);
    if (!(in >> w.lo >> colon >> w.hi) || colon != ':' || !(w.lo < w.hi))
        throw qtel::ArgumentError("window must be 'lo:hi' with lo < hi");
    return w;
}

// ring size or the 'inf' sentinel
int parse_ring_size(const std::string& text) {
    if (text == "inf") return qtel::kRingInfinity;
    try {
        std::size_t pos = 0;
        int n = std::stoi(text, &pos);
        if (pos != text.size()) throw std::invalid_argument(text);
        return n;
    } catch (const std::exception&) {
        throw qtel::ArgumentError("ring size must be an integer or 'inf'");
    }
}

std::vector<double> make_grid(const Window& w, double step) {
    if (!(step > 0)) throw qtel::ArgumentError("step must be positive");
    std::vector<double> grid;
    for (double x = w.lo; x <= w.hi + 0.5 * step; x += step) grid.push_back(std::min(x, w.hi));
    if (!grid.empty() && grid.back() < w.hi - 1e-12) grid.push_back(w.hi);
    return grid;
}

// Evaluates fn over [0, n) with results gathered in index order.
template <typename Fn>
void for_each_index(std::size_t n, bool parallel, Fn&& fn) {
    if (!parallel || n < 2) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    unsigned workers = std::max(1u, std::thread::hardware_concurrency());
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < n; i += workers) fn(i);
        });
    for (auto& th : pool) th.join();
}

void write_output(const std::string& out_path, const std::string& content) {
    if (out_path.empty()) {
        std::cout << content;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw qtel::FormatError("cannot open '" + out_path + "' for writing");
    out << content;
    if (!out) throw qtel::FormatError("write to '" + out_path + "' failed");
}

std::pair<qtel::Complex, qtel::Complex> parse_input_amplitudes(const std::string& text) {
    std::vector<double> vals;
    std::istringstream in(text);
    std::string tok;
    while (std::getline(in, tok, ',')) {
        try {
            vals.push_back(std::stod(tok));
        } catch (const std::exception&) {
            throw qtel::ArgumentError("--input expects comma-separated reals");
        }
    }
    qtel::Complex a, b;
    if (vals.size() == 2) {
        a = vals[0];
        b = vals[1];
    } else if (vals.size() == 4) {
        a = {vals[0], vals[1]};
        b = {vals[2], vals[3]};
    } else {
        throw qtel::ArgumentError("--input expects 'a,b' or 'a_re,a_im,b_re,b_im'");
    }
    double nrm = std::sqrt(std::norm(a) + std::norm(b));
    if (std::abs(nrm - 1.0) > 1e-9) throw qtel::ArgumentError("input state is not normalized");
    return {a / nrm, b / nrm};
}

// ---- subcommands -----------------------------------------------------------

int cmd_solve_times(bool tri, double delta, const std::string& ring_n, const Window& w, double step,
                    const std::string& out_path) {
    qtel::RootSearch search(w.lo, w.hi, step);
    std::vector<double> roots;
    if (tri)
        roots = qtel::solve_tri_times(delta, search);
    else
        roots = qtel::solve_ring_times(parse_ring_size(ring_n), search);

    std::ostringstream text;
    text << "# qtel solve-times v1\n";
    text << "# columns: root_theta,residual\n";
    for (double r : roots) {
        double resid;
        if (tri)
            resid = qtel::tri_condition_lhs(r, delta);
        else if (ring_n == "inf")
            resid = qtel::bessel_j0(r) * qtel::bessel_j0(r) - 0.5;
        else
            resid = qtel::ring_condition_lhs(parse_ring_size(ring_n), r);
        text << fmt(r) << "," << fmt(resid) << "\n";
    }
    write_output(out_path, text.str());
    return roots.empty() ? 2 : 0;
}

int cmd_fig2(const std::vector<double>& deltas, const Window& w, double step,
             const std::string& out_path, bool parallel) {
    auto grid = make_grid(w, step);
    std::ostringstream header;
    header << "# qtel fig2 v1: lhs of the 3-qubit switch-off condition "
              "3cos(th(1+2d)/2)+cos(3th/2)+(3/2)cos((1-d)th)-1\n";
    header << "# columns: theta";
    for (double d : deltas) header << ",lhs_delta_" << fmt(d);
    header << "\n";

    std::vector<std::string> rows(grid.size());
    for_each_index(grid.size(), parallel, [&](std::size_t i) {
        std::ostringstream row;
        row << fmt(grid[i]);
        for (double d : deltas) row << "," << fmt(qtel::tri_condition_lhs(grid[i], d));
        row << "\n";
        rows[i] = row.str();
    });
    std::string text = header.str();
    for (const auto& r : rows) text += r;
    write_output(out_path, text);
    return 0;
}

int cmd_fig3(const std::vector<std::string>& sizes, const Window& w, double step,
             const std::string& out_path, bool parallel) {
    auto grid = make_grid(w, step);
    std::vector<int> ns;
    for (const auto& s : sizes) ns.push_back(parse_ring_size(s));

    std::ostringstream header;
    header << "# qtel fig3 v1: ring switch-off condition 2|alpha_1(theta)|^2 - 1 per ring size "
              "(inf = Bessel limit 2 J0(theta)^2 - 1)\n";
    header << "# columns: theta";
    for (const auto& s : sizes) header << ",lhs_n_" << s;
    header << "\n";

    std::vector<std::string> rows(grid.size());
    for_each_index(grid.size(), parallel, [&](std::size_t i) {
        std::ostringstream row;
        row << fmt(grid[i]);
        for (int n : ns) {
            double v = n == qtel::kRingInfinity ? 2.0 * qtel::alpha1_large_n(grid[i]) - 1.0
                                                : qtel::ring_condition_lhs(n, grid[i]);
            row << "," << fmt(v);
        }
        row << "\n";
        rows[i] = row.str();
    });
    std::string text = header.str();
    for (const auto& r : rows) text += r;
    write_output(out_path, text);
    return 0;
}

int cmd_build_channel(int n, int magnons, int bob, const std::string& sign,
                      const std::string& profile, const std::string& out_path) {
    if (sign != "+" && sign != "-") throw qtel::ArgumentError("--sign must be '+' or '-'");
    qtel::ChannelSpec spec;
    spec.n_qubits = n;
    spec.magnon_count = magnons;
    spec.bob_site = bob;
    spec.sign = sign == "-" ? qtel::BranchSign::minus : qtel::BranchSign::plus;
    if (profile == "fourier")
        spec.profile = qtel::PhaseProfile::fourier;
    else if (profile == "uniform")
        spec.profile = qtel::PhaseProfile::uniform;
    else
        throw qtel::ArgumentError("--profile must be 'fourier' or 'uniform'");
    std::string text = qtel::channel_to_json(qtel::build_channel(spec), bob);
    write_output(out_path, text);
    return 0;
}

int cmd_teleport(const std::string& channel_path, const std::string& input,
                 int random_count, std::uint64_t seed, const std::string& out_path) {
    qtel::ChannelFile file = qtel::read_channel_file(channel_path);
    qtel::ChannelAnalysis analysis = qtel::analyze_channel(file.state, file.bob_qubit);

    std::vector<std::pair<qtel::Complex, qtel::Complex>> inputs;
    if (!input.empty()) inputs.push_back(parse_input_amplitudes(input));
    if (random_count > 0) {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> g;
        for (int k = 0; k < random_count; ++k) {
            qtel::Complex a{g(rng), g(rng)}, b{g(rng), g(rng)};
            double nrm = std::sqrt(std::norm(a) + std::norm(b));
            inputs.emplace_back(a / nrm, b / nrm);
        }
    }
    if (inputs.empty()) throw qtel::ArgumentError("provide --input or --random");

    json runs = json::array();
    double mean_fid = 0;
    for (auto [a, b] : inputs) {
        qtel::ProtocolReport rep = qtel::run_teleport({file.state, file.bob_qubit, a, b});
        json outs = json::array();
        for (const auto& rec : rep.outcomes) {
            if (rec.probability <= 1e-12) continue;
            outs.push_back({{"index", rec.index},
                            {"probability", rec.probability},
                            {"fidelity", rec.fidelity_after_correction}});
        }
        runs.push_back({{"a_re", a.real()},
                        {"a_im", a.imag()},
                        {"b_re", b.real()},
                        {"b_im", b.imag()},
                        {"average_fidelity", rep.average_fidelity},
                        {"success_probability", rep.success_probability},
                        {"outcomes", std::move(outs)}});
        mean_fid += rep.average_fidelity;
    }
    mean_fid /= static_cast<double>(inputs.size());

    const char* verdict = analysis.verdict == qtel::ChannelVerdict::perfect ? "perfect"
                          : analysis.verdict == qtel::ChannelVerdict::probabilistic
                              ? "probabilistic"
                              : "broken";
    json doc = {{"channel", channel_path},
                {"n_qubits", file.state.n_qubits},
                {"bob_qubit", file.bob_qubit},
                {"verdict", verdict},
                {"average_fidelity", mean_fid},
                {"six_state_average_fidelity", qtel::average_fidelity(file.state, file.bob_qubit)},
                {"runs", std::move(runs)}};
    write_output(out_path, doc.dump(2) + "\n");
    return 0;
}

int cmd_decohere(const std::string& channel_path, const std::vector<double>& taus, const Window& w,
                 double step, bool compare_ghz, const std::string& out_path, bool parallel) {
    qtel::ChannelFile file = qtel::read_channel_file(channel_path);
    if (static_cast<int>(taus.size()) != file.state.n_qubits)
        throw qtel::ArgumentError("--tau needs one value per channel qubit");
    qtel::BathSpec bath{taus};
    auto grid = make_grid(w, step);

    qtel::TeleportPlan plan = qtel::make_teleport_plan(file.state, file.bob_qubit);
    qtel::CorrelatorTable table = qtel::pauli_expand(qtel::density_from_pure(file.state));
    std::vector<double> fid(grid.size());
    for_each_index(grid.size(), parallel, [&](std::size_t i) {
        fid[i] = qtel::average_fidelity(qtel::decohere(table, bath, grid[i]), plan);
    });

    std::vector<double> ghz_fid;
    if (compare_ghz) {
        qtel::PureState ghz = qtel::build_ghz(file.state.n_qubits);
        qtel::TeleportPlan ghz_plan = qtel::make_teleport_plan(ghz, file.bob_qubit);
        qtel::CorrelatorTable ghz_table = qtel::pauli_expand(qtel::density_from_pure(ghz));
        ghz_fid.resize(grid.size());
        for_each_index(grid.size(), parallel, [&](std::size_t i) {
            ghz_fid[i] = qtel::average_fidelity(qtel::decohere(ghz_table, bath, grid[i]), ghz_plan);
        });
    }

    std::ostringstream text;
    text << "# qtel decohere v1: six-state average teleport fidelity under per-site envelope decay\n";
    text << "# columns: t,fidelity" << (compare_ghz ? ",ghz_fidelity" : "") << "\n";
    std::optional<double> crossing;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        text << fmt(grid[i]) << "," << fmt(fid[i]);
        if (compare_ghz) {
            text << "," << fmt(ghz_fid[i]);
            if (!crossing && fid[i] > ghz_fid[i] + 1e-12) crossing = grid[i];
        }
        text << "\n";
    }
    if (compare_ghz)
        text << "# first_crossing: " << (crossing ? fmt(*crossing) : std::string("none")) << "\n";
    write_output(out_path, text.str());
    return 0;
}

int cmd_evolve(int n, double delta, double theta, const std::string& out_path) {
    qtel::MagnonAmplitudes amps =
        n == 3 ? qtel::tri_evolve(theta, delta) : qtel::ring_evolve(n, theta);
    double residual =
        n == 3 ? qtel::tri_condition_lhs(theta, delta) : qtel::ring_condition_lhs(n, theta);

    json alphas = json::array();
    for (int site = 0; site < amps.n_sites; ++site) {
        qtel::Complex v = amps.values[site];
        alphas.push_back({{"site", site + 1},
                          {"re", v.real()},
                          {"im", v.imag()},
                          {"modulus_sq", std::norm(v)},
                          {"phase", std::arg(v)}});
    }
    json doc = {{"n", n},
                {"theta", theta},
                {"condition_residual", residual},
                {"alphas", std::move(alphas)}};
    if (n == 3) {
        doc["delta"] = delta;
        // the printed final-state phases of the closed chain, for comparison;
        // they do not match the computed amplitudes under any global-phase
        // convention, so the computed values above are authoritative
        double ref1 = std::atan(-std::sqrt(2.0));
        double ref2 = std::atan(std::sqrt(2.0) / 3.0);
        double computed_rel = std::arg(amps.values[0]) - std::arg(amps.values[1]);
        double ref_rel = ref1 - ref2;
        double diff = std::remainder(computed_rel - ref_rel, 2.0 * std::numbers::pi);
        doc["reference_phase_1"] = ref1;
        doc["reference_phase_2"] = ref2;
        doc["reference_phases_match"] = std::abs(diff) < 1e-6;
    }
    write_output(out_path, doc.dump(2) + "\n");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"magnon teleportation-channel toolkit"};
    app.require_subcommand(1);

    // solve-times
    auto* solve = app.add_subcommand("solve-times", "roots of the switch-off conditions");
    bool tri = false, ring = false;
    double delta = 1.0, step = 0.01;
    std::string ring_n = "3", window_text = "0:20", out_path;
    solve->add_flag("--tri", tri, "3-qubit Delta-chain condition");
    solve->add_flag("--ring", ring, "N-site ring condition");
    solve->add_option("--delta", delta, "chain asymmetry in [0,1]");
    solve->add_option("--n", ring_n, "ring size (integer or 'inf')");
    solve->add_option("--window", window_text, "theta window lo:hi");
    solve->add_option("--step", step, "scan step");
    solve->add_option("--out", out_path, "output file (default stdout)");

    // fig2
    auto* fig2 = app.add_subcommand("fig2", "switch-off condition curves over Delta");
    std::vector<double> deltas{1.0, 0.75, 0.5, 0.25, 0.0};
    std::string f2_window = "0:20", f2_out;
    double f2_step = 0.01;
    bool f2_parallel = false;
    fig2->add_option("--delta", deltas, "Delta values (one column each)")->delimiter(',');
    fig2->add_option("--window", f2_window, "theta window lo:hi");
    fig2->add_option("--step", f2_step, "grid step");
    fig2->add_option("--out", f2_out, "output CSV (default stdout)");
    fig2->add_flag("--parallel", f2_parallel, "evaluate grid points concurrently");

    // fig3
    auto* fig3 = app.add_subcommand("fig3", "ring condition curves over N");
    std::vector<std::string> sizes{"3", "10", "50", "500"};
    std::string f3_window = "0:20", f3_out;
    double f3_step = 0.01;
    bool f3_parallel = false;
    fig3->add_option("--n", sizes, "ring sizes (integers or 'inf')")->delimiter(',');
    fig3->add_option("--window", f3_window, "theta window lo:hi");
    fig3->add_option("--step", f3_step, "grid step");
    fig3->add_option("--out", f3_out, "output CSV (default stdout)");
    fig3->add_flag("--parallel", f3_parallel, "evaluate grid points concurrently");

    // build-channel
    auto* build = app.add_subcommand("build-channel", "write a teleportation channel file");
    int bc_n = 3, bc_magnons = 1, bc_bob = 1;
    std::string bc_sign = "+", bc_profile = "fourier", bc_out;
    build->add_option("--n", bc_n, "qubit count")->required();
    build->add_option("--magnons", bc_magnons, "magnon number (default 1)");
    build->add_option("--bob", bc_bob, "Bob's site")->required();
    build->add_option("--sign", bc_sign, "branch sign + or -");
    build->add_option("--profile", bc_profile, "phase profile: fourier | uniform");
    build->add_option("--out", bc_out, "output file (default stdout)");

    // teleport
    auto* tele = app.add_subcommand("teleport", "run the protocol through a channel file");
    std::string t_channel, t_input, t_out;
    int t_random = 0;
    std::uint64_t t_seed = 0;
    tele->add_option("channel", t_channel, "channel JSON file")->required();
    tele->add_option("--input", t_input, "input amplitudes 'a,b' or 'a_re,a_im,b_re,b_im'");
    tele->add_option("--random", t_random, "number of Haar-random inputs");
    tele->add_option("--seed", t_seed, "random seed");
    tele->add_option("--out", t_out, "output JSON (default stdout)");

    // decohere
    auto* dec = app.add_subcommand("decohere", "fidelity-versus-time under a nuclear bath");
    std::string d_channel, d_window = "0:5", d_out;
    std::vector<double> d_taus;
    double d_step = 0.1;
    bool d_compare = false, d_parallel = false;
    dec->add_option("channel", d_channel, "channel JSON file")->required();
    dec->add_option("--tau", d_taus, "per-site bath time constants")->required()->delimiter(',');
    dec->add_option("--window", d_window, "time window lo:hi");
    dec->add_option("--step", d_step, "time step");
    dec->add_flag("--compare-ghz", d_compare, "add a GHZ channel column");
    dec->add_option("--out", d_out, "output CSV (default stdout)");
    dec->add_flag("--parallel", d_parallel, "evaluate grid points concurrently");

    // evolve
    auto* evo = app.add_subcommand("evolve", "one-magnon amplitudes at a given time");
    int e_n = 3;
    double e_delta = 1.0, e_theta = 0.0;
    std::string e_out;
    evo->add_option("--n", e_n, "site count")->required();
    evo->add_option("--delta", e_delta, "chain asymmetry (3-qubit chain only)");
    evo->add_option("--theta", e_theta, "dimensionless time J*t")->required();
    evo->add_option("--out", e_out, "output JSON (default stdout)");

    try {
        app.parse(argc, argv);
        if (solve->parsed()) {
            if (tri == ring) throw qtel::ArgumentError("choose exactly one of --tri / --ring");
            return cmd_solve_times(tri, delta, ring_n, parse_window(window_text), step, out_path);
        }
        if (fig2->parsed())
            return cmd_fig2(deltas, parse_window(f2_window), f2_step, f2_out, f2_parallel);
        if (fig3->parsed())
            return cmd_fig3(sizes, parse_window(f3_window), f3_step, f3_out, f3_parallel);
        if (build->parsed())
            return cmd_build_channel(bc_n, bc_magnons, bc_bob, bc_sign, bc_profile, bc_out);
        if (tele->parsed()) return cmd_teleport(t_channel, t_input, t_random, t_seed, t_out);
        if (dec->parsed())
            return cmd_decohere(d_channel, d_taus, parse_window(d_window), d_step, d_compare, d_out,
                                d_parallel);
        if (evo->parsed()) return cmd_evolve(e_n, e_delta, e_theta, e_out);
        return 1;
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const qtel::FormatError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
