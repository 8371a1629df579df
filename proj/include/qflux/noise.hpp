// noise.hpp - quasi-static Gaussian control noise: averaged fidelities and
// quantum channels.
//
// Noise enters as constant shifts of the flux baselines and of the bias-pulse
// timing, drawn from zero-mean Gaussians.  Ensemble averages use Gauss-Hermite
// quadrature (probabilists' scaling); a seeded Monte-Carlo path provides an
// independent oracle for the same channel.  The averaged map is assembled as
// a Choi matrix from frame-corrected computational blocks, with leakage
// appearing as trace loss, and factored into Kraus elements with a fixed
// phase gauge.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "qflux/gates.hpp"

namespace qflux::noise {





// ---------------------------------------------------------------------------
// Gauss-Hermite quadrature scaled to a physical sigma: nodes and weights such
// that sum_i w_i f(s_i) approximates E[f(X)] for X ~ N(0, sigma^2).

struct Quadrature {
    Eigen::VectorXd shifts;
    Eigen::VectorXd weights;
};

inline Quadrature gauss_hermite(int n, double sigma) {
    if (n < 1) throw std::invalid_argument("quadrature needs at least one node");
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k < n; ++k) {
        const double b = std::sqrt(k / 2.0);
        j(k, k - 1) = b;
        j(k - 1, k) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(j);
    Quadrature q;
    q.shifts.resize(n);
    q.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        q.shifts(i) = std::sqrt(2.0) * sigma * es.eigenvalues()(i);
        const double v0 = es.eigenvectors()(0, i);
        q.weights(i) = v0 * v0;
    }
    q.weights /= q.weights.sum();
    return q;
}

// ---------------------------------------------------------------------------
// Noise model and channel naming.

struct NoiseModel {
    double sigma_phic_phi0 = 6e-6;
    double sigma_eps_phi0 = 6e-6;
    double sigma_dt_ns = 6e-3;
};

namespace detail {

struct ChannelId {
    std::string kind;    // phic | eps | dt
    std::string suffix;  // "" | _a | _b
};

inline ChannelId parse_channel(const std::string& name) {
    ChannelId id;
    std::string base = name;
    for (const char* s : {"_a", "_b"}) {
        const size_t ls = 2;
        if (base.size() > ls && base.compare(base.size() - ls, ls, s) == 0) {
            id.suffix = s;
            base = base.substr(0, base.size() - ls);
            break;
        }
    }
    if (base != "phic" && base != "eps" && base != "dt")
        throw std::invalid_argument("unknown noise channel: " + name);
    id.kind = base;
    return id;
}

}  // namespace detail

inline double sigma_for(const NoiseModel& m, const std::string& channel) {
    const auto id = detail::parse_channel(channel);
    if (id.kind == "phic") return m.sigma_phic_phi0;
    if (id.kind == "eps") return m.sigma_eps_phi0;
    return m.sigma_dt_ns;
}

// Schedule with the given per-channel shift values applied (one value per
// entry of the realization's noise channel list).
inline pulse::PulseSchedule shifted_schedule(const gates::GateRealization& g,
                                             const std::vector<double>& values) {
    if (values.size() != g.noise_channels.size())
        throw std::invalid_argument("one shift value per noise channel required");
    pulse::PulseSchedule s = g.schedule;
    for (size_t i = 0; i < values.size(); ++i) {
        const auto id = detail::parse_channel(g.noise_channels[i]);
        const double v = values[i];
        s = pulse::apply_shifts_qubit(s, id.suffix, id.kind == "phic" ? v : 0.0,
                                      id.kind == "eps" ? v : 0.0, id.kind == "dt" ? v : 0.0);
    }
    return s;
}

inline gates::GateEval evaluate_shifted(const gates::GateRealization& g,
                                        const gates::SystemContext& sys,
                                        const std::vector<double>& values,
                                        const evolve::StepControl& ctl) {
    gates::GateRealization gs = g;
    gs.schedule = shifted_schedule(g, values);
    return gates::evaluate_gate(gs, sys, ctl);
}

// ---------------------------------------------------------------------------
// Averaged fidelity.

struct AverageOptions {
    int nodes = 9;
    bool verify_refinement = true;  // single-channel only: compare against a denser rule
    int verify_nodes = 15;
    double verify_tol = 1e-5;
    evolve::StepControl ctl;
};

// Single-channel ensemble average of the entanglement fidelity.
inline double average_fidelity(const gates::GateRealization& g, const gates::SystemContext& sys,
                               const NoiseModel& noise, const std::string& channel,
                               const AverageOptions& opt = {}) {
    size_t idx = g.noise_channels.size();
    for (size_t i = 0; i < g.noise_channels.size(); ++i)
        if (g.noise_channels[i] == channel) idx = i;
    if (idx == g.noise_channels.size())
        throw std::invalid_argument("channel not declared by this gate: " + channel);
    const double sigma = sigma_for(noise, channel);
    auto run = [&](int n) {
        const Quadrature q = gauss_hermite(n, sigma);
        double acc = 0.0;
        std::vector<double> values(g.noise_channels.size(), 0.0);
        for (int i = 0; i < n; ++i) {
            values[idx] = q.shifts(i);
            const auto ev = evaluate_shifted(g, sys, values, opt.ctl);
            acc += q.weights(i) * ev.fidelity;
        }
        return acc;
    };
    const double f = run(opt.nodes);
    if (opt.verify_refinement) {
        const double f_dense = run(opt.verify_nodes);
        if (std::abs(f - f_dense) > opt.verify_tol)
            throw std::runtime_error("quadrature not converged for channel " + channel);
    }
    return f;
}

// ---------------------------------------------------------------------------
// Ensemble channel over the full declared channel set.

struct KrausElement {
    MatrixXc e;
    double weight = 0.0;  // ||E||_F / sqrt(d): coefficient scale of the element
};

struct QuantumChannel {
    int dim = 0;
    MatrixXc choi;  // sum_n w_n vec(B_n) vec(B_n)^dag, column-major vec
    std::vector<KrausElement> kraus;
    double favg = 0.0;          // quadrature average of the per-node fidelity
    double f0 = 0.0;            // fidelity at zero shift
    double leakage_mass = 0.0;  // 1 - tr(choi)/d
    int nodes_per_channel = 0;
    long evals = 0;
};

namespace detail {

inline VectorXc vec(const MatrixXc& b) {
    VectorXc v(b.size());
    int k = 0;
    for (int j = 0; j < b.cols(); ++j)
        for (int i = 0; i < b.rows(); ++i) v(k++) = b(i, j);
    return v;
}

inline MatrixXc unvec(const VectorXc& v, int d) {
    MatrixXc m(d, d);
    int k = 0;
    for (int j = 0; j < d; ++j)
        for (int i = 0; i < d; ++i) m(i, j) = v(k++);
    return m;
}

// Phase gauge: rotate so the largest-magnitude element is real positive.
inline void fix_gauge(MatrixXc& e) {
    int bi = 0, bj = 0;
    double best = -1.0;
    for (int i = 0; i < e.rows(); ++i)
        for (int j = 0; j < e.cols(); ++j)
            if (std::abs(e(i, j)) > best + 1e-15) {
                best = std::abs(e(i, j));
                bi = i;
                bj = j;
            }
    if (best > 1e-300) e *= std::polar(1.0, -std::arg(e(bi, bj)));
}

inline bool lex_less(const MatrixXc& a, const MatrixXc& b) {
    for (int j = 0; j < a.cols(); ++j)
        for (int i = 0; i < a.rows(); ++i) {
            const cplx x = a(i, j), y = b(i, j);
            if (std::abs(x.real() - y.real()) > 1e-12) return x.real() < y.real();
            if (std::abs(x.imag() - y.imag()) > 1e-12) return x.imag() < y.imag();
        }
    return false;
}

inline void finalize_channel(QuantumChannel& ch) {
    const int d = ch.dim;
    ch.choi = 0.5 * (ch.choi + ch.choi.adjoint().eval());
    ch.leakage_mass = 1.0 - ch.choi.trace().real() / d;
    Eigen::SelfAdjointEigenSolver<MatrixXc> es(ch.choi);
    std::vector<std::pair<double, MatrixXc>> elems;
    for (int k = 0; k < es.eigenvalues().size(); ++k) {
        const double lam = es.eigenvalues()(k);
        if (lam < 1e-14) continue;
        MatrixXc e = std::sqrt(lam) * unvec(es.eigenvectors().col(k), d);
        fix_gauge(e);
        elems.push_back({lam, std::move(e)});
    }
    std::stable_sort(elems.begin(), elems.end(), [](const auto& a, const auto& b) {
        if (std::abs(a.first - b.first) > 1e-12) return a.first > b.first;
        return lex_less(a.second, b.second);
    });
    ch.kraus.clear();
    for (auto& [lam, e] : elems)
        ch.kraus.push_back({e, e.norm() / std::sqrt(static_cast<double>(d))});
}

}  // namespace detail

struct ChannelOptions {
    int nodes = 9;
    int nodes_many_channels = 5;  // per-channel reduction once the product grows
    int many_channel_threshold = 4;
    evolve::StepControl ctl;
};

inline QuantumChannel ensemble_channel(const gates::GateRealization& g,
                                       const gates::SystemContext& sys, const NoiseModel& noise,
                                       const ChannelOptions& opt = {}) {
    const int nch = static_cast<int>(g.noise_channels.size());
    if (nch == 0) throw std::invalid_argument("gate declares no noise channels");
    const int nodes = nch >= opt.many_channel_threshold
                          ? std::min(opt.nodes, opt.nodes_many_channels)
                          : opt.nodes;
    std::vector<Quadrature> quads;
    for (const auto& c : g.noise_channels) quads.push_back(gauss_hermite(nodes, sigma_for(noise, c)));
    const int d = g.num_qubits == 1 ? 2 : 4;
    QuantumChannel ch;
    ch.dim = d;
    ch.choi = MatrixXc::Zero(d * d, d * d);
    ch.nodes_per_channel = nodes;
    const gates::IdealGate ideal = gates::ideal_gate(g);
    std::vector<int> odo(nch, 0);
    std::vector<double> values(nch, 0.0);
    bool done = false;
    while (!done) {
        double w = 1.0;
        for (int c = 0; c < nch; ++c) {
            values[c] = quads[c].shifts(odo[c]);
            w *= quads[c].weights(odo[c]);
        }
        const auto ev = evaluate_shifted(g, sys, values, opt.ctl);
        const VectorXc v = detail::vec(ev.block);
        ch.choi.noalias() += w * (v * v.adjoint());
        ch.favg += w * gates::entanglement_fidelity(ev.block, ideal);
        ++ch.evals;
        int c = 0;
        while (c < nch && ++odo[c] == nodes) {
            odo[c] = 0;
            ++c;
        }
        done = c == nch;
    }
    const auto ev0 = evaluate_shifted(g, sys, std::vector<double>(nch, 0.0), opt.ctl);
    ch.f0 = ev0.fidelity;
    detail::finalize_channel(ch);
    return ch;
}

// Seeded Monte-Carlo oracle for the same channel.  The Gaussian draws use an
// explicit Box-Muller transform on the raw generator output so the sample
// sequence is reproducible across standard libraries.
inline QuantumChannel monte_carlo_channel(const gates::GateRealization& g,
                                          const gates::SystemContext& sys,
                                          const NoiseModel& noise, long samples, uint64_t seed,
                                          const evolve::StepControl& ctl = {}) {
    const int nch = static_cast<int>(g.noise_channels.size());
    if (nch == 0) throw std::invalid_argument("gate declares no noise channels");
    const int d = g.num_qubits == 1 ? 2 : 4;
    QuantumChannel ch;
    ch.dim = d;
    ch.choi = MatrixXc::Zero(d * d, d * d);
    ch.nodes_per_channel = 0;
    std::vector<double> sigmas;
    for (const auto& c : g.noise_channels) sigmas.push_back(sigma_for(noise, c));
    std::mt19937_64 rng(seed);
    auto uniform01 = [&]() {
        return (static_cast<double>(rng() >> 11) + 0.5) * (1.0 / 9007199254740992.0);
    };
    bool have_spare = false;
    double spare = 0.0;
    auto normal = [&]() {
        if (have_spare) {
            have_spare = false;
            return spare;
        }
        const double u1 = uniform01(), u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        spare = r * std::sin(2.0 * M_PI * u2);
        have_spare = true;
        return r * std::cos(2.0 * M_PI * u2);
    };
    const gates::IdealGate ideal = gates::ideal_gate(g);
    std::vector<double> values(nch, 0.0);
    const double w = 1.0 / static_cast<double>(samples);
    for (long s = 0; s < samples; ++s) {
        for (int c = 0; c < nch; ++c) values[c] = sigmas[c] * normal();
        const auto ev = evaluate_shifted(g, sys, values, ctl);
        const VectorXc v = detail::vec(ev.block);
        ch.choi.noalias() += w * (v * v.adjoint());
        ch.favg += w * gates::entanglement_fidelity(ev.block, ideal);
        ++ch.evals;
    }
    const auto ev0 = evaluate_shifted(g, sys, std::vector<double>(nch, 0.0), ctl);
    ch.f0 = ev0.fidelity;
    detail::finalize_channel(ch);
    return ch;
}

// ---------------------------------------------------------------------------
// Classification of the channel against its ideal gate.

struct NoiseClassification {
    double ideal_mass = 0.0;    // along the ideal gate itself
    double phase_mass = 0.0;    // diagonal-Pauli span around the ideal, beyond it
    double bitflip_mass = 0.0;  // remaining computational-space mass
    double leakage_mass = 0.0;
    double diagonal_mass = 0.0;  // ideal + phase: all dephasing-like content
    double phase_to_bitflip = 0.0;
    std::vector<double> kraus_weight;
    std::vector<double> kraus_ideal_fraction;
};

// Mass decomposition: each Kraus element is resolved against an orthonormal
// basis of the "dephasing span" {P U, U P} over diagonal Paulis P (the ideal
// gate direction split out separately); whatever remains in the computational
// space is bit-flip-like.  A pure dephasing channel around the identity has
// all its mass in the first two buckets.
inline NoiseClassification classify_noise(const QuantumChannel& ch, const MatrixXc& u_ideal) {
    const int d = ch.dim;
    std::vector<MatrixXc> diag_paulis;
    if (d == 2) {
        MatrixXc z = MatrixXc::Zero(2, 2);
        z(0, 0) = 1;
        z(1, 1) = -1;
        diag_paulis.push_back(z);
    } else {
        MatrixXc z1 = MatrixXc::Zero(4, 4), z2 = MatrixXc::Zero(4, 4), zz = MatrixXc::Zero(4, 4);
        const double sz[2] = {1.0, -1.0};
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) {
                const int k = 2 * a + b;
                z1(k, k) = sz[a];
                z2(k, k) = sz[b];
                zz(k, k) = sz[a] * sz[b];
            }
        diag_paulis.push_back(z1);
        diag_paulis.push_back(z2);
        diag_paulis.push_back(zz);
    }
    auto hs = [](const MatrixXc& a, const MatrixXc& b) { return (a.adjoint() * b).trace(); };
    std::vector<MatrixXc> basis;  // orthonormal, basis[0] along the ideal gate
    auto add = [&](MatrixXc m) {
        for (const auto& b : basis) m -= hs(b, m) * b;
        const double n = m.norm();
        if (n > 1e-9) basis.push_back(m / n);
    };
    add(u_ideal);
    for (const auto& p : diag_paulis) {
        add(p * u_ideal);
        add(u_ideal * p);
    }
    NoiseClassification cl;
    cl.leakage_mass = ch.leakage_mass;
    for (const auto& k : ch.kraus) {
        const double total = k.e.squaredNorm() / d;
        const double ideal = std::norm(hs(basis[0], k.e)) / d;
        double phase = 0.0;
        for (size_t b = 1; b < basis.size(); ++b) phase += std::norm(hs(basis[b], k.e)) / d;
        cl.ideal_mass += ideal;
        cl.phase_mass += phase;
        cl.bitflip_mass += std::max(0.0, total - ideal - phase);
        cl.kraus_weight.push_back(k.weight);
        cl.kraus_ideal_fraction.push_back(total > 0 ? ideal / total : 0.0);
    }
    cl.diagonal_mass = cl.ideal_mass + cl.phase_mass;
    cl.phase_to_bitflip = cl.bitflip_mass > 0 ? cl.phase_mass / cl.bitflip_mass
                                              : std::numeric_limits<double>::infinity();
    return cl;
}

// ---------------------------------------------------------------------------
// Serialization.

inline nlohmann::json complex_matrix_json(const MatrixXc& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (int i = 0; i < m.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (int j = 0; j < m.cols(); ++j)
            row.push_back(nlohmann::json::array({m(i, j).real(), m(i, j).imag()}));
        rows.push_back(row);
    }
    return rows;
}

inline nlohmann::json channel_to_json(const QuantumChannel& ch, const NoiseClassification& cl) {
    nlohmann::json j;
    j["dim"] = ch.dim;
    j["favg"] = ch.favg;
    j["f0"] = ch.f0;
    j["leakage_mass"] = ch.leakage_mass;
    j["nodes_per_channel"] = ch.nodes_per_channel;
    j["evals"] = ch.evals;
    j["choi"] = complex_matrix_json(ch.choi);
    nlohmann::json ks = nlohmann::json::array();
    for (const auto& k : ch.kraus)
        ks.push_back(nlohmann::json{{"weight", k.weight}, {"matrix", complex_matrix_json(k.e)}});
    j["kraus"] = ks;
    j["classification"] = {{"ideal_mass", cl.ideal_mass},
                           {"phase_mass", cl.phase_mass},
                           {"bitflip_mass", cl.bitflip_mass},
                           {"leakage_mass", cl.leakage_mass},
                           {"diagonal_mass", cl.diagonal_mass},
                           {"phase_to_bitflip", cl.phase_to_bitflip}};
    return j;
}

}  // namespace qflux::noise
