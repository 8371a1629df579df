// model.hpp - effective low-dimensional Hamiltonians of the flux qubit
// stabilized by its transmission-line oscillator.
//
// The qubit doublet (tunneling splitting Delta, bias slope b) couples to the
// lowest two oscillator levels through g.  A polaron displacement s absorbs
// the static part of the coupling; the dressed tunneling picks up the
// Franck-Condon factor exp(-2 s^2).  Basis order is L0, L1, R0, R1: left and
// right circulating-current states times oscillator occupation, with
// sigma_z |L> = -|L>, sigma_z |R> = +|R>.

#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>

#include <Eigen/Dense>

#include "qflux/linalg.hpp"
#include "qflux/profile.hpp"

namespace qflux::model {

struct QubitPoint {
    double delta_ghz = 0.0;
    double b_ghz_per_phi0 = 0.0;
    double g_ghz = 0.0;
    double f_t_ghz = 0.0;
    double eps_phi0 = 0.0;  // bias flux relative to the symmetric point
};

inline QubitPoint at_flux(const circuit::CoefficientProfile& p, double phi_c,
                          double eps_phi0) {
    const auto q = p.query(phi_c);
    return {q.delta_ghz, q.b_ghz_per_phi0, q.g_ghz, p.f_t_ghz, eps_phi0};
}

// Polaron displacement that removes the static oscillator force.
inline double shift_parameter(double g_ghz, double f_t_ghz, double delta_ghz) {
    const double w = std::sqrt(f_t_ghz * f_t_ghz + delta_ghz * delta_ghz);
    if (w <= 0.0) throw std::invalid_argument("shift parameter needs f_t or delta nonzero");
    return -g_ghz / w;
}

// Two-level qubit times two-level oscillator in the displaced frame.  The
// displacement operators are expanded exactly within the truncated oscillator
// space, which is what generates the s-dependent off-diagonal entries.
inline Eigen::Matrix4d hamiltonian_4level(const QubitPoint& q) {
    const double s = shift_parameter(q.g_ghz, q.f_t_ghz, q.delta_ghz);
    const double dt = q.delta_ghz * std::exp(-2.0 * s * s);  // dressed tunneling
    const double gt = q.g_ghz + s * q.f_t_ghz;               // residual coupling
    const double e = 0.5 * q.eps_phi0 * q.b_ghz_per_phi0;
    const double ft = q.f_t_ghz;
    Eigen::Matrix4d H;
    H << -e,            -gt,            -0.5 * dt,                s * dt,
         -gt,           -e + ft,        -s * dt,                  -0.5 * dt * (1.0 - 4.0 * s * s),
         -0.5 * dt,     -s * dt,        e,                        gt,
         s * dt,        -0.5 * dt * (1.0 - 4.0 * s * s), gt,     e + ft;
    return H;
}

struct Spectrum {
    Eigen::VectorXd energies;  // GHz, ascending, ground state at zero
    Eigen::MatrixXd states;    // columns, largest component made positive
};

inline Spectrum spectrum(const Eigen::MatrixXd& H) {
    if (H.rows() != H.cols()) throw std::invalid_argument("spectrum needs a square matrix");
    if (!H.isApprox(H.transpose(), 1e-12))
        throw std::invalid_argument("spectrum expects a symmetric matrix");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
    Spectrum s;
    s.energies = es.eigenvalues();
    s.energies.array() -= s.energies(0);
    s.states = es.eigenvectors();
    for (Eigen::Index c = 0; c < s.states.cols(); ++c) {
        Eigen::Index arg = 0;
        s.states.col(c).cwiseAbs().maxCoeff(&arg);
        if (s.states(arg, c) < 0) s.states.col(c) = -s.states.col(c);
    }
    return s;
}

inline Eigen::Matrix4d sigma_z_4level() {
    Eigen::Matrix4d z = Eigen::Matrix4d::Zero();
    z.diagonal() << -1, -1, 1, 1;
    return z;
}

// Static flux offsets that recenter each qubit's bias on the shifted
// symmetric line: the screening current of one qubit offsets the other.
inline std::pair<double, double> sline_shift(const circuit::CoefficientProfile& pa,
                                             const circuit::CoefficientProfile& pb,
                                             double phi_c_a, double phi_c_b) {
    const double bp_a = pa.query(phi_c_a).bprime_uphi0 * 1e-6;  // Phi0
    const double bp_b = pb.query(phi_c_b).bprime_uphi0 * 1e-6;
    return {-bp_b, +bp_a};
}

struct TwoQubitPoint {
    QubitPoint a, b;
    double j_ghz = 0.0;
    double bprime_a_phi0 = 0.0;  // flux offset qubit A imposes on B
    double bprime_b_phi0 = 0.0;  // and B on A
    bool include_bprime = true;
};

inline TwoQubitPoint two_qubit_point(const circuit::CoefficientProfile& pa,
                                     const circuit::CoefficientProfile& pb,
                                     double phi_c_a, double eps_a, double phi_c_b,
                                     double eps_b) {
    TwoQubitPoint t;
    t.a = at_flux(pa, phi_c_a, eps_a);
    t.b = at_flux(pb, phi_c_b, eps_b);
    t.j_ghz = pa.coupling_j_ghz(phi_c_a, phi_c_b);
    t.bprime_a_phi0 = pa.query(phi_c_a).bprime_uphi0 * 1e-6;
    t.bprime_b_phi0 = pb.query(phi_c_b).bprime_uphi0 * 1e-6;
    return t;
}

// 16-level pair Hamiltonian.  The cross offsets enter as bias shifts of
// opposite sign (the two big loops face each other with opposite winding);
// J couples the circulating currents directly.  Index = 4 * (state of A) +
// (state of B).
inline Eigen::MatrixXd hamiltonian_2qubit(const TwoQubitPoint& t) {
    QubitPoint qa = t.a, qb = t.b;
    if (t.include_bprime) {
        qa.eps_phi0 += t.bprime_b_phi0;
        qb.eps_phi0 -= t.bprime_a_phi0;
    }
    const Eigen::Matrix4d ha = hamiltonian_4level(qa);
    const Eigen::Matrix4d hb = hamiltonian_4level(qb);
    const Eigen::Matrix4d z = sigma_z_4level();
    const Eigen::Matrix4d id = Eigen::Matrix4d::Identity();
    Eigen::MatrixXd H = kron(ha, id) + kron(id, hb) + t.j_ghz * kron(z, z);
    return H;
}

}  // namespace qflux::model
