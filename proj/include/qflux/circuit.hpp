// circuit.hpp - lumped-element description of the gradiometric three-junction
// flux qubit and its reduction to a two-dimensional phase-space potential.
//
// The circuit is specified by a tree/chord decomposition of its network
// graph: the three loop windings (L1, L3, L5) are chords, the flux-line
// windings and the shared center leg (L2, L4, Lc) are tree inductors.  The
// reduction eliminates the linear inductors, leaving a quadratic form M0 on
// the three junction phases plus flux-dependent linear couplings.  One
// eigenvector of M0 is an exact zero mode (the gradiometric mode), so the
// low-energy dynamics lives in the plane spanned by the remaining two.

#pragma once

#include <array>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <json.hpp>

#include "qflux/constants.hpp"

namespace qflux::circuit {

struct CircuitParams {
    std::array<double, 3> ic_uA{1.3, 1.3, 1.3};   // junction critical currents
    std::array<double, 3> cap_fF{10.0, 10.0, 10.0};

    // chord inductors: small loop and the two big loops (pH)
    double L1 = 32.18, L3 = 686.93, L5 = 686.93;
    double M13 = -2.23, M15 = -2.23, M35 = -12.25;

    // tree inductors: flux-line windings and shared center leg (pH)
    double L2 = 32.18, L4 = 605.03, Lc = 106.27;
    double M12 = 0.8, M34 = 0.5, M1c = 0.0, M3c = 28.15, M5c = -28.15;

    // transmission line mode and its coupling to the qubit
    double LT_nH = 5.647433464551125;  // mode frequency Z0 / (2 pi L_T) = 3.1 GHz exactly
    double Z0_ohm = 110.0;
    double MqT_pH = 200.0;

    // mutual inductance between the big loops of neighbouring qubits
    double M_pH = 12.0;

    double f_transmission_ghz() const { return lc_mode_ghz(LT_nH, Z0_ohm); }

    Eigen::Matrix3d chord_inductance() const {
        Eigen::Matrix3d L;
        L << L1, M13, M15,
             M13, L3, M35,
             M15, M35, L5;
        return L;
    }
    Eigen::Matrix3d tree_inductance() const {
        Eigen::Matrix3d K = Eigen::Matrix3d::Zero();
        K.diagonal() << L2, L4, Lc;
        return K;
    }
    Eigen::Matrix3d chord_tree_mutual() const {
        Eigen::Matrix3d Llk;
        Llk << M12, 0.0, M1c,
               0.0, M34, M3c,
               0.0, 0.0, M5c;
        return Llk;
    }

    // junction sub-loop matrix (capacitor rows x chord columns)
    static Eigen::Matrix3d f_cl() {
        Eigen::Matrix3d F;
        F << -1, -1, 0,
             -1, 0, -1,
             0, 1, -1;
        return F;
    }
    // tree-inductor sub-loop matrix (tree rows x chord columns)
    static Eigen::Matrix3d f_kl() {
        Eigen::Matrix3d F = Eigen::Matrix3d::Zero();
        F(2, 1) = 1;
        F(2, 2) = -1;
        return F;
    }

    void validate() const {
        for (double ic : ic_uA)
            if (!(ic > 0)) throw std::invalid_argument("critical currents must be positive");
        for (double c : cap_fF)
            if (!(c > 0)) throw std::invalid_argument("capacitances must be positive");
        // the full 6x6 inductance block matrix must be symmetric positive definite
        Eigen::Matrix<double, 6, 6> full;
        full.topLeftCorner<3, 3>() = chord_inductance();
        full.topRightCorner<3, 3>() = chord_tree_mutual();
        full.bottomLeftCorner<3, 3>() = chord_tree_mutual().transpose();
        full.bottomRightCorner<3, 3>() = tree_inductance();
        Eigen::LLT<Eigen::Matrix<double, 6, 6>> llt(full);
        if (llt.info() != Eigen::Success)
            throw std::invalid_argument("inductance block matrix is not positive definite");
        if (!(LT_nH > 0) || !(Z0_ohm > 0))
            throw std::invalid_argument("transmission line parameters must be positive");
    }

    std::array<double, 3> inv_junction_inductance_ph() const {
        return {junction_inv_inductance_ph(ic_uA[0]),
                junction_inv_inductance_ph(ic_uA[1]),
                junction_inv_inductance_ph(ic_uA[2])};
    }
};

inline void to_json(nlohmann::json& j, const CircuitParams& p) {
    j = nlohmann::json{
        {"ic_uA", p.ic_uA},   {"cap_fF", p.cap_fF}, {"L1", p.L1},   {"L3", p.L3},
        {"L5", p.L5},         {"M13", p.M13},       {"M15", p.M15}, {"M35", p.M35},
        {"L2", p.L2},         {"L4", p.L4},         {"Lc", p.Lc},   {"M12", p.M12},
        {"M34", p.M34},       {"M1c", p.M1c},       {"M3c", p.M3c}, {"M5c", p.M5c},
        {"LT_nH", p.LT_nH},   {"Z0_ohm", p.Z0_ohm}, {"MqT_pH", p.MqT_pH},
        {"M_pH", p.M_pH}};
}

inline void from_json(const nlohmann::json& j, CircuitParams& p) {
    j.at("ic_uA").get_to(p.ic_uA);
    j.at("cap_fF").get_to(p.cap_fF);
    j.at("L1").get_to(p.L1);
    j.at("L3").get_to(p.L3);
    j.at("L5").get_to(p.L5);
    j.at("M13").get_to(p.M13);
    j.at("M15").get_to(p.M15);
    j.at("M35").get_to(p.M35);
    j.at("L2").get_to(p.L2);
    j.at("L4").get_to(p.L4);
    j.at("Lc").get_to(p.Lc);
    j.at("M12").get_to(p.M12);
    j.at("M34").get_to(p.M34);
    j.at("M1c").get_to(p.M1c);
    j.at("M3c").get_to(p.M3c);
    j.at("M5c").get_to(p.M5c);
    j.at("LT_nH").get_to(p.LT_nH);
    j.at("Z0_ohm").get_to(p.Z0_ohm);
    j.at("MqT_pH").get_to(p.MqT_pH);
    j.at("M_pH").get_to(p.M_pH);
}

inline CircuitParams load_circuit(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open circuit file: " + path);
    nlohmann::json j;
    in >> j;
    CircuitParams p = j.get<CircuitParams>();
    p.validate();
    return p;
}

inline void save_circuit(const CircuitParams& p, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write circuit file: " + path);
    out << nlohmann::json(p).dump(2) << "\n";
}

struct LambdaEigenvalues {
    double lambda1;  // exactly zero (gradiometric mode)
    double lambda2;  // soft in-plane mode, 1/pH
    double lambda3;  // stiff mode, frozen out, 1/pH
};

// Closed forms for the eigenvalues of the inverse-inductance form M0.  These
// hold for the symmetric layout (L3 = L5 etc.); they double as an oracle for
// the numerically assembled reduction below.
inline LambdaEigenvalues lambda_eigenvalues(const CircuitParams& p) {
    const double den2 = p.L3 + 2.0 * p.Lc - 4.0 * p.M3c - p.M35;
    const double den3 = p.L1 * (p.L3 + p.M35) - 2.0 * p.M15 * p.M15;
    if (std::abs(den2) < 1e-12 || std::abs(den3) < 1e-12)
        throw std::domain_error("degenerate circuit: singular eigenvalue denominator");
    return {0.0,
            3.0 / den2,
            (p.L1 + 2.0 * (p.L3 + p.M35 - 2.0 * p.M15)) / den3};
}

// Non-orthogonal flux coordinates.  The bias flux is the difference of the
// big-loop fluxes; the control flux picks up a small correction from their
// sum because the small loop is not perfectly decoupled.
struct FluxCoords {
    double phi_c;  // control flux, Phi0
    double eps;    // bias flux, Phi0
};

inline double phic_correction_coef(const CircuitParams& p) {
    return (p.L1 - 2.0 * p.M15) / (2.0 * (p.L3 + p.M35 - p.M15));
}

inline FluxCoords nonorthogonal_fluxes(double phi_c_raw, double phi, double phi_p,
                                       const CircuitParams& p) {
    return {phi_c_raw + phic_correction_coef(p) * (phi + phi_p), phi - phi_p};
}

// Companion control-flux shift that maps the potential onto itself when the
// bias flux moves by an integer number of flux quanta (per unit k1 + k2).
inline double sline_companion_shift(const CircuitParams& p) {
    return (p.L1 + 2.0 * (p.L3 + p.M35 - 2.0 * p.M15)) /
           (2.0 * (p.L3 + p.M35 - p.M15));
}

// Everything the potential and the coefficient extraction need, computed once
// per parameter set.
struct Reduction {
    CircuitParams params;
    Eigen::Matrix3d Lt;        // effective chord inductance after tree elimination, pH
    Eigen::Matrix3d Lt_inv;
    Eigen::Matrix3d M0;        // inverse-inductance form on junction phases, 1/pH
    Eigen::Matrix3d modes;     // columns u1, u2, u3: zero, soft, stiff
    LambdaEigenvalues lam;
    std::array<double, 3> inv_LJ;  // junction inverse inductances, 1/pH

    double d3_per_phic;        // frozen stiff-coordinate displacement per Phi_c
    double chi_per_phic;       // cosine argument shift on junctions 1,2 per Phi_c (rad)
    double eps_s2_coef;        // bias coupling: U += k_ind * this * eps * s2 (GHz per Phi0)

    // big-loop screening-current decomposition, flux-per-inductance units
    // (Phi0/pH): I = cur_phic * Phi_c + cur_s2 * <s2> + cur_s3 * <s3>
    double cur_phic;
    double cur_s2;
    double cur_s3;
    double s3_relax;           // <s3> = s3_relax * sin(chi) * <cos a>, from the
                               // stiff-mode minimum condition

    double kinetic_ghz;        // Laplacian prefactor (equal junction capacitances)
    double f_t_ghz;            // transmission line mode frequency
    double eps_zp;             // oscillator zero-point flux seen as a bias, Phi0

    double qq_energy_scale;    // M * k_ind * (2pi)^2: multiplies I_A * I_B (GHz)
};

inline Reduction reduce(const CircuitParams& p) {
    p.validate();
    Reduction r;
    r.params = p;

    const Eigen::Matrix3d L = p.chord_inductance();
    const Eigen::Matrix3d Lk = p.tree_inductance();
    const Eigen::Matrix3d Llk = p.chord_tree_mutual();
    const Eigen::Matrix3d Fkl = CircuitParams::f_kl();
    const Eigen::Matrix3d Fcl = CircuitParams::f_cl();

    // With the sub-loop sign convention used here (same orientation -> -1) the
    // tree elimination enters with minus signs on the cross terms.
    r.Lt = L - Llk * Fkl - (Llk * Fkl).transpose() + Fkl.transpose() * Lk * Fkl;
    r.Lt_inv = r.Lt.inverse();
    r.M0 = Fcl * r.Lt_inv * Fcl.transpose();

    // Analytic eigenvectors of M0 for the symmetric layout.  u1 is the exact
    // zero mode; u2 the soft combination the bias flux couples to; u3 stiff.
    const double s3i = 1.0 / std::sqrt(3.0);
    const double s6i = 1.0 / std::sqrt(6.0);
    const double s2i = 1.0 / std::sqrt(2.0);
    Eigen::Vector3d u1(s3i, -s3i, s3i);
    Eigen::Vector3d u2(-s6i, s6i, 2.0 * s6i);
    Eigen::Vector3d u3(s2i, s2i, 0.0);
    r.modes.col(0) = u1;
    r.modes.col(1) = u2;
    r.modes.col(2) = u3;

    r.lam = lambda_eigenvalues(p);
    // confirm the closed forms against the assembled matrix
    for (int k = 0; k < 3; ++k) {
        const double lk = (k == 0) ? r.lam.lambda1 : (k == 1 ? r.lam.lambda2 : r.lam.lambda3);
        const double defect = (r.M0 * r.modes.col(k) - lk * r.modes.col(k)).norm();
        if (defect > 1e-10 * std::max(1.0, std::abs(lk)))
            throw std::runtime_error("mode vectors do not diagonalize the assembled M0");
    }

    r.inv_LJ = p.inv_junction_inductance_ph();

    // Linear flux couplings.  v_k = Lt^{-1} F_CL^T u_k gives mode k's coupling
    // to the physical loop fluxes (Phi_c in the small loop, the big-loop pair
    // entering through their difference eps and the frozen stiff shift).
    const Eigen::Vector3d v2 = r.Lt_inv * Fcl.transpose() * u2;
    const Eigen::Vector3d v3 = r.Lt_inv * Fcl.transpose() * u3;

    // stiff-mode linear coefficient kappa3: U += -k (2pi) kappa3 Phi_c n3,
    // completed into the square at n3 = d3
    const double kappa3 = -(v3(0));  // = sqrt2 (L3 - M15 + M35) / det-form, 1/pH
    r.d3_per_phic = two_pi * kappa3 / r.lam.lambda3;
    r.chi_per_phic = r.d3_per_phic * s2i;  // junctions 1,2 carry u3 weight 1/sqrt2

    r.eps_s2_coef = two_pi * r.lam.lambda2 * s6i;

    // Screening current in one big-loop winding (row 1 of the chord system):
    // I = [Lt^{-1}(F_CL^T phi Phi0/2pi + Phi_loops)]_bigloop.  The zero mode
    // carries no inductive energy (F_CL^T u1 = 0), so only n2, n3 and the
    // applied fluxes contribute.
    r.cur_phic = r.Lt_inv(1, 0) + v3(1) * kappa3 / r.lam.lambda3;
    r.cur_s2 = v2(1) / two_pi;
    r.cur_s3 = v3(1) / two_pi;
    // stiff-coordinate relaxation: minimizing 1/2 lam3 s3^2 + U_J over s3 at
    // fixed (s1, s2) gives <s3> = -(invLJ/lam3) sqrt2 sin(chi) cos(a) for the
    // symmetric junction pair
    r.s3_relax = -(r.inv_LJ[0] / r.lam.lambda3) * std::sqrt(2.0);

    r.kinetic_ghz = qflux::kinetic_ghz(p.cap_fF[0]);
    r.f_t_ghz = p.f_transmission_ghz();
    r.eps_zp = (p.MqT_pH / (p.LT_nH * 1e3)) * lc_zero_point_flux(p.Z0_ohm);

    r.qq_energy_scale = p.M_pH * k_ind_ghz_ph * two_pi * two_pi;
    return r;
}

}  // namespace qflux::circuit
