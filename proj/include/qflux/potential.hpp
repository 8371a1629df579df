// potential.hpp - two-dimensional reduced potential of the qubit circuit and
// its well structure.
//
// Coordinates (s1, s2) are the soft in-plane combinations of the junction
// phases; the stiff third combination is frozen at its flux-dependent
// minimum d3, which shifts the cosine arguments of the symmetric junction
// pair by chi = d3/sqrt(2).  The potential is periodic along s1 with period
// 2*pi*sqrt(3); the working domain is a rectangle around the principal well
// pair that excludes the translated image wells.

#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "qflux/circuit.hpp"
#include "qflux/constants.hpp"

namespace qflux::circuit {

inline constexpr double s1_period = 10.882796185405306;  // 2 pi sqrt(3)
inline constexpr double s2_period = 7.695298980971151;   // pi sqrt(6)

struct GridSpec {
    int n1 = 193;
    int n2 = 139;
    double half1 = 7.7;   // domain half-width along s1
    double half2 = 5.5;   // domain half-width along s2
    double c1 = 0.0;      // domain center
    double c2 = 0.0;
};

struct PotentialGrid {
    GridSpec spec;
    double h1 = 0.0, h2 = 0.0;  // grid steps
    double phi_c = 0.0, eps = 0.0;
    Eigen::MatrixXd U;          // GHz, row i = s1 index, col j = s2 index
    double u_min = 0.0;

    double s1(int i) const { return spec.c1 - spec.half1 + i * h1; }
    double s2(int j) const { return spec.c2 - spec.half2 + j * h2; }
};

namespace detail {

// cosine arguments of the three junctions at frozen stiff coordinate
struct JunctionArgs {
    double a1, a2, a3;
};

inline JunctionArgs junction_args(double s1, double s2, double chi) {
    const double a = s1 / std::sqrt(3.0) - s2 / std::sqrt(6.0);
    const double b = s1 / std::sqrt(3.0) + 2.0 * s2 / std::sqrt(6.0);
    return {a + chi, -a + chi, b};
}

}  // namespace detail

// Potential energy surface in GHz at fixed control and bias flux.  The
// flux-dependent constant from completing the stiff-mode square is dropped.
inline double potential_value(const Reduction& r, double phi_c, double eps,
                              double s1, double s2) {
    const double chi = r.chi_per_phic * phi_c;
    const auto [a1, a2, a3] = detail::junction_args(s1, s2, chi);
    const double quad = 0.5 * r.lam.lambda2 * s2 * s2 + r.eps_s2_coef * eps * s2;
    const double jos = -(r.inv_LJ[0] * std::cos(a1) + r.inv_LJ[1] * std::cos(a2) +
                         r.inv_LJ[2] * std::cos(a3));
    return k_ind_ghz_ph * (quad + jos);
}

inline Eigen::Vector2d potential_gradient(const Reduction& r, double phi_c, double eps,
                                          double s1, double s2) {
    const double chi = r.chi_per_phic * phi_c;
    const auto [a1, a2, a3] = detail::junction_args(s1, s2, chi);
    const double c3 = 1.0 / std::sqrt(3.0), c6 = 1.0 / std::sqrt(6.0);
    const double j1 = r.inv_LJ[0] * std::sin(a1);
    const double j2 = r.inv_LJ[1] * std::sin(a2);
    const double j3 = r.inv_LJ[2] * std::sin(a3);
    Eigen::Vector2d grad;
    grad(0) = j1 * c3 - j2 * c3 + j3 * c3;
    grad(1) = r.lam.lambda2 * s2 + r.eps_s2_coef * eps - j1 * c6 + j2 * c6 +
              j3 * 2.0 * c6;
    return k_ind_ghz_ph * grad;
}

inline Eigen::Matrix2d potential_hessian(const Reduction& r, double phi_c, double eps,
                                         double s1, double s2) {
    (void)eps;  // the bias is linear, it does not enter the curvature
    const double chi = r.chi_per_phic * phi_c;
    const auto [a1, a2, a3] = detail::junction_args(s1, s2, chi);
    const double c3 = 1.0 / 3.0, c6 = 1.0 / 6.0, c36 = 1.0 / std::sqrt(18.0);
    const double k1 = r.inv_LJ[0] * std::cos(a1);
    const double k2 = r.inv_LJ[1] * std::cos(a2);
    const double k3 = r.inv_LJ[2] * std::cos(a3);
    Eigen::Matrix2d H;
    H(0, 0) = k1 * c3 + k2 * c3 + k3 * c3;
    H(0, 1) = -k1 * c36 - k2 * c36 + 2.0 * k3 * c36;
    H(1, 0) = H(0, 1);
    H(1, 1) = r.lam.lambda2 + k1 * c6 + k2 * c6 + 4.0 * k3 * c6;
    return k_ind_ghz_ph * H;
}

inline PotentialGrid build_potential(const Reduction& r, double phi_c, double eps,
                                     const GridSpec& spec = {}) {
    if (spec.n1 < 2 || spec.n2 < 2)
        throw std::invalid_argument("grid needs at least two points per axis");
    PotentialGrid g;
    g.spec = spec;
    g.h1 = 2.0 * spec.half1 / (spec.n1 - 1);
    g.h2 = 2.0 * spec.half2 / (spec.n2 - 1);
    // resolution floor: at least eight samples per Josephson period
    if (g.h1 > s1_period / 8.0 || g.h2 > s2_period / 8.0)
        throw std::invalid_argument("grid resolves fewer than 8 points per Josephson period");
    g.phi_c = phi_c;
    g.eps = eps;
    g.U.resize(spec.n1, spec.n2);
    for (int i = 0; i < spec.n1; ++i)
        for (int j = 0; j < spec.n2; ++j)
            g.U(i, j) = potential_value(r, phi_c, eps, g.s1(i), g.s2(j));
    g.u_min = g.U.minCoeff();
    return g;
}

struct Well {
    Eigen::Vector2d pos;
    double value = 0.0;       // GHz
    double theta = 0.0;       // rotation angle of the softest curvature direction
    Eigen::Vector2d curvatures;  // Hessian eigenvalues, ascending, GHz per rad^2
};

struct WellStructure {
    std::vector<Well> minima;   // right well (s1 > 0) first when a pair exists
    bool double_well = false;
    double barrier_ghz = 0.0;   // saddle height above the lower minimum, 0 if single
};

namespace detail {

inline bool newton_minimize(const Reduction& r, double phi_c, double eps,
                            Eigen::Vector2d& x) {
    for (int it = 0; it < 80; ++it) {
        const Eigen::Vector2d grad = potential_gradient(r, phi_c, eps, x(0), x(1));
        Eigen::Matrix2d hess = potential_hessian(r, phi_c, eps, x(0), x(1));
        // pull the step toward descent when the curvature is not positive
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(hess);
        const double floor = std::max(1.0, std::abs(es.eigenvalues()(1)) * 1e-3);
        Eigen::Vector2d lam = es.eigenvalues().cwiseMax(floor);
        const Eigen::Vector2d step =
            -(es.eigenvectors() * (es.eigenvectors().transpose() * grad).cwiseQuotient(lam));
        const double len = step.norm();
        x += (len > 0.5) ? Eigen::Vector2d(step * (0.5 / len)) : step;
        if (grad.norm() < 1e-9 && len < 1e-10) break;
    }
    const Eigen::Vector2d grad = potential_gradient(r, phi_c, eps, x(0), x(1));
    const Eigen::Matrix2d hess = potential_hessian(r, phi_c, eps, x(0), x(1));
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(hess);
    return grad.norm() < 1e-6 && es.eigenvalues()(0) > 0.0;
}

}  // namespace detail

// Locate the principal minima inside the working domain and the local frame
// rotation: theta is the angle of the softest Hessian eigenvector at the well,
// measured from the s1 axis.  A symmetric pair is reported right well first.
inline WellStructure find_minima_and_rotation(const Reduction& r, double phi_c,
                                              double eps, const GridSpec& spec = {}) {
    std::vector<Eigen::Vector2d> seeds = {
        {0.0, 0.0},   {2.8, -1.0}, {-2.8, 1.0}, {2.0, -0.7}, {-2.0, 0.7},
        {3.6, -1.2},  {-3.6, 1.2}, {1.0, -0.4}, {-1.0, 0.4}, {0.0, -1.0},
        {0.0, 1.0}};
    std::vector<Well> found;
    for (const auto& seed : seeds) {
        Eigen::Vector2d x = seed;
        if (!detail::newton_minimize(r, phi_c, eps, x)) continue;
        if (std::abs(x(0) - spec.c1) > spec.half1 || std::abs(x(1) - spec.c2) > spec.half2)
            continue;  // image well outside the working cell
        bool dup = false;
        for (const auto& w : found)
            if ((w.pos - x).norm() < 1e-5) dup = true;
        if (dup) continue;
        Well w;
        w.pos = x;
        w.value = potential_value(r, phi_c, eps, x(0), x(1));
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(
            potential_hessian(r, phi_c, eps, x(0), x(1)));
        w.curvatures = es.eigenvalues();
        const Eigen::Vector2d soft = es.eigenvectors().col(0);
        w.theta = std::atan2(soft(1), soft(0));
        if (w.theta <= -pi / 2 || w.theta > pi / 2) w.theta += (w.theta > 0 ? -pi : pi);
        found.push_back(w);
    }
    if (found.empty()) throw std::runtime_error("no minimum found in working domain");
    std::sort(found.begin(), found.end(), [](const Well& a, const Well& b) {
        if (std::abs(a.value - b.value) > 1e-9) return a.value < b.value;
        return a.pos(0) > b.pos(0);  // degenerate pair: right well first
    });

    WellStructure ws;
    ws.minima = found;
    ws.double_well = found.size() >= 2;
    if (ws.double_well) {
        // saddle between the two lowest minima: coarse maximum along the
        // connecting line, then Newton refinement to the stationary point
        const Eigen::Vector2d a = found[0].pos, b = found[1].pos;
        double best_u = -1e300;
        Eigen::Vector2d x = 0.5 * (a + b);
        for (int k = 1; k < 64; ++k) {
            const Eigen::Vector2d p = a + (b - a) * (k / 64.0);
            const double u = potential_value(r, phi_c, eps, p(0), p(1));
            if (u > best_u) {
                best_u = u;
                x = p;
            }
        }
        for (int it = 0; it < 40; ++it) {
            const Eigen::Vector2d grad = potential_gradient(r, phi_c, eps, x(0), x(1));
            if (grad.norm() < 1e-9) break;
            Eigen::Vector2d step = potential_hessian(r, phi_c, eps, x(0), x(1))
                                       .fullPivLu()
                                       .solve(grad);
            const double len = step.norm();
            if (len > 0.3) step *= 0.3 / len;
            x -= step;
        }
        ws.barrier_ghz = potential_value(r, phi_c, eps, x(0), x(1)) - found[0].value;
    }
    return ws;
}

}  // namespace qflux::circuit
