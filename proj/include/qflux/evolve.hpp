// evolve.hpp - time evolution under shaped flux schedules.
//
// The propagator integrates i hbar dU/dt = H(t) U with H in GHz and t in ns,
// so each exact sub-step is exp(-2 pi i H h).  The default scheme samples H at
// the interval midpoint (second order); a commutator-free fourth-order scheme
// with two Gauss nodes per step is available for long two-qubit sweeps where
// the midpoint step count would dominate the runtime.
//
// Frame correction extracts the computational block of a propagated operator
// relative to instantaneous endpoint eigenbases and a free-running per-qubit
// clock, and leakage is probed with a fixed set of computational-subspace
// states.

#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qflux/linalg.hpp"
#include "qflux/model.hpp"
#include "qflux/profile.hpp"
#include "qflux/pulse.hpp"

namespace qflux::evolve {





struct StepControl {
    enum class Scheme { midpoint, cf4 };
    double dt_ns = 1e-3;   // initial step
    double tol = 1e-9;     // max-norm defect target between h and h/2 results
    int max_halvings = 6;
    Scheme scheme = Scheme::midpoint;
    bool fixed_step = false;  // single pass at dt_ns, no halving study
};

namespace detail {

// M <- exp(-2 pi i h Hs) M for real symmetric Hs.
inline void apply_exp_step(const Eigen::MatrixXd& hs, double h, MatrixXc& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hs);
    if (es.info() != Eigen::Success) throw std::runtime_error("step eigensolve failed");
    const auto& v = es.eigenvectors();
    const auto& e = es.eigenvalues();
    const int n = static_cast<int>(hs.rows());
    VectorXc ph(n);
    for (int j = 0; j < n; ++j) {
        const double a = -2.0 * 3.14159265358979323846 * e(j) * h;
        ph(j) = cplx(std::cos(a), std::sin(a));
    }
    MatrixXc w = v.transpose() * m;
    w = ph.asDiagonal() * w;
    m.noalias() = v * w;
}

}  // namespace detail

// Fixed-step pass over [0, T], advancing the columns of m0.
template <class HF>
MatrixXc propagate_fixed(HF&& h_of_t, double duration_ns, double dt_ns,
                         StepControl::Scheme scheme, MatrixXc m) {
    if (!(duration_ns > 0)) throw std::invalid_argument("duration must be positive");
    if (!(dt_ns > 0)) throw std::invalid_argument("step must be positive");
    const long nsteps = std::lround(std::ceil(duration_ns / dt_ns - 1e-12));
    const double h = duration_ns / static_cast<double>(nsteps);
    // Gauss nodes and weights of the two-exponential fourth-order step.
    const double s3 = std::sqrt(3.0);
    const double c1 = 0.5 - s3 / 6.0, c2 = 0.5 + s3 / 6.0;
    const double a1 = (3.0 + 2.0 * s3) / 12.0, a2 = (3.0 - 2.0 * s3) / 12.0;
    for (long i = 0; i < nsteps; ++i) {
        const double t = h * static_cast<double>(i);
        if (scheme == StepControl::Scheme::midpoint) {
            detail::apply_exp_step(h_of_t(t + 0.5 * h), h, m);
        } else {
            const Eigen::MatrixXd h1 = h_of_t(t + c1 * h);
            const Eigen::MatrixXd h2 = h_of_t(t + c2 * h);
            detail::apply_exp_step(a1 * h1 + a2 * h2, h, m);  // early-node-heavy factor first
            detail::apply_exp_step(a2 * h1 + a1 * h2, h, m);
        }
    }
    return m;
}

struct Propagator {
    MatrixXc u;          // propagated columns (full unitary when seeded with identity)
    double duration_ns = 0.0;
    double dt_ns = 0.0;  // final accepted step
    int halvings = 0;
    double defect = 0.0;  // max-norm difference between the last two refinements
    StepControl::Scheme scheme = StepControl::Scheme::midpoint;
};

// Step-halving drive: refine until two consecutive step sizes agree to tol.
template <class HF>
Propagator propagate_columns(HF&& h_of_t, double duration_ns, const MatrixXc& m0,
                             const StepControl& ctl = {}) {
    Propagator out;
    out.duration_ns = duration_ns;
    out.scheme = ctl.scheme;
    double dt = ctl.dt_ns;
    if (ctl.fixed_step) {
        out.u = propagate_fixed(h_of_t, duration_ns, dt, ctl.scheme, m0);
        out.dt_ns = dt;
        return out;
    }
    MatrixXc prev = propagate_fixed(h_of_t, duration_ns, dt, ctl.scheme, m0);
    for (int k = 1; k <= ctl.max_halvings; ++k) {
        dt *= 0.5;
        MatrixXc cur = propagate_fixed(h_of_t, duration_ns, dt, ctl.scheme, m0);
        out.defect = (cur - prev).cwiseAbs().maxCoeff();
        out.halvings = k;
        out.dt_ns = dt;
        if (out.defect < ctl.tol) {
            out.u = std::move(cur);
            return out;
        }
        prev = std::move(cur);
    }
    throw std::runtime_error("time integration did not converge within the halving budget");
}

template <class HF>
Propagator propagate(HF&& h_of_t, int dim, double duration_ns, const StepControl& ctl = {}) {
    MatrixXc id = MatrixXc::Identity(dim, dim);
    return propagate_columns(h_of_t, duration_ns, id, ctl);
}

// ---------------------------------------------------------------------------
// Hamiltonian builders from flux schedules.

inline Eigen::Matrix4d hamiltonian_at(const circuit::CoefficientProfile& prof,
                                      const pulse::PulseSchedule& sched, double t,
                                      const std::string& phic_name = "phi_c",
                                      const std::string& eps_name = "eps") {
    const double phic = sched.channel(phic_name).value(t);
    const double eps = sched.channel(eps_name).value(t);
    return model::hamiltonian_4level(model::at_flux(prof, phic, eps));
}

struct TwoQubitSystem {
    const circuit::CoefficientProfile* prof_a = nullptr;
    const circuit::CoefficientProfile* prof_b = nullptr;
    // Table owner for the mutual coupling versus the two control fluxes; the
    // matrix element entering the coupling is a circuit quantity, so a single
    // table serves both qubits.
    const circuit::CoefficientProfile* coupling = nullptr;
    bool include_bias_crosstalk = true;
};

inline Eigen::MatrixXd hamiltonian_at(const TwoQubitSystem& sys, const pulse::PulseSchedule& sched,
                                      double t) {
    const double phic_a = sched.channel("phi_c_a").value(t);
    const double phic_b = sched.channel("phi_c_b").value(t);
    const double eps_a = sched.channel("eps_a").value(t);
    const double eps_b = sched.channel("eps_b").value(t);
    model::TwoQubitPoint tq =
        model::two_qubit_point(*sys.prof_a, *sys.prof_b, phic_a, eps_a, phic_b, eps_b);
    tq.j_ghz = sys.coupling->coupling_j_ghz(phic_a, phic_b);
    tq.include_bprime = sys.include_bias_crosstalk;
    return model::hamiltonian_2qubit(tq);
}

// ---------------------------------------------------------------------------
// Computational endpoint bases.

struct ComputationalBasis {
    Eigen::MatrixXd p;       // n x k, columns are the labeled computational states
    Eigen::VectorXd energy;  // k, matching columns
    double min_overlap = 1.0;  // labeling quality (1 for the single-qubit case)
};

// Single qubit: the two lowest eigenstates, ordered by energy.  The basis is
// ill-defined when the computational splitting collapses.
inline ComputationalBasis computational_basis_1q(const Eigen::Matrix4d& h) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(h);
    const double w01 = es.eigenvalues()(1) - es.eigenvalues()(0);
    if (w01 < 1e-3)
        throw std::runtime_error("computational basis ill-defined: endpoint splitting below 1 MHz");
    ComputationalBasis b;
    b.p = es.eigenvectors().leftCols(2);
    b.energy = es.eigenvalues().head(2);
    for (int j = 0; j < 2; ++j) {
        int imax;
        b.p.col(j).cwiseAbs().maxCoeff(&imax);
        if (b.p(imax, j) < 0) b.p.col(j) = -b.p.col(j);
    }
    return b;
}

// Two qubits: the four eigenstates of the full Hamiltonian labeled |ab> by
// overlap with products of the endpoint single-qubit eigenstates, in logical
// order 00, 01, 10, 11 (first index qubit a).  The weak residual coupling at
// the endpoints makes the labeling unambiguous; a collapsed overlap means the
// endpoint is not a valid idle point.
inline ComputationalBasis computational_basis_2q(const Eigen::MatrixXd& h16,
                                                 const Eigen::Matrix4d& ha,
                                                 const Eigen::Matrix4d& hb) {
    const ComputationalBasis ba = computational_basis_1q(ha);
    const ComputationalBasis bb = computational_basis_1q(hb);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h16);
    ComputationalBasis out;
    out.p.resize(16, 4);
    out.energy.resize(4);
    std::vector<bool> used(16, false);
    for (int a = 0; a < 2; ++a)
        for (int bq = 0; bq < 2; ++bq) {
            const Eigen::VectorXd target =
                kron(Eigen::MatrixXd(ba.p.col(a)), Eigen::MatrixXd(bb.p.col(bq)));
            int best = -1;
            double best_ov = 0.0;
            for (int j = 0; j < 16; ++j) {
                if (used[j]) continue;
                const double ov = std::abs(target.dot(es.eigenvectors().col(j)));
                if (ov > best_ov) {
                    best_ov = ov;
                    best = j;
                }
            }
            if (best_ov < 0.8)
                throw std::runtime_error(
                    "computational basis ill-defined: endpoint states do not factor");
            used[best] = true;
            const int k = 2 * a + bq;
            const double sgn = target.dot(es.eigenvectors().col(best)) < 0 ? -1.0 : 1.0;
            out.p.col(k) = sgn * es.eigenvectors().col(best);
            out.energy(k) = es.eigenvalues()(best);
            out.min_overlap = std::min(out.min_overlap, best_ov);
        }
    return out;
}

// ---------------------------------------------------------------------------
// Frame correction.

struct QubitFrame {
    double clock_ghz = 0.0;  // free-running reference for the |1> phase
    double theta0 = 0.0;     // calibrated offsets, radians
    double theta1 = 0.0;
};

struct FrameSpec {
    std::vector<QubitFrame> qubits;  // size 1 or 2 (qubit a first)
};

inline void to_json(nlohmann::json& j, const QubitFrame& f) {
    j = nlohmann::json{{"clock_ghz", f.clock_ghz}, {"theta0", f.theta0}, {"theta1", f.theta1}};
}
inline void from_json(const nlohmann::json& j, QubitFrame& f) {
    j.at("clock_ghz").get_to(f.clock_ghz);
    f.theta0 = j.value("theta0", 0.0);
    f.theta1 = j.value("theta1", 0.0);
}

// B = R(T)^dag P_T^dag U P_0, with the propagated columns W = U P_0 supplied
// directly.  R advances logical state k of each qubit by 2 pi f_clock T k
// plus the calibrated offset, so an idling qubit maps to the identity up to
// global phase.
inline MatrixXc frame_correct(const MatrixXc& w, const ComputationalBasis& end_basis,
                              const FrameSpec& frame, double duration_ns) {
    const int k = static_cast<int>(w.cols());
    if ((k == 2 && frame.qubits.size() != 1) || (k == 4 && frame.qubits.size() != 2) ||
        (k != 2 && k != 4))
        throw std::invalid_argument("frame correction expects 2 or 4 computational columns");
    MatrixXc b = end_basis.p.transpose().cast<cplx>() * w;
    const double two_pi = 2.0 * 3.14159265358979323846;
    for (int i = 0; i < k; ++i) {
        double phi = 0.0;
        if (k == 2) {
            const auto& q = frame.qubits[0];
            phi = i == 0 ? q.theta0 : two_pi * q.clock_ghz * duration_ns + q.theta1;
        } else {
            const int a = i / 2, bq = i % 2;
            const auto& qa = frame.qubits[0];
            const auto& qb = frame.qubits[1];
            phi = (a ? two_pi * qa.clock_ghz * duration_ns + qa.theta1 : qa.theta0) +
                  (bq ? two_pi * qb.clock_ghz * duration_ns + qb.theta1 : qb.theta0);
        }
        b.row(i) *= cplx(std::cos(phi), std::sin(phi));
    }
    return b;
}

// ---------------------------------------------------------------------------
// Leakage probes.

// Cardinal probe coefficients in the computational subspace: basis states plus
// equal-weight and quarter-cycle superpositions of every pair.
inline std::vector<VectorXc> cardinal_probes(int k) {
    std::vector<VectorXc> probes;
    const double r = 1.0 / std::sqrt(2.0);
    if (k == 2) {
        VectorXc v(2);
        v << 1, 0; probes.push_back(v);
        v << 0, 1; probes.push_back(v);
        v << r, r; probes.push_back(v);
        v << r, -r; probes.push_back(v);
        v << r, cplx(0, r); probes.push_back(v);
        v << r, cplx(0, -r); probes.push_back(v);
        return probes;
    }
    for (int i = 0; i < k; ++i) {
        VectorXc v = VectorXc::Zero(k);
        v(i) = 1;
        probes.push_back(v);
    }
    for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j) {
            VectorXc v = VectorXc::Zero(k);
            v(i) = r;
            v(j) = r;
            probes.push_back(v);
            v(j) = cplx(0, r);
            probes.push_back(v);
        }
    return probes;
}

struct LeakageReport {
    double max_leakage = 0.0;
    std::vector<double> per_probe;
};

// Population escaping the computational subspace: 1 - |P_T^dag U psi|^2 for
// each probe prepared in the t = 0 computational basis.  W = U P_0.
inline LeakageReport leakage(const MatrixXc& w, const ComputationalBasis& end_basis) {
    const MatrixXc block = end_basis.p.transpose().cast<cplx>() * w;
    LeakageReport rep;
    for (const auto& c : cardinal_probes(static_cast<int>(w.cols()))) {
        const double kept = (block * c).squaredNorm();
        const double leak = std::max(0.0, 1.0 - kept);
        rep.per_probe.push_back(leak);
        rep.max_leakage = std::max(rep.max_leakage, leak);
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Adiabatic level tracking (dynamical-phase bookkeeping for diagonal gates).

// Integrates the instantaneous eigenvalues that connect continuously to the
// columns of p0, following each branch by maximum overlap on a dense grid.
// Returns the integrals of E_k(t) dt over [0, T] via Simpson weights.
template <class HF>
Eigen::VectorXd integrate_tracked_energies(HF&& h_of_t, double duration_ns,
                                           const Eigen::MatrixXd& p0, int nsamp = 6001) {
    if (nsamp < 3 || nsamp % 2 == 0) throw std::invalid_argument("nsamp must be odd and >= 3");
    const int k = static_cast<int>(p0.cols());
    Eigen::MatrixXd cur = p0;
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(k);
    const double h = duration_ns / static_cast<double>(nsamp - 1);
    for (int i = 0; i < nsamp; ++i) {
        const double t = h * static_cast<double>(i);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h_of_t(t));
        Eigen::VectorXd e_now(k);
        Eigen::MatrixXd next = cur;
        std::vector<bool> used(es.eigenvalues().size(), false);
        for (int c = 0; c < k; ++c) {
            int best = -1;
            double best_ov = 0.0;
            for (int j = 0; j < es.eigenvalues().size(); ++j) {
                if (used[j]) continue;
                const double ov = std::abs(cur.col(c).dot(es.eigenvectors().col(j)));
                if (ov > best_ov) {
                    best_ov = ov;
                    best = j;
                }
            }
            used[best] = true;
            const double sgn = cur.col(c).dot(es.eigenvectors().col(best)) < 0 ? -1.0 : 1.0;
            next.col(c) = sgn * es.eigenvectors().col(best);
            e_now(c) = es.eigenvalues()(best);
        }
        cur = next;
        const double w = (i == 0 || i == nsamp - 1) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        acc += (w * h / 3.0) * e_now;
    }
    return acc;
}

}  // namespace qflux::evolve
