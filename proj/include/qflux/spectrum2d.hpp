// spectrum2d.hpp - low-lying eigenstates of the two-dimensional circuit
// Hamiltonian H = -D (d^2/ds1^2 + d^2/ds2^2) + U(s1, s2).
//
// Fourth-order central differences with Dirichlet walls on the working
// rectangle, shift-invert Lanczos with full reorthogonalization on top of a
// sparse LDLT factorization.  The shift sits below the potential minimum, so
// the shifted operator is positive definite and the largest eigenvalues of
// its inverse are the lowest states of H.

#pragma once

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "qflux/potential.hpp"

namespace qflux::circuit {

struct Spectrum2D {
    std::vector<double> energies;   // GHz, ascending
    Eigen::MatrixXd states;         // column k = l2-normalized grid vector
    std::vector<double> residuals;  // ||H v - E v|| / (1 + |E|)
    int n1 = 0, n2 = 0;
    double h1 = 0.0, h2 = 0.0;

    // matrix element <a| f |b> for a function sampled on the grid
    template <class F>
    double element(int a, int b, const PotentialGrid& g, F&& f) const {
        double acc = 0.0;
        for (int i = 0; i < n1; ++i)
            for (int j = 0; j < n2; ++j)
                acc += states(i * n2 + j, a) * states(i * n2 + j, b) *
                       f(g.s1(i), g.s2(j));
        return acc;
    }
};

struct SolveOptions {
    int n_states = 6;
    double kinetic_ghz = 0.0;      // Laplacian prefactor; filled from Reduction
    bool symmetrize_parity = false;  // enforce inversion parity (bias-free grids)
    int max_iter = 240;
    double tol = 1e-13;            // Lanczos residual bound on the inverted spectrum
};

namespace detail {

inline Eigen::SparseMatrix<double> assemble_hamiltonian(const PotentialGrid& g,
                                                        double D) {
    const int n1 = g.spec.n1, n2 = g.spec.n2;
    const int N = n1 * n2;
    // fourth-order second derivative: (-1, 16, -30, 16, -1) / 12h^2
    const double k1 = D / (12.0 * g.h1 * g.h1);
    const double k2 = D / (12.0 * g.h2 * g.h2);
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<size_t>(N) * 9);
    auto idx = [n2](int i, int j) { return i * n2 + j; };
    for (int i = 0; i < n1; ++i) {
        for (int j = 0; j < n2; ++j) {
            const int row = idx(i, j);
            trip.emplace_back(row, row, g.U(i, j) + 30.0 * (k1 + k2));
            if (i >= 1) trip.emplace_back(row, idx(i - 1, j), -16.0 * k1);
            if (i + 1 < n1) trip.emplace_back(row, idx(i + 1, j), -16.0 * k1);
            if (i >= 2) trip.emplace_back(row, idx(i - 2, j), k1);
            if (i + 2 < n1) trip.emplace_back(row, idx(i + 2, j), k1);
            if (j >= 1) trip.emplace_back(row, idx(i, j - 1), -16.0 * k2);
            if (j + 1 < n2) trip.emplace_back(row, idx(i, j + 1), -16.0 * k2);
            if (j >= 2) trip.emplace_back(row, idx(i, j - 2), k2);
            if (j + 2 < n2) trip.emplace_back(row, idx(i, j + 2), k2);
        }
    }
    Eigen::SparseMatrix<double> H(N, N);
    H.setFromTriplets(trip.begin(), trip.end());
    return H;
}

// inversion about the grid center; exact only for odd point counts
inline Eigen::VectorXd apply_inversion(const Eigen::VectorXd& v, int n1, int n2) {
    Eigen::VectorXd w(v.size());
    for (int i = 0; i < n1; ++i)
        for (int j = 0; j < n2; ++j)
            w(i * n2 + j) = v((n1 - 1 - i) * n2 + (n2 - 1 - j));
    return w;
}

inline void fix_phase(Eigen::Ref<Eigen::VectorXd> v) {
    int arg = 0;
    double best = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i)
        if (std::abs(v(i)) > best) {
            best = std::abs(v(i));
            arg = static_cast<int>(i);
        }
    if (v(arg) < 0) v = -v;
}

}  // namespace detail

inline Spectrum2D solve_spectrum_2d(const PotentialGrid& g, const SolveOptions& opt) {
    if (opt.kinetic_ghz <= 0)
        throw std::invalid_argument("kinetic prefactor must be positive");
    const int N = g.spec.n1 * g.spec.n2;
    const int k = opt.n_states;
    if (k < 1 || k > 12 || N < 10 * k)
        throw std::invalid_argument("unreasonable state count for grid size");

    const Eigen::SparseMatrix<double> H = detail::assemble_hamiltonian(g, opt.kinetic_ghz);
    const double sigma = g.u_min - 1.0;
    Eigen::SparseMatrix<double> shifted = H;
    for (int i = 0; i < N; ++i) shifted.coeffRef(i, i) -= sigma;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver;
    solver.compute(shifted);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("factorization of the shifted Hamiltonian failed");

    // Lanczos on (H - sigma)^{-1} with full reorthogonalization (CGS2)
    const int m_max = std::min(opt.max_iter, N);
    Eigen::MatrixXd V(N, m_max + 1);
    std::vector<double> alpha, beta;  // beta[j] links v_j and v_{j+1}
    {
        std::mt19937 rng(0x9e3779b9);
        std::normal_distribution<double> dist;
        Eigen::VectorXd v0(N);
        for (int i = 0; i < N; ++i) v0(i) = dist(rng);
        V.col(0) = v0 / v0.norm();
    }
    int m = 0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri_es;
    for (int j = 0; j < m_max; ++j) {
        Eigen::VectorXd w = solver.solve(V.col(j));
        if (j > 0) w -= beta[j - 1] * V.col(j - 1);
        const double a = V.col(j).dot(w);
        alpha.push_back(a);
        w -= a * V.col(j);
        for (int pass = 0; pass < 2; ++pass) {
            const Eigen::VectorXd proj = V.leftCols(j + 1).transpose() * w;
            w -= V.leftCols(j + 1) * proj;
        }
        const double b = w.norm();
        m = j + 1;
        if (b < 1e-14) {
            beta.push_back(0.0);
            break;
        }
        beta.push_back(b);
        V.col(j + 1) = w / b;

        if (m >= std::max(2 * k + 6, 24) && (m % 10 == 0 || j == m_max - 1)) {
            Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
            for (int i = 0; i < m; ++i) {
                T(i, i) = alpha[i];
                if (i + 1 < m) T(i, i + 1) = T(i + 1, i) = beta[i];
            }
            tri_es.compute(T);
            bool done = true;
            for (int s = 0; s < k; ++s) {
                const double bound =
                    beta[m - 1] * std::abs(tri_es.eigenvectors()(m - 1, m - 1 - s));
                if (bound > opt.tol) done = false;
            }
            if (done) break;
        }
    }
    if (m < k) throw std::runtime_error("Lanczos space smaller than requested states");

    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) {
        T(i, i) = alpha[i];
        if (i + 1 < m) T(i, i + 1) = T(i + 1, i) = beta[i];
    }
    tri_es.compute(T);

    // largest theta of the inverted operator = lowest energies of H
    Eigen::MatrixXd ritz(N, k);
    for (int s = 0; s < k; ++s)
        ritz.col(s) = V.leftCols(m) * tri_es.eigenvectors().col(m - 1 - s);

    // Rayleigh-Ritz in the extracted subspace, optionally split by parity so
    // near-degenerate tunnel doublets come out as symmetry eigenstates
    Eigen::MatrixXd basis = ritz;
    {
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(basis);
        basis = qr.householderQ() * Eigen::MatrixXd::Identity(N, k);
    }
    Eigen::MatrixXd Hs(N, k);
    for (int s = 0; s < k; ++s) Hs.col(s) = H * basis.col(s);
    Eigen::MatrixXd Hk = basis.transpose() * Hs;

    Spectrum2D out;
    out.n1 = g.spec.n1;
    out.n2 = g.spec.n2;
    out.h1 = g.h1;
    out.h2 = g.h2;
    out.states.resize(N, k);

    if (opt.symmetrize_parity) {
        if (g.spec.n1 % 2 == 0 || g.spec.n2 % 2 == 0 ||
            std::abs(g.spec.c1) > 1e-12 || std::abs(g.spec.c2) > 1e-12)
            throw std::invalid_argument("parity symmetrization needs an origin-centered odd grid");
        Eigen::MatrixXd Pk(k, k);
        for (int s = 0; s < k; ++s) {
            const Eigen::VectorXd pv = detail::apply_inversion(basis.col(s), out.n1, out.n2);
            for (int t = 0; t < k; ++t) Pk(t, s) = basis.col(t).dot(pv);
        }
        Pk = 0.5 * (Pk + Pk.transpose()).eval();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> pes(Pk);
        // group the subspace by parity sign, diagonalize H inside each block
        std::vector<std::pair<double, Eigen::VectorXd>> all;
        for (int sign = 0; sign < 2; ++sign) {
            std::vector<int> cols;
            for (int s = 0; s < k; ++s)
                if ((sign == 0) == (pes.eigenvalues()(s) > 0)) cols.push_back(s);
            if (cols.empty()) continue;
            Eigen::MatrixXd B(k, static_cast<int>(cols.size()));
            for (size_t c = 0; c < cols.size(); ++c) B.col(c) = pes.eigenvectors().col(cols[c]);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> hes(B.transpose() * Hk * B);
            for (int c = 0; c < hes.eigenvalues().size(); ++c)
                all.emplace_back(hes.eigenvalues()(c),
                                 Eigen::VectorXd(B * hes.eigenvectors().col(c)));
        }
        std::sort(all.begin(), all.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        for (int s = 0; s < k; ++s) {
            out.energies.push_back(all[s].first);
            out.states.col(s) = basis * all[s].second;
        }
    } else {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> hes(Hk);
        for (int s = 0; s < k; ++s) {
            out.energies.push_back(hes.eigenvalues()(s));
            out.states.col(s) = basis * hes.eigenvectors().col(s);
        }
    }

    for (int s = 0; s < k; ++s) {
        detail::fix_phase(out.states.col(s));
        const double E = out.energies[s];
        const double res = (H * out.states.col(s) - E * out.states.col(s)).norm() /
                           (1.0 + std::abs(E));
        out.residuals.push_back(res);
    }
    const double worst = *std::max_element(out.residuals.begin(), out.residuals.end());
    if (worst > 1e-4)
        throw std::runtime_error("eigensolver residual check failed");
    return out;
}

}  // namespace qflux::circuit
