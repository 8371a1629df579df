// profile.hpp - flux-dependent coefficient profile of the reduced qubit.
//
// For each control flux the 2-D circuit spectrum is boiled down to four
// numbers: the tunneling splitting Delta, the bias slope b, the oscillator
// coupling g, and the screening-current flux offset B' seen by a neighbouring
// qubit.  Profiles are sampled on a control-flux grid, interpolated with a
// monotone cubic, and persisted as CSV plus a JSON sidecar; the two-qubit
// coupling J is tabulated on the same grid and interpolated bilinearly.

#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "qflux/circuit.hpp"
#include "qflux/potential.hpp"
#include "qflux/spectrum2d.hpp"

namespace qflux::circuit {

// Piecewise cubic Hermite interpolant with Fritsch-Carlson slope limiting:
// preserves monotone runs of the data, no overshoot between samples.
class MonotoneCubic {
  public:
    MonotoneCubic() = default;
    MonotoneCubic(std::vector<double> x, std::vector<double> y)
        : x_(std::move(x)), y_(std::move(y)) {
        const size_t n = x_.size();
        if (n < 2 || y_.size() != n)
            throw std::invalid_argument("interpolant needs two or more samples");
        for (size_t i = 1; i < n; ++i)
            if (!(x_[i] > x_[i - 1]))
                throw std::invalid_argument("interpolant abscissae must increase");
        std::vector<double> d(n - 1);
        for (size_t i = 0; i + 1 < n; ++i) d[i] = (y_[i + 1] - y_[i]) / (x_[i + 1] - x_[i]);
        m_.assign(n, 0.0);
        m_[0] = d[0];
        m_[n - 1] = d[n - 2];
        for (size_t i = 1; i + 1 < n; ++i)
            m_[i] = (d[i - 1] * d[i] > 0.0) ? 0.5 * (d[i - 1] + d[i]) : 0.0;
        for (size_t i = 0; i + 1 < n; ++i) {
            if (d[i] == 0.0) {
                m_[i] = m_[i + 1] = 0.0;
                continue;
            }
            const double a = m_[i] / d[i], b = m_[i + 1] / d[i];
            const double s = a * a + b * b;
            if (s > 9.0) {
                const double t = 3.0 / std::sqrt(s);
                m_[i] = t * a * d[i];
                m_[i + 1] = t * b * d[i];
            }
        }
    }

    double operator()(double x) const {
        if (x_.empty()) throw std::logic_error("empty interpolant");
        if (x < x_.front() - 1e-12 || x > x_.back() + 1e-12)
            throw std::out_of_range("query outside profile range");
        x = std::clamp(x, x_.front(), x_.back());
        const size_t i = std::min(
            x_.size() - 2,
            static_cast<size_t>(std::upper_bound(x_.begin(), x_.end(), x) - x_.begin() - 1));
        const double h = x_[i + 1] - x_[i];
        const double t = (x - x_[i]) / h;
        const double t2 = t * t, t3 = t2 * t;
        return (2 * t3 - 3 * t2 + 1) * y_[i] + (t3 - 2 * t2 + t) * h * m_[i] +
               (-2 * t3 + 3 * t2) * y_[i + 1] + (t3 - t2) * h * m_[i + 1];
    }

    double x_min() const { return x_.front(); }
    double x_max() const { return x_.back(); }

  private:
    std::vector<double> x_, y_, m_;
};

struct ProfileSample {
    double phi_c;         // control flux, Phi0
    double delta_ghz;     // tunneling splitting at zero bias
    double b_ghz_per_phi0;  // bias slope
    double g_ghz;         // oscillator coupling
    double bprime_uphi0;  // neighbour flux offset from the screening current
};

struct ProfileQuery {
    double delta_ghz, b_ghz_per_phi0, g_ghz, bprime_uphi0;
};

class CoefficientProfile {
  public:
    std::vector<ProfileSample> rows;
    double f_t_ghz = 0.0;
    double eps_zp = 0.0;            // oscillator zero-point bias, Phi0
    bool perturbative_warning = false;
    std::vector<double> j_axis;     // control-flux axis of the coupling table
    Eigen::MatrixXd j_table;        // J in GHz

    void finalize() {
        if (rows.size() < 2) throw std::invalid_argument("profile needs two or more rows");
        std::vector<double> x, d, b, g, bp;
        for (const auto& r : rows) {
            x.push_back(r.phi_c);
            d.push_back(r.delta_ghz);
            b.push_back(r.b_ghz_per_phi0);
            g.push_back(r.g_ghz);
            bp.push_back(r.bprime_uphi0);
        }
        delta_ = MonotoneCubic(x, d);
        b_ = MonotoneCubic(x, b);
        g_ = MonotoneCubic(x, g);
        bprime_ = MonotoneCubic(x, bp);
        validate();
    }

    void validate() const {
        for (const auto& r : rows)
            if (r.delta_ghz < -1e-9)
                throw std::runtime_error("profile invariant violated: Delta < 0");
        // the splitting must grow monotonically across the well-merging region
        for (size_t i = 1; i < rows.size(); ++i) {
            const double lo = std::max(rows[i - 1].phi_c, portal_lo);
            const double hi = std::min(rows[i].phi_c, portal_hi);
            if (lo < hi && rows[i].delta_ghz < rows[i - 1].delta_ghz - 1e-6)
                throw std::runtime_error("profile invariant violated: Delta not monotone across portal");
        }
    }

    ProfileQuery query(double phi_c) const {
        return {delta_(phi_c), b_(phi_c), g_(phi_c), bprime_(phi_c)};
    }
    double phi_c_min() const { return delta_.x_min(); }
    double phi_c_max() const { return delta_.x_max(); }

    double coupling_j_ghz(double phi_c_a, double phi_c_b) const {
        const auto& ax = j_axis;
        if (ax.size() < 2 || j_table.rows() != static_cast<Eigen::Index>(ax.size()))
            throw std::logic_error("coupling table missing");
        auto cell = [&](double v) {
            if (v < ax.front() - 1e-12 || v > ax.back() + 1e-12)
                throw std::out_of_range("coupling query outside table range");
            v = std::clamp(v, ax.front(), ax.back());
            size_t i = std::min(
                ax.size() - 2,
                static_cast<size_t>(std::upper_bound(ax.begin(), ax.end(), v) - ax.begin() - 1));
            return std::pair<size_t, double>{i, (v - ax[i]) / (ax[i + 1] - ax[i])};
        };
        const auto [ia, ta] = cell(phi_c_a);
        const auto [ib, tb] = cell(phi_c_b);
        return (1 - ta) * (1 - tb) * j_table(ia, ib) + ta * (1 - tb) * j_table(ia + 1, ib) +
               (1 - ta) * tb * j_table(ia, ib + 1) + ta * tb * j_table(ia + 1, ib + 1);
    }

    static constexpr double portal_lo = 1.42;
    static constexpr double portal_hi = 1.52;

  private:
    MonotoneCubic delta_, b_, g_, bprime_;
};

// Control-flux sampling: coarse in the frozen double-well regime, fine across
// the portal where the coefficients bend sharply, coarse again toward parking.
inline std::vector<double> default_phi_c_grid() {
    std::vector<double> g;
    for (double p = 1.30; p < 1.42 - 1e-9; p += 0.01) g.push_back(p);
    for (double p = 1.42; p < 1.50 - 1e-9; p += 0.0025) g.push_back(p);
    for (double p = 1.50; p < 1.70 + 1e-9; p += 0.01) g.push_back(p);
    return g;
}

// Reduce the circuit to profile rows on the given control-flux grid.  All
// quantities come from the zero-bias spectrum: the doublet splitting, the
// doublet matrix element of s2 (which sets b, g, and J), and the symmetric
// averages entering the screening current.
inline CoefficientProfile extract_profile(const Reduction& r,
                                          const std::vector<double>& phi_c_grid,
                                          const GridSpec& spec = {}, int n_states = 6) {
    CoefficientProfile out;
    out.f_t_ghz = r.f_t_ghz;
    out.eps_zp = r.eps_zp;
    std::vector<double> ms;
    for (const double phi_c : phi_c_grid) {
        const PotentialGrid grid = build_potential(r, phi_c, 0.0, spec);
        SolveOptions opt;
        opt.n_states = n_states;
        opt.kinetic_ghz = r.kinetic_ghz;
        opt.symmetrize_parity = true;
        const Spectrum2D sp = solve_spectrum_2d(grid, opt);

        const double s6i = 1.0 / std::sqrt(6.0), s3i = 1.0 / std::sqrt(3.0);
        const double m = std::abs(
            sp.element(0, 1, grid, [](double, double s2) { return s2; }));
        const double cos_a_sym =
            0.5 * (sp.element(0, 0, grid,
                              [&](double s1, double s2) {
                                  return std::cos(s1 * s3i - s2 * s6i);
                              }) +
                   sp.element(1, 1, grid, [&](double s1, double s2) {
                       return std::cos(s1 * s3i - s2 * s6i);
                   }));

        ProfileSample row;
        row.phi_c = phi_c;
        row.delta_ghz = std::max(0.0, sp.energies[1] - sp.energies[0]);
        row.b_ghz_per_phi0 = 2.0 * k_ind_ghz_ph * r.eps_s2_coef * m;
        row.g_ghz = 0.5 * row.b_ghz_per_phi0 * r.eps_zp;
        const double s3_mean = r.s3_relax * std::sin(r.chi_per_phic * phi_c) * cos_a_sym;
        const double current = r.cur_phic * phi_c + r.cur_s3 * s3_mean;
        row.bprime_uphi0 = std::abs(r.params.M_pH * current) * 1e6;
        out.rows.push_back(row);
        ms.push_back(m);

        if (row.g_ghz > 0.01 * k_ind_ghz_ph * r.lam.lambda2) out.perturbative_warning = true;
    }
    // J table: the screening currents of the two qubits are separable, so the
    // table is an outer product of the doublet matrix elements
    const double jfac = r.params.M_pH * k_ind_ghz_ph * r.lam.lambda2 * r.lam.lambda2 / 6.0;
    out.j_axis = phi_c_grid;
    out.j_table.resize(phi_c_grid.size(), phi_c_grid.size());
    for (size_t i = 0; i < ms.size(); ++i)
        for (size_t j = 0; j < ms.size(); ++j) out.j_table(i, j) = jfac * ms[i] * ms[j];
    out.finalize();
    return out;
}

namespace detail {

inline std::string sidecar_path(const std::string& csv_path) {
    const auto dot = csv_path.rfind('.');
    return (dot == std::string::npos ? csv_path : csv_path.substr(0, dot)) + ".json";
}
inline std::string jtable_path(const std::string& csv_path) {
    const auto dot = csv_path.rfind('.');
    return (dot == std::string::npos ? csv_path : csv_path.substr(0, dot)) + "_j.csv";
}

inline std::vector<double> parse_csv_line(const std::string& line) {
    std::vector<double> vals;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) vals.push_back(std::stod(cell));
    return vals;
}

}  // namespace detail

inline void save_profile(const CoefficientProfile& p, const std::string& csv_path) {
    {
        std::ofstream out(csv_path);
        if (!out) throw std::runtime_error("cannot write profile: " + csv_path);
        out << "phi_c,delta_ghz,b_ghz_per_phi0,g_ghz,bprime_uphi0\n";
        out.precision(12);
        for (const auto& r : p.rows)
            out << r.phi_c << ',' << r.delta_ghz << ',' << r.b_ghz_per_phi0 << ','
                << r.g_ghz << ',' << r.bprime_uphi0 << '\n';
    }
    {
        nlohmann::json j{{"f_t_ghz", p.f_t_ghz},
                         {"eps_zp_phi0", p.eps_zp},
                         {"perturbative_warning", p.perturbative_warning},
                         {"interpolation", "monotone_cubic"},
                         {"columns", {"phi_c", "delta_ghz", "b_ghz_per_phi0", "g_ghz",
                                      "bprime_uphi0"}},
                         {"units", {{"phi_c", "Phi0"},
                                    {"delta_ghz", "GHz"},
                                    {"b_ghz_per_phi0", "GHz/Phi0"},
                                    {"g_ghz", "GHz"},
                                    {"bprime_uphi0", "uPhi0"}}}};
        std::ofstream out(detail::sidecar_path(csv_path));
        if (!out) throw std::runtime_error("cannot write profile sidecar");
        out << j.dump(2) << "\n";
    }
    if (!p.j_axis.empty()) {
        std::ofstream out(detail::jtable_path(csv_path));
        if (!out) throw std::runtime_error("cannot write coupling table");
        out.precision(12);
        out << 0.0;
        for (const double x : p.j_axis) out << ',' << x;
        out << '\n';
        for (size_t i = 0; i < p.j_axis.size(); ++i) {
            out << p.j_axis[i];
            for (size_t j = 0; j < p.j_axis.size(); ++j) out << ',' << p.j_table(i, j);
            out << '\n';
        }
    }
}

inline CoefficientProfile load_profile(const std::string& csv_path) {
    CoefficientProfile p;
    {
        std::ifstream in(csv_path);
        if (!in) throw std::runtime_error("cannot open profile: " + csv_path);
        std::string line;
        if (!std::getline(in, line) ||
            line != "phi_c,delta_ghz,b_ghz_per_phi0,g_ghz,bprime_uphi0")
            throw std::runtime_error("profile header mismatch: " + csv_path);
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            const auto v = detail::parse_csv_line(line);
            if (v.size() != 5) throw std::runtime_error("malformed profile row");
            p.rows.push_back({v[0], v[1], v[2], v[3], v[4]});
        }
    }
    {
        std::ifstream in(detail::sidecar_path(csv_path));
        if (!in) throw std::runtime_error("missing profile sidecar for " + csv_path);
        nlohmann::json j;
        in >> j;
        p.f_t_ghz = j.at("f_t_ghz").get<double>();
        p.eps_zp = j.at("eps_zp_phi0").get<double>();
        p.perturbative_warning = j.at("perturbative_warning").get<bool>();
    }
    {
        std::ifstream in(detail::jtable_path(csv_path));
        if (in) {
            std::string line;
            std::getline(in, line);
            auto axis = detail::parse_csv_line(line);
            axis.erase(axis.begin());
            p.j_axis = axis;
            p.j_table.resize(axis.size(), axis.size());
            for (size_t i = 0; i < axis.size(); ++i) {
                if (!std::getline(in, line)) throw std::runtime_error("short coupling table");
                const auto v = detail::parse_csv_line(line);
                if (v.size() != axis.size() + 1)
                    throw std::runtime_error("malformed coupling table row");
                for (size_t j = 0; j < axis.size(); ++j) p.j_table(i, j) = v[j + 1];
            }
        }
    }
    p.finalize();
    return p;
}

}  // namespace qflux::circuit
