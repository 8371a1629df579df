// pulse.hpp - shaped dc flux schedules built from sums of tanh segments.
//
// A schedule holds one channel per controlled flux (control flux phi_c and
// bias eps, once per qubit).  Each channel is baseline + sum of
// delta * tanh((t - dt - t_max)/tau) terms, where dt is a per-channel timing
// offset used to model pulse desynchronization.  Schedules are immutable
// value objects; evaluation is pure.

#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace qflux::pulse {

struct TanhSegment {
    double delta = 0.0;  // flux excursion, Phi0
    double t_max = 0.0;  // center time, ns
    double tau = 1.0;    // rise scale, ns
};

enum class ChannelKind { control, bias };

struct Channel {
    std::string name;    // "phi_c", "eps", "phi_c_a", "eps_b", ...
    double baseline = 0.0;  // Phi0
    std::vector<TanhSegment> segments;
    double dt = 0.0;     // timing offset, ns

    ChannelKind kind() const {
        if (name.rfind("phi_c", 0) == 0) return ChannelKind::control;
        if (name.rfind("eps", 0) == 0) return ChannelKind::bias;
        throw std::invalid_argument("channel name must start with phi_c or eps: " + name);
    }

    double value(double t) const {
        double v = baseline;
        for (const auto& s : segments) v += s.delta * std::tanh((t - dt - s.t_max) / s.tau);
        return v;
    }
    double slope(double t) const {
        double v = 0.0;
        for (const auto& s : segments) {
            const double c = std::cosh((t - dt - s.t_max) / s.tau);
            v += s.delta / s.tau / (c * c);
        }
        return v;
    }
};

struct PulseSchedule {
    std::vector<Channel> channels;
    double duration_ns = 0.0;

    const Channel& channel(const std::string& name) const {
        for (const auto& c : channels)
            if (c.name == name) return c;
        throw std::invalid_argument("no such channel: " + name);
    }
    bool has_channel(const std::string& name) const {
        for (const auto& c : channels)
            if (c.name == name) return true;
        return false;
    }

    void check_valid_object() const {
        if (!(duration_ns > 0)) throw std::invalid_argument("schedule duration must be positive");
        for (const auto& c : channels) {
            c.kind();  // validates the name
            for (const auto& s : c.segments)
                if (!(s.tau > 0)) throw std::invalid_argument("segment tau must be positive");
        }
    }
};

inline double evaluate(const PulseSchedule& s, const std::string& channel, double t) {
    if (t < -1e-12 || t > s.duration_ns + 1e-12)
        throw std::domain_error("evaluation time outside schedule duration");
    return s.channel(channel).value(t);
}

// Append a quasi-linear transition from value `from` to value `to` over
// [t0, t1] as a train of equal tanh steps spaced one rise scale apart.  The
// overlap holds the slope within a few percent of the mean
// (to - from)/(t1 - t0), so ramp durations can be sized directly against the
// slew limit.  The caller is responsible for `from` matching the channel's
// settled value at t0.
inline void append_ramp(Channel& ch, double from, double to, double t0, double t1,
                        double tau = 0.8) {
    if (!(t1 > t0) || !(tau > 0)) throw std::invalid_argument("bad ramp window");
    const double inner = (t1 - t0) - 5.0 * tau;
    int n = inner > 0 ? static_cast<int>(std::lround(inner / tau)) + 1 : 1;
    if (n < 1) n = 1;
    const double delta = (to - from) / (2.0 * n);
    const double first = t0 + 2.5 * tau;
    const double spacing = n > 1 ? inner / (n - 1) : 0.0;
    for (int i = 0; i < n; ++i)
        ch.segments.push_back({delta, n > 1 ? first + i * spacing : 0.5 * (t0 + t1), tau});
}

// Pin the channel's settled pre-pulse value.  tanh trains sum to
// baseline - sum(delta) at t << first segment, so one-way ramps (net flux
// change) need the baseline rebased after the segments are in place.
inline void set_start(Channel& ch, double value) {
    double s = 0.0;
    for (const auto& seg : ch.segments) s += seg.delta;
    ch.baseline = value + s;
}

struct ChannelReport {
    std::string name;
    double max_slew_phi0_per_s = 0.0;
    bool slew_ok = true;
};

struct ValidationReport {
    std::vector<ChannelReport> channels;
    double bandwidth_ghz = 0.0;  // proxy 1/(2 pi tau_min)
    bool bandwidth_ok = true;
    bool pass = true;

    static constexpr double slew_limit_phi0_per_s = 7e6;
    static constexpr double bandwidth_limit_ghz = 1.0;
};

// Slew bound per channel: the analytic worst case sum(|delta|/tau) refined by
// dense sampling of the exact derivative; bandwidth proxy from the fastest
// rise scale.
inline ValidationReport validate(const PulseSchedule& s) {
    s.check_valid_object();
    ValidationReport rep;
    double tau_min = std::numeric_limits<double>::infinity();
    for (const auto& c : s.channels) {
        ChannelReport cr;
        cr.name = c.name;
        double bound = 0.0;
        for (const auto& seg : c.segments) {
            bound += std::abs(seg.delta) / seg.tau;
            tau_min = std::min(tau_min, seg.tau);
        }
        double peak = 0.0;
        if (!c.segments.empty()) {
            double step = std::numeric_limits<double>::infinity();
            for (const auto& seg : c.segments) step = std::min(step, seg.tau / 8.0);
            for (double t = 0.0; t <= s.duration_ns; t += step)
                peak = std::max(peak, std::abs(c.slope(t)));
            for (const auto& seg : c.segments) {
                const double tc = seg.t_max + c.dt;
                if (tc >= 0 && tc <= s.duration_ns) peak = std::max(peak, std::abs(c.slope(tc)));
            }
            peak = std::min(bound, std::max(peak, 0.0));
        }
        cr.max_slew_phi0_per_s = peak * 1e9;  // Phi0/ns -> Phi0/s
        cr.slew_ok = cr.max_slew_phi0_per_s <= ValidationReport::slew_limit_phi0_per_s * (1 + 1e-9);
        rep.channels.push_back(cr);
    }
    rep.bandwidth_ghz = std::isfinite(tau_min) ? 1.0 / (2.0 * 3.14159265358979323846 * tau_min) : 0.0;
    rep.bandwidth_ok = rep.bandwidth_ghz <= ValidationReport::bandwidth_limit_ghz * (1 + 1e-9);
    rep.pass = rep.bandwidth_ok;
    for (const auto& cr : rep.channels) rep.pass = rep.pass && cr.slew_ok;
    return rep;
}

// Constant shifts of the operating point: flux offsets add to the channel
// baselines by kind; the timing shift moves the bias channels relative to the
// control channels (pulse desynchronization).
inline PulseSchedule apply_shifts(const PulseSchedule& s, double d_phic_phi0,
                                  double d_eps_phi0, double d_t_ns) {
    PulseSchedule out = s;
    for (auto& c : out.channels) {
        if (c.kind() == ChannelKind::control) {
            c.baseline += d_phic_phi0;
        } else {
            c.baseline += d_eps_phi0;
            c.dt += d_t_ns;
        }
    }
    return out;
}

// Per-qubit variant for two-qubit schedules: shifts apply only to channels
// with the given suffix ("_a" or "_b"; empty matches the plain 1-qubit names).
inline PulseSchedule apply_shifts_qubit(const PulseSchedule& s, const std::string& suffix,
                                        double d_phic_phi0, double d_eps_phi0,
                                        double d_t_ns) {
    PulseSchedule out = s;
    for (auto& c : out.channels) {
        const bool match = suffix.empty()
                               ? (c.name == "phi_c" || c.name == "eps")
                               : (c.name.size() > suffix.size() &&
                                  c.name.compare(c.name.size() - suffix.size(), suffix.size(),
                                                 suffix) == 0);
        if (!match) continue;
        if (c.kind() == ChannelKind::control) {
            c.baseline += d_phic_phi0;
        } else {
            c.baseline += d_eps_phi0;
            c.dt += d_t_ns;
        }
    }
    return out;
}

inline void to_json(nlohmann::json& j, const TanhSegment& s) {
    j = nlohmann::json{{"delta", s.delta}, {"t_max", s.t_max}, {"tau", s.tau}};
}
inline void from_json(const nlohmann::json& j, TanhSegment& s) {
    j.at("delta").get_to(s.delta);
    j.at("t_max").get_to(s.t_max);
    j.at("tau").get_to(s.tau);
}
inline void to_json(nlohmann::json& j, const Channel& c) {
    j = nlohmann::json{
        {"name", c.name}, {"baseline", c.baseline}, {"segments", c.segments}, {"dt", c.dt}};
}
inline void from_json(const nlohmann::json& j, Channel& c) {
    j.at("name").get_to(c.name);
    j.at("baseline").get_to(c.baseline);
    j.at("segments").get_to(c.segments);
    c.dt = j.value("dt", 0.0);
}
inline void to_json(nlohmann::json& j, const PulseSchedule& s) {
    j = nlohmann::json{{"channels", s.channels}, {"duration_ns", s.duration_ns}};
}
inline void from_json(const nlohmann::json& j, PulseSchedule& s) {
    j.at("channels").get_to(s.channels);
    j.at("duration_ns").get_to(s.duration_ns);
}

inline PulseSchedule load_schedule(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open schedule: " + path);
    nlohmann::json j;
    in >> j;
    PulseSchedule s = j.get<PulseSchedule>();
    s.check_valid_object();
    return s;
}

inline void save_schedule(const PulseSchedule& s, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write schedule: " + path);
    out << nlohmann::json(s).dump(2) << "\n";
}

}  // namespace qflux::pulse
