#pragma once

#include <algorithm>
#include <cmath>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "fogpon/common.hpp"

namespace fogpon {

constexpr double kDefaultPacketBits = 10000.0;
constexpr double kDefaultRhoMax = 0.98;

/// M/M/1 sojourn time 1/(mu - lambda) in seconds for a link of the given
/// capacity carrying the given load, with packet service/arrival rates
/// derived from the packet size.
inline double mm1_delay(double load_gbps, double capacity_gbps,
                        double packet_bits = kDefaultPacketBits) {
    if (capacity_gbps <= 0) throw DomainError("mm1_delay: capacity must be > 0");
    if (packet_bits <= 0) throw DomainError("mm1_delay: packet size must be > 0");
    if (load_gbps < 0) throw DomainError("mm1_delay: load must be >= 0");
    if (load_gbps >= capacity_gbps) {
        throw DomainError("mm1_delay: saturated link (load " +
                          format_double(load_gbps) + " >= capacity " +
                          format_double(capacity_gbps) + " Gbit/s)");
    }
    const double mu = capacity_gbps * 1e9 / packet_bits;     // packets/s
    const double lambda = load_gbps * 1e9 / packet_bits;     // packets/s
    return 1.0 / (mu - lambda);
}

/// One tangent segment of the piecewise delay under-approximation:
/// delay >= slope * load + intercept.
struct DelaySegment {
    double slope_s_per_gbps = 0;
    double intercept_s = 0;
    double rho = 0; // construction point (utilization)
};

/// Max-of-tangents under-approximation of the M/M/1 sojourn curve on one
/// link. ub_s is the exact delay at rho_max * capacity and doubles as the
/// big-M for the per-flow delay coupling rows.
struct PiecewiseDelay {
    double capacity_gbps = 0;
    double packet_bits = kDefaultPacketBits;
    double rho_max = kDefaultRhoMax;
    double ub_s = 0;
    std::vector<DelaySegment> segments; // slopes strictly increasing
};

/// Default tangent utilizations: rho_p = 1 - r^p with geometric headroom
/// ratio r = 0.65, which keeps the worst-case gap between adjacent
/// tangents at ((1-r)/(1+r))^2 = 4.5% of the exact curve. For large
/// segment counts the ratio is widened so every point stays below rho_max.
inline std::vector<double> default_rho_points(int segment_count,
                                              double rho_max = kDefaultRhoMax) {
    if (segment_count < 1) throw ConfigError("linearize: need at least one segment");
    double r = 0.65;
    if (segment_count > 1) {
        const double last = 1.0 - std::pow(r, segment_count - 1);
        if (last >= rho_max) {
            r = std::pow(1.0 - 0.95 * rho_max, 1.0 / (segment_count - 1));
        }
    }
    std::vector<double> rho(segment_count);
    for (int p = 0; p < segment_count; ++p) rho[p] = 1.0 - std::pow(r, p);
    return rho;
}

/// Tangent construction: segment p touches the exact curve at load
/// rho_p * capacity, so the pointwise max of the segments is convex,
/// under-approximates the curve everywhere, and is exact at each rho_p.
inline PiecewiseDelay linearize(double capacity_gbps, int segment_count,
                                std::span<const double> rho_points,
                                double packet_bits = kDefaultPacketBits,
                                double rho_max = kDefaultRhoMax) {
    if (capacity_gbps <= 0) throw ConfigError("linearize: capacity must be > 0");
    if (segment_count < 1) throw ConfigError("linearize: need at least one segment");
    if (static_cast<int>(rho_points.size()) != segment_count) {
        throw ConfigError("linearize: segment count " + std::to_string(segment_count) +
                          " does not match " + std::to_string(rho_points.size()) +
                          " utilization points");
    }
    if (!(rho_max > 0 && rho_max < 1)) {
        throw ConfigError("linearize: rho_max must lie in (0, 1)");
    }
    PiecewiseDelay pw;
    pw.capacity_gbps = capacity_gbps;
    pw.packet_bits = packet_bits;
    pw.rho_max = rho_max;
    pw.ub_s = mm1_delay(rho_max * capacity_gbps, capacity_gbps, packet_bits);
    double prev = -1;
    for (int p = 0; p < segment_count; ++p) {
        const double rho = rho_points[p];
        if (rho < 0 || rho >= rho_max) {
            throw ConfigError("linearize: utilization point " + format_double(rho) +
                              " outside [0, rho_max)");
        }
        if (rho <= prev) {
            throw ConfigError("linearize: utilization points must be strictly increasing");
        }
        prev = rho;
        const double load = rho * capacity_gbps;
        const double value = mm1_delay(load, capacity_gbps, packet_bits);
        // d/dload of packet_bits / ((capacity - load) * 1e9)
        const double headroom = capacity_gbps - load;
        DelaySegment seg;
        seg.rho = rho;
        seg.slope_s_per_gbps = packet_bits / (1e9 * headroom * headroom);
        seg.intercept_s = value - seg.slope_s_per_gbps * load;
        pw.segments.push_back(seg);
    }
    // Tangent slopes of a strictly convex curve increase with rho, so the
    // strict-ordering check above already guarantees this; assert anyway.
    for (std::size_t i = 1; i < pw.segments.size(); ++i) {
        if (pw.segments[i].slope_s_per_gbps <= pw.segments[i - 1].slope_s_per_gbps) {
            throw ConfigError("linearize: non-increasing tangent slopes");
        }
    }
    // The coupling rows cap per-flow delay at ub_s; the approximation must
    // stay below that bound on the whole capacity range or those rows
    // would cut off feasible near-saturation loads.
    double at_cap = 0;
    for (const auto& s : pw.segments) {
        at_cap = std::max(at_cap, s.slope_s_per_gbps * capacity_gbps + s.intercept_s);
    }
    if (at_cap > pw.ub_s) {
        throw ConfigError("linearize: tangent at load=capacity exceeds the rho_max bound; "
                          "move tangent points away from rho_max");
    }
    return pw;
}

inline PiecewiseDelay linearize(double capacity_gbps, int segment_count,
                                double packet_bits = kDefaultPacketBits,
                                double rho_max = kDefaultRhoMax) {
    const auto rho = default_rho_points(segment_count, rho_max);
    return linearize(capacity_gbps, segment_count, rho, packet_bits, rho_max);
}

/// One approximation per directed link, aligned with Topology::links.
using PiecewiseSet = std::vector<PiecewiseDelay>;

struct PiecewiseEval {
    double delay_s = 0;
    bool beyond_rho_max = false; // load extrapolated past rho_max * capacity
};

inline PiecewiseEval eval_piecewise_checked(const PiecewiseDelay& pw, double load_gbps) {
    if (load_gbps < 0) throw DomainError("eval_piecewise: load must be >= 0");
    PiecewiseEval ev;
    for (const auto& s : pw.segments) {
        ev.delay_s = std::max(ev.delay_s, s.slope_s_per_gbps * load_gbps + s.intercept_s);
    }
    ev.beyond_rho_max = load_gbps > pw.rho_max * pw.capacity_gbps;
    return ev;
}

inline double eval_piecewise(const PiecewiseDelay& pw, double load_gbps) {
    return eval_piecewise_checked(pw, load_gbps).delay_s;
}

/// CSV dump of the segments (one data row per segment).
inline void write_segments_csv(std::ostream& os, const PiecewiseDelay& pw) {
    os << "segment,rho,slope_s_per_gbps,intercept_s\n";
    for (std::size_t i = 0; i < pw.segments.size(); ++i) {
        const auto& s = pw.segments[i];
        os << i << ',' << format_double(s.rho) << ','
           << format_double(s.slope_s_per_gbps) << ','
           << format_double(s.intercept_s) << '\n';
    }
}

} // namespace fogpon
