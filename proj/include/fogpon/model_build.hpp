#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fogpon/catalog.hpp"
#include "fogpon/common.hpp"
#include "fogpon/delay.hpp"
#include "fogpon/demand.hpp"
#include "fogpon/linear_model.hpp"
#include "fogpon/topology.hpp"
#include "fogpon/weights.hpp"

namespace fogpon {

struct ModelOptions {
    /// With beta == 0 the delay variable/constraint families are omitted
    /// entirely rather than carried with zero weight.
    bool skip_delay_when_beta_zero = true;
    /// Couple each user's end-to-end delay to its own assignment binary
    /// instead of the destination activation binary.
    bool strict_per_user_delay = false;
    /// Demand granularity: assignments below this level are rejected at
    /// input and the activation-linking big-Ms are sized from it.
    double psi_min_gflops = 1e-3;
};

inline PiecewiseSet make_piecewise_set(const Topology& t, int segments = 6,
                                       double packet_bits = kDefaultPacketBits,
                                       double rho_max = kDefaultRhoMax) {
    PiecewiseSet out;
    std::map<double, PiecewiseDelay> by_capacity;
    for (const auto& l : t.links) {
        auto it = by_capacity.find(l.capacity_gbps);
        if (it == by_capacity.end()) {
            it = by_capacity
                     .emplace(l.capacity_gbps,
                              linearize(l.capacity_gbps, segments, packet_bits, rho_max))
                     .first;
        }
        out.push_back(it->second);
    }
    return out;
}

/// A built model plus the index maps needed to decode solution vectors.
struct BuiltModel {
    MilpModel model;
    bool has_delay = false;

    std::vector<int> users; // topology node indices, registry order
    std::vector<int> procs;
    std::vector<int> theta_nodes;
    std::vector<int> mu_nodes;    // source-side APs + source UDs
    std::vector<int> sigma_nodes; // processing-side APs + processing UDs + ONUs
    std::vector<int> q_nodes;

    int off_psi = 0, off_xi = 0, off_beta = 0, off_theta = 0, off_flow = 0;
    int off_lambda_ud = 0, off_mu = 0, off_sigma = 0, off_lambda_agg = 0;
    int off_tr = 0, off_tb = 0, off_hb = 0, off_h = 0, off_x = 0, off_ld = 0, off_ed = 0;
    int n_links = 0;

    int col_psi(int ui, int di) const { return off_psi + ui * np() + di; }
    int col_xi(int ui, int di) const { return off_xi + ui * np() + di; }
    int col_beta(int di) const { return off_beta + di; }
    int col_theta(int ti) const { return off_theta + ti; }
    int col_flow(int ui, int di, int li) const {
        return off_flow + (ui * np() + di) * n_links + li;
    }
    int col_lambda_ud(int ui, int di) const { return off_lambda_ud + ui * np() + di; }
    int col_tr(int li) const { return off_tr + li; }
    int col_tb(int ui, int di, int li) const {
        return off_tb + (ui * np() + di) * n_links + li;
    }
    int col_hb(int li) const { return off_hb + li; }
    int col_h(int li) const { return off_h + li; }
    int col_x(int ui, int di, int li) const {
        return off_x + (ui * np() + di) * n_links + li;
    }
    int col_ld(int ui, int di) const { return off_ld + ui * np() + di; }
    int col_ed(int ui) const { return off_ed + ui; }

    int nu() const { return static_cast<int>(users.size()); }
    int np() const { return static_cast<int>(procs.size()); }
};

namespace detail {

inline bool in_mu_domain(NodeRole r) {
    return r == NodeRole::ApSource || r == NodeRole::UdSource;
}
inline bool in_sigma_domain(NodeRole r) {
    return r == NodeRole::ApProcessing || r == NodeRole::UdProcessing ||
           r == NodeRole::Onu;
}
inline bool in_theta_domain(NodeRole r) {
    return in_mu_domain(r) || in_sigma_domain(r) || is_q_role(r);
}

} // namespace detail

/// Translates the scenario inputs into the joint energy/delay MILP:
/// per-device traffic aggregation identities, power components as
/// definitional equality rows, assignment/capacity/flow-conservation/
/// activation constraints, and (with a nonzero delay weight) the per-flow
/// piecewise queuing-delay families. Deterministic: identical inputs
/// produce a byte-identical model.
inline BuiltModel build_model(const Topology& t, const DemandSet& demands,
                              const Catalog& catalog, const PiecewiseSet* pw_set,
                              Weights weights, const ModelOptions& options = {}) {
    BuiltModel b;
    MilpModel& m = b.model;
    m.alpha = weights.alpha;
    m.beta = weights.beta;
    b.has_delay = weights.beta != 0 || !options.skip_delay_when_beta_zero;
    b.n_links = static_cast<int>(t.links.size());

    b.users = t.source_uds();
    b.procs = t.processing_nodes();
    const int nu = static_cast<int>(b.users.size());
    const int np = static_cast<int>(b.procs.size());
    const int nl = b.n_links;
    if (nu == 0) throw ConfigError("build_model: no source user devices");
    if (np == 0) throw ConfigError("build_model: no processing nodes");
    if (static_cast<int>(demands.users.size()) != nu) {
        throw ConfigError("build_model: demand set covers " +
                          std::to_string(demands.users.size()) + " users, topology has " +
                          std::to_string(nu));
    }
    if (b.has_delay) {
        if (pw_set == nullptr || static_cast<int>(pw_set->size()) != nl) {
            throw ConfigError(
                "build_model: delay weight is active but the piecewise delay set does "
                "not cover every link");
        }
    }
    for (const auto& n : t.nodes) {
        if (!n.profile.empty() && !catalog.contains(n.profile)) {
            throw ConfigError("build_model: node '" + n.id + "' references missing device "
                              "profile '" + n.profile + "'");
        }
    }

    // Demands in topology user order.
    std::vector<double> D(nu), R(nu), drr(nu);
    for (int ui = 0; ui < nu; ++ui) {
        const auto& dem = demands.of(t.nodes[b.users[ui]].id);
        D[ui] = dem.demand_gflops;
        R[ui] = dem.traffic_gbps();
        drr[ui] = dem.drr;
        if (D[ui] < options.psi_min_gflops) {
            throw ConfigError("build_model: demand of '" + dem.user_id +
                              "' is below the " + format_double(options.psi_min_gflops) +
                              " GFLOPs granularity");
        }
    }
    double sum_r = 0, min_drr = kInf;
    for (int ui = 0; ui < nu; ++ui) {
        sum_r += R[ui];
        min_drr = std::min(min_drr, drr[ui]);
    }
    const double lambda_min = options.psi_min_gflops * min_drr;
    const double z_traffic = 2 * sum_r;     // aggregations count both directions
    const double z_indicator = 1.0 / lambda_min;

    for (int i = 0; i < static_cast<int>(t.nodes.size()); ++i) {
        const NodeRole r = t.nodes[i].role;
        if (detail::in_theta_domain(r)) b.theta_nodes.push_back(i);
        if (detail::in_mu_domain(r)) b.mu_nodes.push_back(i);
        if (detail::in_sigma_domain(r)) b.sigma_nodes.push_back(i);
        if (is_q_role(r)) b.q_nodes.push_back(i);
    }

    const auto uid = [&](int ui) { return t.nodes[b.users[ui]].id; };
    const auto did = [&](int di) { return t.nodes[b.procs[di]].id; };
    const auto nid = [&](int i) { return t.nodes[i].id; };
    const auto lid = [&](int li) {
        return nid(t.links[li].from) + "," + nid(t.links[li].to);
    };

    // ---- variable registry (canonical order) ----
    b.off_psi = static_cast<int>(m.vars.size());
    for (int ui = 0; ui < nu; ++ui) {
        for (int di = 0; di < np; ++di) {
            m.add_var("psi[" + uid(ui) + "," + did(di) + "]", VarKind::Continuous, 0, D[ui]);
        }
    }
    b.off_xi = static_cast<int>(m.vars.size());
    for (int ui = 0; ui < nu; ++ui) {
        for (int di = 0; di < np; ++di) {
            m.add_var("xi[" + uid(ui) + "," + did(di) + "]", VarKind::Binary, 0, 1);
        }
    }
    b.off_beta = static_cast<int>(m.vars.size());
    for (int di = 0; di < np; ++di) {
        m.add_var("beta[" + did(di) + "]", VarKind::Binary, 0, 1);
    }
    b.off_theta = static_cast<int>(m.vars.size());
    for (int i : b.theta_nodes) m.add_var("theta[" + nid(i) + "]", VarKind::Binary, 0, 1);
    b.off_flow = static_cast<int>(m.vars.size());
    for (int ui = 0; ui < nu; ++ui) {
        for (int di = 0; di < np; ++di) {
            for (int li = 0; li < nl; ++li) {
                m.add_var("flow[" + uid(ui) + "," + did(di) + "," + lid(li) + "]",
                          VarKind::Continuous, 0, R[ui]);
            }
        }
    }
    b.off_lambda_ud = static_cast<int>(m.vars.size());
    for (int ui = 0; ui < nu; ++ui) {
        for (int di = 0; di < np; ++di) {
            m.add_var("lambda_ud[" + uid(ui) + "," + did(di) + "]", VarKind::Continuous, 0,
                      R[ui]);
        }
    }
    b.off_mu = static_cast<int>(m.vars.size());
    for (int i : b.mu_nodes) m.add_var("mu_src[" + nid(i) + "]", VarKind::Continuous, 0, kInf);
    b.off_sigma = static_cast<int>(m.vars.size());
    for (int i : b.sigma_nodes) {
        m.add_var("sigma_dst[" + nid(i) + "]", VarKind::Continuous, 0, kInf);
    }
    b.off_lambda_agg = static_cast<int>(m.vars.size());
    for (int i : b.q_nodes) {
        m.add_var("lambda_agg[" + nid(i) + "]", VarKind::Continuous, 0, kInf);
    }
    double sum_ub = 0;
    if (b.has_delay) {
        for (int li = 0; li < nl; ++li) sum_ub += (*pw_set)[li].ub_s;
        b.off_tr = static_cast<int>(m.vars.size());
        for (int li = 0; li < nl; ++li) {
            m.add_var("tr[" + lid(li) + "]", VarKind::Continuous, 0, sum_r);
        }
        b.off_tb = static_cast<int>(m.vars.size());
        for (int ui = 0; ui < nu; ++ui) {
            for (int di = 0; di < np; ++di) {
                for (int li = 0; li < nl; ++li) {
                    m.add_var("tb[" + uid(ui) + "," + did(di) + "," + lid(li) + "]",
                              VarKind::Binary, 0, 1);
                }
            }
        }
        b.off_hb = static_cast<int>(m.vars.size());
        for (int li = 0; li < nl; ++li) m.add_var("hb[" + lid(li) + "]", VarKind::Binary, 0, 1);
        b.off_h = static_cast<int>(m.vars.size());
        for (int li = 0; li < nl; ++li) {
            m.add_var("h[" + lid(li) + "]", VarKind::Continuous, 0, kInf);
        }
        b.off_x = static_cast<int>(m.vars.size());
        for (int ui = 0; ui < nu; ++ui) {
            for (int di = 0; di < np; ++di) {
                for (int li = 0; li < nl; ++li) {
                    m.add_var("x[" + uid(ui) + "," + did(di) + "," + lid(li) + "]",
                              VarKind::Continuous, 0, (*pw_set)[li].ub_s);
                }
            }
        }
        b.off_ld = static_cast<int>(m.vars.size());
        for (int ui = 0; ui < nu; ++ui) {
            for (int di = 0; di < np; ++di) {
                m.add_var("ld[" + uid(ui) + "," + did(di) + "]", VarKind::Continuous, 0, kInf);
            }
        }
        b.off_ed = static_cast<int>(m.vars.size());
        for (int ui = 0; ui < nu; ++ui) {
            m.add_var("ed[" + uid(ui) + "]", VarKind::Continuous, 0, kInf);
        }
    }
    static const char* kComponents[] = {"PC", "PN",  "PAP", "PCP", "PQ",   "AR", "AY",
                                        "AGB", "PR", "PY",  "PGB", "PONU", "TPC"};
    for (const char* c : kComponents) m.add_var(c, VarKind::Continuous, 0, kInf);
    if (b.has_delay) m.add_var("TD", VarKind::Continuous, 0, kInf);

    // adjacency by link index
    std::vector<std::vector<int>> out_links(t.nodes.size()), in_links(t.nodes.size());
    for (int li = 0; li < nl; ++li) {
        out_links[t.links[li].from].push_back(li);
        in_links[t.links[li].to].push_back(li);
    }

    // ---- constraint rows, ascending family order ----
    auto aggregation_row = [&](const char* tag, const std::string& var_name, int var_col,
                               int node) {
        std::vector<std::pair<int, double>> coeffs{{var_col, 1.0}};
        for (int ui = 0; ui < nu; ++ui) {
            for (int di = 0; di < np; ++di) {
                for (int li : out_links[node]) coeffs.emplace_back(b.col_flow(ui, di, li), -1.0);
                for (int li : in_links[node]) coeffs.emplace_back(b.col_flow(ui, di, li), -1.0);
            }
        }
        m.add_row(std::string(tag) + "[" + var_name + "]", tag, Relation::Eq, 0,
                  std::move(coeffs));
    };
    for (std::size_t k = 0; k < b.mu_nodes.size(); ++k) {
        aggregation_row("eq2", nid(b.mu_nodes[k]), b.off_mu + static_cast<int>(k),
                        b.mu_nodes[k]);
    }
    for (std::size_t k = 0; k < b.sigma_nodes.size(); ++k) {
        aggregation_row("eq3", nid(b.sigma_nodes[k]), b.off_sigma + static_cast<int>(k),
                        b.sigma_nodes[k]);
    }
    for (std::size_t k = 0; k < b.q_nodes.size(); ++k) {
        aggregation_row("eq4", nid(b.q_nodes[k]), b.off_lambda_agg + static_cast<int>(k),
                        b.q_nodes[k]);
    }

    m.add_row("eq6[TPC]", "eq6", Relation::Eq, 0,
              {{m.column("TPC"), 1.0}, {m.column("PC"), -1.0}, {m.column("PN"), -1.0}});
    {
        std::vector<std::pair<int, double>> coeffs{{m.column("PC"), 1.0}};
        for (int di = 0; di < np; ++di) {
            const auto& prof = catalog.at(t.nodes[b.procs[di]].profile);
            const double rd = prof.unit_power();
            for (int ui = 0; ui < nu; ++ui) coeffs.emplace_back(b.col_psi(ui, di), -rd);
            coeffs.emplace_back(b.col_beta(di), -prof.idle_power_w);
        }
        m.add_row("eq7[PC]", "eq7", Relation::Eq, 0, std::move(coeffs));
    }
    {
        std::vector<std::pair<int, double>> coeffs{{m.column("PN"), 1.0}};
        for (const char* c : {"PAP", "PCP", "AR", "AY", "AGB", "PR", "PY", "PGB", "PONU", "PQ"}) {
            coeffs.emplace_back(m.column(c), -1.0);
        }
        m.add_row("eq8[PN]", "eq8", Relation::Eq, 0, std::move(coeffs));
    }

    const auto theta_col_of = [&](int node) {
        const auto it = std::find(b.theta_nodes.begin(), b.theta_nodes.end(), node);
        return b.off_theta + static_cast<int>(it - b.theta_nodes.begin());
    };
    // Power of an access-point family: sum of (traffic var * unit power +
    // activation * idle power) over the member nodes.
    auto ap_power_row = [&](const char* tag, const char* comp, bool source_side,
                            std::optional<WavelengthClass> w_a,
                            std::optional<WavelengthClass> w_b, bool want_class) {
        std::vector<std::pair<int, double>> coeffs{{m.column(comp), 1.0}};
        const auto& domain = source_side ? b.mu_nodes : b.sigma_nodes;
        const int off = source_side ? b.off_mu : b.off_sigma;
        for (std::size_t k = 0; k < domain.size(); ++k) {
            const Node& nd = t.nodes[domain[k]];
            if (nd.role != (source_side ? NodeRole::ApSource : NodeRole::ApProcessing)) {
                continue;
            }
            const bool classed = nd.wavelength.has_value();
            if (want_class != classed) continue;
            if (want_class && nd.wavelength != w_a && nd.wavelength != w_b) continue;
            const auto& prof = catalog.at(nd.profile);
            coeffs.emplace_back(off + static_cast<int>(k), -prof.unit_power());
            coeffs.emplace_back(theta_col_of(domain[k]), -prof.idle_power_w);
        }
        m.add_row(std::string(tag) + "[" + comp + "]", tag, Relation::Eq, 0,
                  std::move(coeffs));
    };
    ap_power_row("eq9", "PAP", true, {}, {}, false);
    ap_power_row("eq10", "PCP", false, {}, {}, false);
    {
        std::vector<std::pair<int, double>> coeffs{{m.column("PQ"), 1.0}};
        for (std::size_t k = 0; k < b.q_nodes.size(); ++k) {
            const auto& prof = catalog.at(t.nodes[b.q_nodes[k]].profile);
            coeffs.emplace_back(b.off_lambda_agg + static_cast<int>(k), -prof.unit_power());
            coeffs.emplace_back(theta_col_of(b.q_nodes[k]), -prof.idle_power_w);
        }
        m.add_row("eq11[PQ]", "eq11", Relation::Eq, 0, std::move(coeffs));
    }
    ap_power_row("eq12", "AR", true, WavelengthClass::Red, WavelengthClass::Red, true);
    ap_power_row("eq13", "AY", true, WavelengthClass::Yellow, WavelengthClass::Yellow, true);
    ap_power_row("eq14", "AGB", true, WavelengthClass::Green, WavelengthClass::Blue, true);
    ap_power_row("eq15", "PR", false, WavelengthClass::Red, WavelengthClass::Red, true);
    ap_power_row("eq16", "PY", false, WavelengthClass::Yellow, WavelengthClass::Yellow, true);
    ap_power_row("eq17", "PGB", false, WavelengthClass::Green, WavelengthClass::Blue, true);
    {
        std::vector<std::pair<int, double>> coeffs{{m.column("PONU"), 1.0}};
        for (std::size_t k = 0; k < b.sigma_nodes.size(); ++k) {
            const Node& nd = t.nodes[b.sigma_nodes[k]];
            if (nd.role != NodeRole::Onu) continue;
            const auto& prof = catalog.at(nd.profile);
            coeffs.emplace_back(b.off_sigma + static_cast<int>(k), -prof.unit_power());
            coeffs.emplace_back(theta_col_of(b.sigma_nodes[k]), -prof.idle_power_w);
        }
        m.add_row("eq18[PONU]", "eq18", Relation::Eq, 0, std::move(coeffs));
    }

    for (int ui = 0; ui < nu; ++ui) {
        std::vector<std::pair<int, double>> coeffs;
        for (int di = 0; di < np; ++di) coeffs.emplace_back(b.col_psi(ui, di), 1.0);
        m.add_row("eq19[" + uid(ui) + "]", "eq19", Relation::Eq, D[ui], std::move(coeffs));
    }
    for (int di = 0; di < np; ++di) {
        std::vector<std::pair<int, double>> coeffs;
        for (int ui = 0; ui < nu; ++ui) coeffs.emplace_back(b.col_psi(ui, di), 1.0);
        const double omega = catalog.at(t.nodes[b.procs[di]].profile).capacity;
        m.add_row("eq20[" + did(di) + "]", "eq20", Relation::Le, omega, std::move(coeffs));
    }
    for (int ui = 0; ui < nu; ++ui) {
        std::vector<std::pair<int, double>> coeffs;
        for (int di = 0; di < np; ++di) coeffs.emplace_back(b.col_xi(ui, di), 1.0);
        m.add_row("eq21[" + uid(ui) + "]", "eq21", Relation::Eq, 1, std::move(coeffs));
    }
    for (int ui = 0; ui < nu; ++ui) {
        for (int di = 0; di < np; ++di) {
            m.add_row("eq22[" + uid(ui) + "," + did(di) + "]", "eq22", Relation::Eq, 0,
                      {{b.col_lambda_ud(ui, di), 1.0}, {b.col_psi(ui, di), -drr[ui]}});
        }
    }
    for (int ui = 0; ui < nu; ++ui) {
        for (int di = 0; di < np; ++di) {
            for (int mnode = 0; mnode < static_cast<int>(t.nodes.size()); ++mnode) {
                std::vector<std::pair<int, double>> coeffs;
                for (int li : out_links[mnode]) coeffs.emplace_back(b.col_flow(ui, di, li), 1.0);
                for (int li : in_links[mnode]) coeffs.emplace_back(b.col_flow(ui, di, li), -1.0);
                if (mnode == b.users[ui]) coeffs.emplace_back(b.col_lambda_ud(ui, di), -1.0);
                if (mnode == b.procs[di]) coeffs.emplace_back(b.col_lambda_ud(ui, di), 1.0);
                m.add_row("eq23[" + uid(ui) + "," + did(di) + "," + nid(mnode) + "]", "eq23",
                          Relation::Eq, 0, std::move(coeffs));
            }
        }
    }
    for (int li = 0; li < nl; ++li) {
        std::vector<std::pair<int, double>> coeffs;
        for (int ui = 0; ui < nu; ++ui) {
            for (int di = 0; di < np; ++di) coeffs.emplace_back(b.col_flow(ui, di, li), 1.0);
        }
        m.add_row("eq24[" + lid(li) + "]", "eq24", Relation::Le, t.links[li].capacity_gbps,
                  std::move(coeffs));
    }
    for (int ui = 0; ui < nu; ++ui) {
        for (int di = 0; di < np; ++di) {
            const std::string suffix = "[" + uid(ui) + "," + did(di) + "]";
            m.add_row("eq25" + suffix, "eq25", Relation::Ge, 0,
                      {{b.col_xi(ui, di), D[ui]}, {b.col_psi(ui, di), -1.0}});
            m.add_row("eq26" + suffix, "eq26", Relation::Le, 0,
                      {{b.col_xi(ui, di), 1.0},
                       {b.col_psi(ui, di), -1.0 / options.psi_min_gflops}});
        }
    }
    for (int di = 0; di < np; ++di) {
        std::vector<std::pair<int, double>> ge{{b.col_beta(di), static_cast<double>(nu)}};
        std::vector<std::pair<int, double>> le{{b.col_beta(di), 1.0}};
        for (int ui = 0; ui < nu; ++ui) {
            ge.emplace_back(b.col_xi(ui, di), -1.0);
            le.emplace_back(b.col_xi(ui, di), -static_cast<double>(nu));
        }
        m.add_row("eq27[" + did(di) + "]", "eq27", Relation::Ge, 0, std::move(ge));
        m.add_row("eq28[" + did(di) + "]", "eq28", Relation::Le, 0, std::move(le));
    }
    auto activation_rows = [&](const char* tag_ge, const char* tag_le,
                               const std::vector<int>& domain, int var_off) {
        for (std::size_t k = 0; k < domain.size(); ++k) {
            const int var_col = var_off + static_cast<int>(k);
            const int th = theta_col_of(domain[k]);
            const std::string suffix = "[" + nid(domain[k]) + "]";
            m.add_row(tag_ge + suffix, tag_ge, Relation::Ge, 0,
                      {{th, z_traffic}, {var_col, -1.0}});
            m.add_row(tag_le + suffix, tag_le, Relation::Le, 0,
                      {{th, 1.0}, {var_col, -z_indicator}});
        }
    };
    activation_rows("eq29", "eq30", b.q_nodes, b.off_lambda_agg);
    activation_rows("eq31", "eq32", b.sigma_nodes, b.off_sigma);
    activation_rows("eq33", "eq34", b.mu_nodes, b.off_mu);

    if (b.has_delay) {
        for (int ui = 0; ui < nu; ++ui) {
            for (int di = 0; di < np; ++di) {
                std::vector<std::pair<int, double>> coeffs{{b.col_ld(ui, di), 1.0}};
                for (int li = 0; li < nl; ++li) coeffs.emplace_back(b.col_x(ui, di, li), -1.0);
                m.add_row("eq35[" + uid(ui) + "," + did(di) + "]", "eq35", Relation::Eq, 0,
                          std::move(coeffs));
            }
        }
        {
            std::vector<std::pair<int, double>> coeffs{{m.column("TD"), 1.0}};
            for (int ui = 0; ui < nu; ++ui) coeffs.emplace_back(b.col_ed(ui), -1.0);
            m.add_row("eq36[TD]", "eq36", Relation::Eq, 0, std::move(coeffs));
        }
        for (int li = 0; li < nl; ++li) {
            std::vector<std::pair<int, double>> coeffs{{b.col_tr(li), 1.0}};
            for (int ui = 0; ui < nu; ++ui) {
                for (int di = 0; di < np; ++di) {
                    coeffs.emplace_back(b.col_flow(ui, di, li), -1.0);
                }
            }
            m.add_row("eq37[" + lid(li) + "]", "eq37", Relation::Eq, 0, std::move(coeffs));
        }
        for (int ui = 0; ui < nu; ++ui) {
            for (int di = 0; di < np; ++di) {
                for (int li = 0; li < nl; ++li) {
                    const std::string suffix =
                        "[" + uid(ui) + "," + did(di) + "," + lid(li) + "]";
                    m.add_row("eq38" + suffix, "eq38", Relation::Ge, 0,
                              {{b.col_flow(ui, di, li), z_indicator},
                               {b.col_tb(ui, di, li), -1.0}});
                    m.add_row("eq39" + suffix, "eq39", Relation::Le, 0,
                              {{b.col_flow(ui, di, li), 1.0},
                               {b.col_tb(ui, di, li), -R[ui]}});
                }
            }
        }
        for (int ui = 0; ui < nu; ++ui) {
            for (int di = 0; di < np; ++di) {
                for (int li = 0; li < nl; ++li) {
                    const std::string suffix =
                        "[" + uid(ui) + "," + did(di) + "," + lid(li) + "]";
                    const double ub = (*pw_set)[li].ub_s;
                    m.add_row("eq41" + suffix, "eq41", Relation::Le, 0,
                              {{b.col_x(ui, di, li), 1.0}, {b.col_tb(ui, di, li), -ub}});
                    m.add_row("eq42" + suffix, "eq42", Relation::Le, 0,
                              {{b.col_x(ui, di, li), 1.0}, {b.col_h(li), -1.0}});
                    m.add_row("eq43" + suffix, "eq43", Relation::Ge, -ub,
                              {{b.col_x(ui, di, li), 1.0},
                               {b.col_h(li), -1.0},
                               {b.col_tb(ui, di, li), -ub}});
                }
            }
        }
        for (int li = 0; li < nl; ++li) {
            const std::string suffix = "[" + lid(li) + "]";
            m.add_row("eq44" + suffix, "eq44", Relation::Ge, 0,
                      {{b.col_tr(li), z_indicator}, {b.col_hb(li), -1.0}});
            m.add_row("eq45" + suffix, "eq45", Relation::Le, 0,
                      {{b.col_tr(li), 1.0}, {b.col_hb(li), -sum_r}});
        }
        for (int li = 0; li < nl; ++li) {
            const auto& pw = (*pw_set)[li];
            for (std::size_t p = 0; p < pw.segments.size(); ++p) {
                m.add_row("eq46[" + lid(li) + "," + std::to_string(p) + "]", "eq46",
                          Relation::Ge, pw.segments[p].intercept_s,
                          {{b.col_h(li), 1.0},
                           {b.col_tr(li), -pw.segments[p].slope_s_per_gbps}});
            }
        }
        {
            // Aggregate upper bound linking total delay to activations; the
            // constant is scaled by |UD| so the row never cuts a feasible
            // point (each user's delay is at most the sum of link bounds).
            const double z48 = nu * sum_ub;
            std::vector<std::pair<int, double>> coeffs;
            for (int ui = 0; ui < nu; ++ui) coeffs.emplace_back(b.col_ed(ui), 1.0);
            for (int di = 0; di < np; ++di) coeffs.emplace_back(b.col_beta(di), -z48);
            m.add_row("eq48[ED]", "eq48", Relation::Le, 0, std::move(coeffs));
        }
        for (int ui = 0; ui < nu; ++ui) {
            std::vector<std::pair<int, double>> coeffs{{b.col_ed(ui), 1.0}};
            for (int di = 0; di < np; ++di) coeffs.emplace_back(b.col_ld(ui, di), -1.0);
            m.add_row("eq49[" + uid(ui) + "]", "eq49", Relation::Le, 0, std::move(coeffs));
        }
        for (int ui = 0; ui < nu; ++ui) {
            for (int di = 0; di < np; ++di) {
                const int coupler = options.strict_per_user_delay ? b.col_xi(ui, di)
                                                                  : b.col_beta(di);
                m.add_row("eq50[" + uid(ui) + "," + did(di) + "]", "eq50", Relation::Ge,
                          -sum_ub,
                          {{b.col_ed(ui), 1.0}, {b.col_ld(ui, di), -1.0}, {coupler, -sum_ub}});
            }
        }
    }

    m.objective.emplace_back(m.column("TPC"), weights.alpha);
    if (b.has_delay && weights.beta != 0) {
        m.objective.emplace_back(m.column("TD"), weights.beta);
    }
    std::sort(m.objective.begin(), m.objective.end());
    return b;
}

/// Power components recomputed from the raw variable values per their
/// defining equations (not read back from the auxiliary columns).
inline std::map<std::string, double> power_components(const BuiltModel& b, const Topology& t,
                                                      const Catalog& catalog,
                                                      std::span<const double> x) {
    if (x.size() != b.model.vars.size()) {
        throw ConfigError("power_components: solution vector length " +
                          std::to_string(x.size()) + " does not match registry size " +
                          std::to_string(b.model.vars.size()));
    }
    std::map<std::string, double> out;
    for (const char* c : {"PC", "PN", "PAP", "PCP", "PQ", "AR", "AY", "AGB", "PR", "PY",
                          "PGB", "PONU", "TPC"}) {
        out[c] = 0;
    }
    const auto theta_of = [&](int node) {
        const auto it = std::find(b.theta_nodes.begin(), b.theta_nodes.end(), node);
        return x[b.off_theta + static_cast<int>(it - b.theta_nodes.begin())];
    };
    for (int di = 0; di < b.np(); ++di) {
        const auto& prof = catalog.at(t.nodes[b.procs[di]].profile);
        double served = 0;
        for (int ui = 0; ui < b.nu(); ++ui) served += x[b.col_psi(ui, di)];
        out["PC"] += served * prof.unit_power() + x[b.col_beta(di)] * prof.idle_power_w;
    }
    for (std::size_t k = 0; k < b.mu_nodes.size(); ++k) {
        const Node& nd = t.nodes[b.mu_nodes[k]];
        if (nd.role != NodeRole::ApSource) continue;
        const auto& prof = catalog.at(nd.profile);
        const double w = x[b.off_mu + k] * prof.unit_power() +
                         theta_of(b.mu_nodes[k]) * prof.idle_power_w;
        if (!nd.wavelength) {
            out["PAP"] += w;
        } else if (*nd.wavelength == WavelengthClass::Red) {
            out["AR"] += w;
        } else if (*nd.wavelength == WavelengthClass::Yellow) {
            out["AY"] += w;
        } else {
            out["AGB"] += w;
        }
    }
    for (std::size_t k = 0; k < b.sigma_nodes.size(); ++k) {
        const Node& nd = t.nodes[b.sigma_nodes[k]];
        const auto& prof = catalog.at(nd.profile);
        const double w = x[b.off_sigma + k] * prof.unit_power() +
                         theta_of(b.sigma_nodes[k]) * prof.idle_power_w;
        if (nd.role == NodeRole::Onu) {
            out["PONU"] += w;
        } else if (nd.role == NodeRole::ApProcessing) {
            if (!nd.wavelength) {
                out["PCP"] += w;
            } else if (*nd.wavelength == WavelengthClass::Red) {
                out["PR"] += w;
            } else if (*nd.wavelength == WavelengthClass::Yellow) {
                out["PY"] += w;
            } else {
                out["PGB"] += w;
            }
        }
        // processing user devices aggregate traffic but carry no
        // networking power term
    }
    for (std::size_t k = 0; k < b.q_nodes.size(); ++k) {
        const auto& prof = catalog.at(t.nodes[b.q_nodes[k]].profile);
        out["PQ"] += x[b.off_lambda_agg + k] * prof.unit_power() +
                     theta_of(b.q_nodes[k]) * prof.idle_power_w;
    }
    out["PN"] = out["PAP"] + out["PCP"] + out["AR"] + out["AY"] + out["AGB"] + out["PR"] +
                out["PY"] + out["PGB"] + out["PONU"] + out["PQ"];
    out["TPC"] = out["PC"] + out["PN"];
    return out;
}

} // namespace fogpon
