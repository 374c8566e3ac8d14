#pragma once

#include <cmath>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "fogpon/model_build.hpp"
#include "fogpon/residuals.hpp"

namespace fogpon {

/// Decoded solution: assignments, activations, component powers, delays,
/// solver diagnostics, and the feasibility residual summary.
struct PlacementReport {
    double demand_gflops = 0; // sweep level, filled by the harness
    std::string status = "decoded";
    double gap = 0;
    double solve_ms = 0;
    long bnb_nodes = 0;
    long simplex_iterations = 0;
    double objective = 0;

    std::vector<std::pair<std::string, std::string>> assignments; // user -> node
    std::vector<std::string> active_processing;                   // beta = 1
    std::vector<std::string> active_devices;                      // theta = 1
    std::map<std::string, double> components;                     // PC..TPC
    std::vector<std::tuple<std::string, std::string, double>> link_loads;
    double td_s = 0;
    std::map<std::string, double> ed_s;

    std::string model_hash;
    double max_residual = 0;
    std::string max_residual_family;
    bool residual_ok = true;
    std::vector<std::string> notes;

    double tpc_w() const {
        auto it = components.find("TPC");
        return it == components.end() ? 0 : it->second;
    }

    double infrastructure_floor_w = 0;
    bool infrastructure_floor_ok = true;
};

/// Decodes a solution vector against the model that produced it. Vectors
/// that violate the constraints beyond tol are flagged in the report, not
/// silently accepted.
inline PlacementReport extract_report(const BuiltModel& b, const Topology& t,
                                      const Catalog& catalog,
                                      std::span<const double> x, double tol = 1e-6) {
    if (x.size() != b.model.vars.size()) {
        throw ConfigError("extract_report: solution vector length " +
                          std::to_string(x.size()) + " does not match registry size " +
                          std::to_string(b.model.vars.size()));
    }
    PlacementReport rep;
    rep.model_hash = b.model.hash();
    rep.objective = b.model.objective_value(x);

    const ResidualReport res = check_solution(b.model, x, tol);
    rep.max_residual = std::max({res.max_violation, res.max_integrality,
                                 res.max_bound_violation});
    rep.max_residual_family = res.worst_family;
    rep.residual_ok = res.ok(tol);
    if (!rep.residual_ok) {
        std::string note = "residuals above " + format_double(tol) + ":";
        for (const auto& [fam, v] : res.family_violation) {
            if (v > tol) note += " " + fam + "=" + format_double(v);
        }
        if (res.max_integrality > tol) {
            note += " integrality=" + format_double(res.max_integrality);
        }
        rep.notes.push_back(note);
    }

    for (int ui = 0; ui < b.nu(); ++ui) {
        int chosen = -1;
        int count = 0;
        for (int di = 0; di < b.np(); ++di) {
            if (x[b.col_xi(ui, di)] > 0.5) {
                ++count;
                chosen = di;
            }
        }
        const std::string& user = t.nodes[b.users[ui]].id;
        if (count != 1) {
            rep.residual_ok = false;
            rep.notes.push_back("user '" + user + "' has " + std::to_string(count) +
                                " active assignment binaries");
        }
        rep.assignments.emplace_back(user,
                                     chosen < 0 ? "?" : t.nodes[b.procs[chosen]].id);
    }
    for (int di = 0; di < b.np(); ++di) {
        if (x[b.col_beta(di)] > 0.5) rep.active_processing.push_back(t.nodes[b.procs[di]].id);
    }
    for (std::size_t k = 0; k < b.theta_nodes.size(); ++k) {
        if (x[b.off_theta + k] > 0.5) rep.active_devices.push_back(t.nodes[b.theta_nodes[k]].id);
    }

    rep.components = power_components(b, t, catalog, x);
    // definitional rows and the recomputation must agree
    for (const char* c : {"PC", "PN", "TPC"}) {
        const double aux = x[b.model.column(c)];
        if (std::abs(aux - rep.components.at(c)) > 1e-6) {
            rep.residual_ok = false;
            rep.notes.push_back(std::string(c) + " definitional row disagrees with " +
                                "recomputation by " +
                                format_double(std::abs(aux - rep.components.at(c))));
        }
    }

    for (int li = 0; li < b.n_links; ++li) {
        double load = 0;
        for (int ui = 0; ui < b.nu(); ++ui) {
            for (int di = 0; di < b.np(); ++di) load += x[b.col_flow(ui, di, li)];
        }
        if (load > 1e-9) {
            rep.link_loads.emplace_back(t.nodes[t.links[li].from].id,
                                        t.nodes[t.links[li].to].id, load);
        }
    }

    if (b.has_delay) {
        rep.td_s = x[b.model.column("TD")];
        for (int ui = 0; ui < b.nu(); ++ui) {
            rep.ed_s[t.nodes[b.users[ui]].id] = x[b.col_ed(ui)];
        }
    }
    return rep;
}

inline nlohmann::json report_to_json(const PlacementReport& r) {
    nlohmann::json j;
    j["demand_gflops"] = r.demand_gflops;
    j["status"] = r.status;
    j["gap"] = r.gap;
    j["solve_ms"] = r.solve_ms;
    j["bnb_nodes"] = r.bnb_nodes;
    j["simplex_iterations"] = r.simplex_iterations;
    j["objective"] = r.objective;
    nlohmann::json assignments = nlohmann::json::object();
    for (const auto& [u, d] : r.assignments) assignments[u] = d;
    j["assignments"] = assignments;
    j["active_processing"] = r.active_processing;
    j["active_devices"] = r.active_devices;
    j["components_w"] = r.components;
    nlohmann::json loads = nlohmann::json::array();
    for (const auto& [from, to, load] : r.link_loads) {
        loads.push_back({{"from", from}, {"to", to}, {"load_gbps", load}});
    }
    j["link_loads"] = loads;
    j["td_s"] = r.td_s;
    j["ed_s"] = r.ed_s;
    j["model_hash"] = r.model_hash;
    j["max_residual"] = r.max_residual;
    j["residual_ok"] = r.residual_ok;
    j["infrastructure_floor_w"] = r.infrastructure_floor_w;
    j["infrastructure_floor_ok"] = r.infrastructure_floor_ok;
    if (!r.notes.empty()) j["notes"] = r.notes;
    return j;
}

} // namespace fogpon
