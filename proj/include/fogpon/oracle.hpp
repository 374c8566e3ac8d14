#pragma once

#include <algorithm>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "fogpon/catalog.hpp"
#include "fogpon/common.hpp"
#include "fogpon/delay.hpp"
#include "fogpon/demand.hpp"
#include "fogpon/topology.hpp"
#include "fogpon/weights.hpp"

namespace fogpon {

/// Enforced envelope for the exhaustive reference: it refuses anything
/// that is not a tiny instance.
struct OracleLimits {
    int max_users = 3;
    int max_procs = 8;
    int max_paths_per_pair = 50;
};

struct OracleCandidate {
    std::vector<int> assignment;  // per user: index into the processing list
    std::vector<int> path_choice; // per user: index into its path list
    double tpc = 0;
    double td = 0;
    double objective = 0;
    std::map<std::string, double> components;
};

struct OracleResult {
    bool feasible = false;
    OracleCandidate best;
    std::vector<OracleCandidate> ranked; // ascending objective
    long evaluated = 0;
    std::vector<std::string> users; // node ids, enumeration order
    std::vector<std::string> procs;
};

namespace oracle_detail {

inline void enumerate_simple_paths(const Topology& t, int src, int dst, int limit,
                                   std::vector<std::vector<int>>& out) {
    const int n = static_cast<int>(t.nodes.size());
    std::vector<std::vector<int>> out_links(n);
    for (int li = 0; li < static_cast<int>(t.links.size()); ++li) {
        out_links[t.links[li].from].push_back(li);
    }
    std::vector<char> visited(n, 0);
    std::vector<int> stack;
    auto dfs = [&](auto&& self, int node) -> void {
        if (node == dst) {
            if (static_cast<int>(out.size()) >= limit) {
                throw ConfigError("oracle: more than " + std::to_string(limit) +
                                  " simple paths from '" + t.nodes[src].id + "' to '" +
                                  t.nodes[dst].id + "'");
            }
            out.push_back(stack);
            return;
        }
        visited[node] = 1;
        for (int li : out_links[node]) {
            const int next = t.links[li].to;
            if (visited[next]) continue;
            stack.push_back(li);
            self(self, next);
            stack.pop_back();
        }
        visited[node] = 0;
    };
    dfs(dfs, src);
}

/// Direct power evaluation from per-link loads; deliberately separate
/// from the model-building path so the two can certify each other.
inline std::map<std::string, double> powers_of_loads(const Topology& t,
                                                     const Catalog& catalog,
                                                     const std::vector<double>& link_load,
                                                     const std::vector<double>& served,
                                                     const std::vector<int>& procs) {
    std::map<std::string, double> comp;
    for (const char* c : {"PC", "PN", "PAP", "PCP", "PQ", "AR", "AY", "AGB", "PR", "PY",
                          "PGB", "PONU", "TPC"}) {
        comp[c] = 0;
    }
    for (std::size_t di = 0; di < procs.size(); ++di) {
        if (served[di] <= 0) continue;
        const auto& prof = catalog.at(t.nodes[procs[di]].profile);
        comp["PC"] += served[di] * prof.unit_power() + prof.idle_power_w;
    }
    // aggregated per-node traffic counts both directions, matching the
    // aggregation identities of the optimization model
    std::vector<double> node_traffic(t.nodes.size(), 0.0);
    for (std::size_t li = 0; li < t.links.size(); ++li) {
        node_traffic[t.links[li].from] += link_load[li];
        node_traffic[t.links[li].to] += link_load[li];
    }
    for (std::size_t i = 0; i < t.nodes.size(); ++i) {
        const Node& nd = t.nodes[i];
        if (node_traffic[i] <= 0) continue;
        double power = 0;
        if (!nd.profile.empty()) {
            const auto& prof = catalog.at(nd.profile);
            power = node_traffic[i] * prof.unit_power() + prof.idle_power_w;
        }
        switch (nd.role) {
            case NodeRole::ApSource:
                if (!nd.wavelength) comp["PAP"] += power;
                else if (*nd.wavelength == WavelengthClass::Red) comp["AR"] += power;
                else if (*nd.wavelength == WavelengthClass::Yellow) comp["AY"] += power;
                else comp["AGB"] += power;
                break;
            case NodeRole::ApProcessing:
                if (!nd.wavelength) comp["PCP"] += power;
                else if (*nd.wavelength == WavelengthClass::Red) comp["PR"] += power;
                else if (*nd.wavelength == WavelengthClass::Yellow) comp["PY"] += power;
                else comp["PGB"] += power;
                break;
            case NodeRole::Onu:
                comp["PONU"] += power;
                break;
            default:
                if (is_q_role(nd.role)) comp["PQ"] += power;
                break;
        }
    }
    comp["PN"] = comp["PAP"] + comp["PCP"] + comp["AR"] + comp["AY"] + comp["AGB"] +
                 comp["PR"] + comp["PY"] + comp["PGB"] + comp["PONU"] + comp["PQ"];
    comp["TPC"] = comp["PC"] + comp["PN"];
    return comp;
}

} // namespace oracle_detail

/// One routed user: load and the directed links of its path.
struct PathAssignment {
    std::string user_id;
    double load_gbps = 0;
    std::vector<int> links;
};

/// Per-user delay of a fixed routing: piecewise link delays evaluated at
/// the summed loads, then accumulated along each user's path.
inline std::map<std::string, double> exact_delay_of_routing(
    const Topology& t, const std::vector<PathAssignment>& routing,
    const PiecewiseSet& pw_set) {
    if (pw_set.size() != t.links.size()) {
        throw ConfigError("exact_delay_of_routing: piecewise set does not cover the links");
    }
    std::vector<double> load(t.links.size(), 0.0);
    for (const auto& r : routing) {
        for (int li : r.links) load[li] += r.load_gbps;
    }
    std::map<std::string, double> out;
    for (const auto& r : routing) {
        double ed = 0;
        for (int li : r.links) ed += eval_piecewise(pw_set[li], load[li]);
        out[r.user_id] = ed;
    }
    return out;
}

/// Exhaustive reference: every single-node placement tuple crossed with
/// every simple-path routing combination, checked against processing and
/// link capacities, with powers and piecewise delays computed directly
/// from the loads. Ties break lexicographically on the assignment tuple,
/// then on the path choices.
inline OracleResult enumerate_placements(const Topology& t, const DemandSet& demands,
                                         const Catalog& catalog,
                                         const PiecewiseSet* pw_set, Weights weights,
                                         const OracleLimits& limits = {}) {
    const auto users = t.source_uds();
    const auto procs = t.processing_nodes();
    const int nu = static_cast<int>(users.size());
    const int np = static_cast<int>(procs.size());
    if (nu > limits.max_users) {
        throw ConfigError("oracle: " + std::to_string(nu) + " users exceed the limit of " +
                          std::to_string(limits.max_users));
    }
    if (np > limits.max_procs) {
        throw ConfigError("oracle: " + std::to_string(np) +
                          " processing nodes exceed the limit of " +
                          std::to_string(limits.max_procs));
    }
    if (weights.beta != 0 && pw_set == nullptr) {
        throw ConfigError("oracle: delay weight is active but no piecewise set given");
    }

    OracleResult res;
    for (int u : users) res.users.push_back(t.nodes[u].id);
    for (int d : procs) res.procs.push_back(t.nodes[d].id);

    std::vector<double> demand(nu), traffic(nu);
    for (int ui = 0; ui < nu; ++ui) {
        const auto& dem = demands.of(t.nodes[users[ui]].id);
        demand[ui] = dem.demand_gflops;
        traffic[ui] = dem.traffic_gbps();
    }
    std::vector<double> omega(np);
    for (int di = 0; di < np; ++di) {
        omega[di] = catalog.at(t.nodes[procs[di]].profile).capacity;
    }

    std::vector<std::vector<std::vector<std::vector<int>>>> paths(
        nu, std::vector<std::vector<std::vector<int>>>(np));
    for (int ui = 0; ui < nu; ++ui) {
        for (int di = 0; di < np; ++di) {
            oracle_detail::enumerate_simple_paths(t, users[ui], procs[di],
                                                  limits.max_paths_per_pair,
                                                  paths[ui][di]);
        }
    }

    std::vector<int> assign(nu, 0);
    std::vector<int> choice(nu, 0);
    std::vector<double> link_load(t.links.size(), 0.0);

    auto evaluate_routing = [&]() {
        std::fill(link_load.begin(), link_load.end(), 0.0);
        for (int ui = 0; ui < nu; ++ui) {
            for (int li : paths[ui][assign[ui]][choice[ui]]) link_load[li] += traffic[ui];
        }
        for (std::size_t li = 0; li < t.links.size(); ++li) {
            if (link_load[li] > t.links[li].capacity_gbps + 1e-9) return; // over capacity
        }
        res.evaluated++;
        std::vector<double> served(np, 0.0);
        for (int ui = 0; ui < nu; ++ui) served[assign[ui]] += demand[ui];
        OracleCandidate cand;
        cand.assignment = assign;
        cand.path_choice = choice;
        cand.components =
            oracle_detail::powers_of_loads(t, catalog, link_load, served, procs);
        cand.tpc = cand.components.at("TPC");
        if (weights.beta != 0) {
            for (int ui = 0; ui < nu; ++ui) {
                double ed = 0;
                for (int li : paths[ui][assign[ui]][choice[ui]]) {
                    ed += eval_piecewise((*pw_set)[li], link_load[li]);
                }
                cand.td += ed;
            }
        }
        cand.objective = weights.alpha * cand.tpc + weights.beta * cand.td;
        res.ranked.push_back(std::move(cand));
    };

    auto routing_combos = [&](auto&& self, int ui) -> void {
        if (ui == nu) {
            evaluate_routing();
            return;
        }
        const auto& list = paths[ui][assign[ui]];
        for (int c = 0; c < static_cast<int>(list.size()); ++c) {
            choice[ui] = c;
            self(self, ui + 1);
        }
    };

    auto assignments = [&](auto&& self, int ui) -> void {
        if (ui == nu) {
            // capacity per node first; routing enumeration afterwards
            std::vector<double> served(np, 0.0);
            for (int i = 0; i < nu; ++i) served[assign[i]] += demand[i];
            for (int di = 0; di < np; ++di) {
                if (served[di] > omega[di] + 1e-9) return;
            }
            for (int i = 0; i < nu; ++i) {
                if (paths[i][assign[i]].empty()) return; // destination unreachable
            }
            routing_combos(routing_combos, 0);
            return;
        }
        for (int di = 0; di < np; ++di) {
            assign[ui] = di;
            self(self, ui + 1);
        }
    };
    assignments(assignments, 0);

    std::stable_sort(res.ranked.begin(), res.ranked.end(),
                     [](const OracleCandidate& a, const OracleCandidate& b) {
                         if (a.objective != b.objective) return a.objective < b.objective;
                         if (a.assignment != b.assignment) return a.assignment < b.assignment;
                         return a.path_choice < b.path_choice;
                     });
    if (!res.ranked.empty()) {
        res.feasible = true;
        res.best = res.ranked.front();
    }
    return res;
}

/// Ranked table as CSV for inspection.
inline void write_oracle_csv(std::ostream& os, const OracleResult& r) {
    os << "rank,objective,tpc_w,td_s,assignments,path_choice\n";
    for (std::size_t i = 0; i < r.ranked.size(); ++i) {
        const auto& c = r.ranked[i];
        os << i << ',' << format_double(c.objective) << ',' << format_double(c.tpc) << ','
           << format_double(c.td) << ',';
        for (std::size_t ui = 0; ui < c.assignment.size(); ++ui) {
            if (ui) os << ';';
            os << r.users[ui] << ':' << r.procs[c.assignment[ui]];
        }
        os << ',';
        for (std::size_t ui = 0; ui < c.path_choice.size(); ++ui) {
            if (ui) os << ';';
            os << c.path_choice[ui];
        }
        os << '\n';
    }
}

} // namespace fogpon
