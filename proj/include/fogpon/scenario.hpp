#pragma once

#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fogpon/model_build.hpp"
#include "fogpon/report.hpp"
#include "fogpon/solver.hpp"

namespace fogpon {

struct SolverConfig {
    double gap = 1e-6;
    long node_limit = 1000000;
    double time_limit_s = kInf;
};

enum class PlacementMode { PerRoom, SingleRoom, Explicit };

/// One runnable experiment: topology shape, user placement, the demand
/// sweep (GFLOPs per user) with the data-rate ratio, objective weights,
/// delay-approximation settings and solver limits.
struct Scenario {
    std::string name = "scenario";
    int rooms = 1;
    PlacementMode mode = PlacementMode::PerRoom;
    int users_per_room = 2;
    int single_room_users = 4;
    int single_room_index = 1;
    std::vector<UdPlacement> explicit_sources;
    int processing_uds_per_room = 0;
    std::vector<UdPlacement> explicit_processors;

    std::vector<double> demand_sweep;
    double drr = 0.05; // Gbit/s per GFLOP
    double alpha = 1.0;
    double beta = 0.0;

    CapacityPolicy caps;
    int delay_segments = 6;
    double packet_bits = kDefaultPacketBits;
    double rho_max = kDefaultRhoMax;
    bool strict_per_user_delay = false;

    SolverConfig solver;

    void check() const {
        if (drr <= 0) throw ConfigError("scenario: drr must be > 0");
        for (double d : demand_sweep) {
            if (d <= 0) throw ConfigError("scenario: sweep demands must be > 0");
        }
    }
};

inline Scenario scenario_from_json(const nlohmann::json& j) {
    Scenario s;
    s.name = j.value("name", s.name);
    s.rooms = j.value("rooms", s.rooms);
    if (j.contains("user_placement")) {
        const auto& up = j.at("user_placement");
        const std::string mode = up.value("mode", "per-room");
        if (mode == "per-room") {
            s.mode = PlacementMode::PerRoom;
            s.users_per_room = up.value("count", 2);
        } else if (mode == "single-room") {
            s.mode = PlacementMode::SingleRoom;
            s.single_room_users = up.value("count", 4);
            s.single_room_index = up.value("room", 1);
        } else if (mode == "explicit") {
            s.mode = PlacementMode::Explicit;
            for (const auto& u : up.at("users")) {
                UdPlacement p;
                p.room = u.value("room", 1);
                p.group = u.value("group", 1);
                p.ap_id = u.value("ap", "");
                s.explicit_sources.push_back(p);
            }
        } else {
            throw ConfigError("scenario: unknown placement mode '" + mode + "'");
        }
    }
    if (j.contains("processing_user_devices")) {
        const auto& pp = j.at("processing_user_devices");
        s.processing_uds_per_room = pp.value("count", 0);
        if (pp.contains("users")) {
            for (const auto& u : pp.at("users")) {
                UdPlacement p;
                p.room = u.value("room", 1);
                p.group = u.value("group", 1);
                p.ap_id = u.value("ap", "");
                s.explicit_processors.push_back(p);
            }
        }
    }
    if (j.contains("demand_sweep")) {
        for (const auto& v : j.at("demand_sweep")) s.demand_sweep.push_back(v.get<double>());
    }
    s.drr = j.value("drr_gbps_per_gflop", s.drr);
    s.alpha = j.value("alpha", s.alpha);
    s.beta = j.value("beta", s.beta);
    if (j.contains("link_capacities")) {
        const auto& c = j.at("link_capacities");
        s.caps.vlc_gbps = c.value("vlc_gbps", s.caps.vlc_gbps);
        s.caps.backplane_gbps = c.value("backplane_gbps", s.caps.backplane_gbps);
        s.caps.interroom_gbps = c.value("interroom_gbps", s.caps.interroom_gbps);
        s.caps.onu_gbps = c.value("onu_gbps", s.caps.onu_gbps);
        s.caps.upstream_gbps = c.value("upstream_gbps", s.caps.upstream_gbps);
    }
    if (j.contains("delay")) {
        const auto& d = j.at("delay");
        s.delay_segments = d.value("segments", s.delay_segments);
        s.packet_bits = d.value("packet_bits", s.packet_bits);
        s.rho_max = d.value("rho_max", s.rho_max);
        s.strict_per_user_delay = d.value("strict_per_user", s.strict_per_user_delay);
    }
    if (j.contains("solver")) {
        const auto& so = j.at("solver");
        s.solver.gap = so.value("gap", s.solver.gap);
        s.solver.node_limit = so.value("node_limit", s.solver.node_limit);
        s.solver.time_limit_s = so.value("time_limit_s", s.solver.time_limit_s);
    }
    s.check();
    return s;
}

inline Scenario load_scenario_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot read scenario '" + path + "'");
    nlohmann::json j;
    try {
        is >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("scenario '" + path + "': malformed JSON: " + e.what());
    }
    return scenario_from_json(j);
}

inline PlacementMap scenario_placement(const Scenario& s) {
    PlacementMap pm;
    switch (s.mode) {
        case PlacementMode::PerRoom:
            for (int r = 1; r <= s.rooms; ++r) {
                for (int k = 0; k < s.users_per_room; ++k) {
                    pm.sources.push_back({r, k % 4 + 1, ""});
                }
            }
            break;
        case PlacementMode::SingleRoom:
            for (int k = 0; k < s.single_room_users; ++k) {
                pm.sources.push_back({s.single_room_index, k % 4 + 1, ""});
            }
            break;
        case PlacementMode::Explicit:
            pm.sources = s.explicit_sources;
            break;
    }
    if (!s.explicit_processors.empty()) {
        pm.processors = s.explicit_processors;
    } else {
        for (int r = 1; r <= s.rooms; ++r) {
            for (int k = 0; k < s.processing_uds_per_room; ++k) {
                pm.processors.push_back({r, k % 4 + 1, ""});
            }
        }
    }
    return pm;
}

inline Topology scenario_topology(const Scenario& s, const Catalog& catalog) {
    return build_p2p_pon(s.rooms, scenario_placement(s), catalog, s.caps);
}

/// Sound lower bound on total power: at least one processing node is
/// active, and the served demand costs at least the best idle-per-capacity
/// and dynamic rates available in the topology.
inline double infrastructure_floor_w(const Topology& t, const Catalog& catalog,
                                     double total_demand_gflops) {
    double min_idle = kInf, min_idle_per_cap = kInf, min_unit = kInf;
    for (int d : t.processing_nodes()) {
        const auto& prof = catalog.at(t.nodes[d].profile);
        min_idle = std::min(min_idle, prof.idle_power_w);
        min_idle_per_cap = std::min(min_idle_per_cap, prof.idle_power_w / prof.capacity);
        min_unit = std::min(min_unit, prof.unit_power());
    }
    if (min_idle == kInf) return 0;
    return std::max(min_idle, min_idle_per_cap * total_demand_gflops) +
           min_unit * total_demand_gflops;
}

/// Runs the demand sweep: topology and piecewise set are built once, each
/// demand level gets its own model and solve. Failures are recorded in
/// the row's status and never abort the sweep.
inline std::vector<PlacementReport> run_scenario(const Scenario& s, const Catalog& catalog) {
    s.check();
    std::vector<PlacementReport> rows;
    Topology t = scenario_topology(s, catalog);
    const auto violations = validate(t);
    if (!violations.empty()) {
        throw ConfigError("scenario topology invalid: " + violations.front());
    }
    PiecewiseSet pw;
    const bool delay = s.beta != 0;
    if (delay) pw = make_piecewise_set(t, s.delay_segments, s.packet_bits, s.rho_max);

    std::vector<std::string> user_ids;
    for (int u : t.source_uds()) user_ids.push_back(t.nodes[u].id);

    for (double demand : s.demand_sweep) {
        PlacementReport row;
        row.demand_gflops = demand;
        try {
            const DemandSet demands = DemandSet::uniform(user_ids, demand, s.drr);
            ModelOptions opts;
            opts.strict_per_user_delay = s.strict_per_user_delay;
            const BuiltModel built = build_model(t, demands, catalog, delay ? &pw : nullptr,
                                                 {s.alpha, s.beta}, opts);
            SolveLimits limits;
            limits.gap_tol = s.solver.gap;
            limits.node_limit = s.solver.node_limit;
            limits.time_limit_s = s.solver.time_limit_s;
            const SolveResult sol = solve_milp(built.model, limits);
            if (sol.status == SolveStatus::Optimal || sol.status == SolveStatus::FeasibleGap ||
                (sol.status == SolveStatus::LimitReached && !sol.solution.empty())) {
                row = extract_report(built, t, catalog, sol.solution);
                row.demand_gflops = demand;
                row.infrastructure_floor_w =
                    infrastructure_floor_w(t, catalog, demands.total_demand_gflops());
                row.infrastructure_floor_ok =
                    row.tpc_w() + 1e-6 >= row.infrastructure_floor_w;
            }
            row.status = to_string(sol.status);
            row.gap = sol.status == SolveStatus::Optimal && sol.gap == kInf ? 0 : sol.gap;
            row.solve_ms = sol.stats.wall_ms;
            row.bnb_nodes = sol.stats.bnb_nodes;
            row.simplex_iterations = sol.stats.simplex_iterations;
            if (!sol.note.empty()) row.notes.push_back(sol.note);
        } catch (const std::exception& e) {
            row.status = std::string("error: ") + e.what();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

inline const std::vector<std::string>& sweep_csv_columns() {
    static const std::vector<std::string> cols = {
        "demand_gflops", "status", "gap",  "tpc_w", "pc_w",   "pn_w",
        "pap_w",         "pcp_w",  "ar_w", "ay_w",  "agb_w",  "pr_w",
        "py_w",          "pgb_w",  "ponu_w", "pq_w", "td_s",  "assignments",
        "solve_ms"};
    return cols;
}

inline void write_sweep_csv(std::ostream& os, const std::vector<PlacementReport>& rows) {
    const auto& cols = sweep_csv_columns();
    for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
    os << '\n';
    for (const auto& r : rows) {
        auto comp = [&](const char* key) {
            auto it = r.components.find(key);
            return format_double(it == r.components.end() ? 0.0 : it->second);
        };
        std::string assignments;
        for (const auto& [u, d] : r.assignments) {
            if (!assignments.empty()) assignments += ';';
            assignments += u + ":" + d;
        }
        os << format_double(r.demand_gflops) << ',' << r.status << ','
           << format_double(r.gap) << ',' << comp("TPC") << ',' << comp("PC") << ','
           << comp("PN") << ',' << comp("PAP") << ',' << comp("PCP") << ',' << comp("AR")
           << ',' << comp("AY") << ',' << comp("AGB") << ',' << comp("PR") << ','
           << comp("PY") << ',' << comp("PGB") << ',' << comp("PONU") << ',' << comp("PQ")
           << ',' << format_double(r.td_s) << ',' << assignments << ','
           << format_double(r.solve_ms) << '\n';
    }
}

inline std::string sweep_csv_string(const std::vector<PlacementReport>& rows) {
    std::ostringstream os;
    write_sweep_csv(os, rows);
    return os.str();
}

/// Minimal parsed view of a sweep CSV (for compare_runs on files).
struct SweepTable {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    int col(const std::string& name) const {
        for (std::size_t i = 0; i < columns.size(); ++i) {
            if (columns[i] == name) return static_cast<int>(i);
        }
        throw ConfigError("sweep table: no column '" + name + "'");
    }
    double num(std::size_t row, int c) const { return parse_double(rows[row][c]); }
};

inline SweepTable parse_sweep_csv(std::istream& is) {
    SweepTable tab;
    std::string line;
    bool header = true;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ss(line);
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (header) {
            tab.columns = cells;
            header = false;
        } else {
            tab.rows.push_back(cells);
        }
    }
    if (tab.columns.empty()) throw ConfigError("sweep table: empty input");
    return tab;
}

inline SweepTable to_table(const std::vector<PlacementReport>& rows) {
    std::istringstream is(sweep_csv_string(rows));
    return parse_sweep_csv(is);
}

/// Percentage savings of run A relative to run B, per power/delay column
/// and sweep point, with an averages row appended.
struct SavingsTable {
    std::vector<std::string> columns; // "demand_gflops" + compared metrics
    std::vector<std::vector<double>> rows;
    std::vector<double> averages;
};

inline SavingsTable compare_runs(const SweepTable& a, const SweepTable& b) {
    if (a.rows.size() != b.rows.size()) {
        throw ConfigError("compare_runs: sweeps have different lengths");
    }
    static const std::vector<std::string> metrics = {
        "tpc_w", "pc_w", "pn_w", "pap_w", "pcp_w", "ar_w", "ay_w", "agb_w",
        "pr_w",  "py_w", "pgb_w", "ponu_w", "pq_w", "td_s"};
    SavingsTable out;
    out.columns.push_back("demand_gflops");
    for (const auto& m : metrics) out.columns.push_back(m + "_saving_pct");
    const int ad = a.col("demand_gflops");
    const int bd = b.col("demand_gflops");
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        if (a.num(i, ad) != b.num(i, bd)) {
            throw ConfigError("compare_runs: sweep points differ at row " +
                              std::to_string(i));
        }
        std::vector<double> row{a.num(i, ad)};
        for (const auto& m : metrics) {
            const double va = a.num(i, a.col(m));
            const double vb = b.num(i, b.col(m));
            row.push_back(vb == 0 ? 0.0 : (vb - va) / vb * 100.0);
        }
        out.rows.push_back(std::move(row));
    }
    out.averages.assign(out.columns.size(), 0.0);
    for (const auto& row : out.rows) {
        for (std::size_t c = 1; c < row.size(); ++c) out.averages[c] += row[c];
    }
    if (!out.rows.empty()) {
        for (std::size_t c = 1; c < out.averages.size(); ++c) {
            out.averages[c] /= static_cast<double>(out.rows.size());
        }
    }
    return out;
}

inline void write_savings_csv(std::ostream& os, const SavingsTable& t) {
    for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
    os << '\n';
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            os << (i ? "," : "") << format_double(row[i]);
        }
        os << '\n';
    }
    os << "average";
    for (std::size_t i = 1; i < t.averages.size(); ++i) os << ',' << format_double(t.averages[i]);
    os << '\n';
}

} // namespace fogpon
