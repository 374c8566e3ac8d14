#pragma once

#include <chrono>
#include <cmath>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "fogpon/linear_model.hpp"
#include "fogpon/residuals.hpp"
#include "fogpon/simplex.hpp"

namespace fogpon {

enum class SolveStatus { Optimal, FeasibleGap, Infeasible, Unbounded, LimitReached };

inline std::string to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::Optimal: return "optimal";
        case SolveStatus::FeasibleGap: return "feasible-gap";
        case SolveStatus::Infeasible: return "infeasible";
        case SolveStatus::Unbounded: return "unbounded";
        case SolveStatus::LimitReached: return "limit-reached";
    }
    return "?";
}

struct SolveStats {
    long simplex_iterations = 0;
    long bnb_nodes = 0;
    double wall_ms = 0;
    long incumbent_updates = 0;
    bool bound_monotone = true;
    bool incumbents_clean = true; // every incumbent passed check_solution
    std::vector<double> bound_history;
};

struct SolveResult {
    SolveStatus status = SolveStatus::Infeasible;
    double objective = kInf;
    double best_bound = -kInf;
    double gap = kInf;
    std::vector<double> solution;
    SolveStats stats;
    std::string note;
};

struct SolveLimits {
    double gap_tol = 1e-6;
    long node_limit = 1000000;
    double time_limit_s = kInf;
};

/// LP relaxation of the model (binaries relaxed to their [0,1] boxes).
inline SolveResult solve_lp(const MilpModel& m) {
    SolveResult res;
    if (m.vars.empty()) throw ConfigError("solve_lp: model has no variables");
    LpEngine eng(m);
    const auto t0 = std::chrono::steady_clock::now();
    LpResult lp = eng.solve();
    res.stats.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
            .count();
    res.stats.simplex_iterations = lp.iterations;
    res.note = lp.note;
    switch (lp.status) {
        case LpStatus::Optimal:
            res.status = SolveStatus::Optimal;
            res.objective = lp.objective;
            res.best_bound = lp.objective;
            res.gap = 0;
            res.solution = std::move(lp.x);
            break;
        case LpStatus::Infeasible: res.status = SolveStatus::Infeasible; break;
        case LpStatus::Unbounded: res.status = SolveStatus::Unbounded; break;
        default:
            res.status = SolveStatus::LimitReached;
            res.note += " [simplex " + to_string(lp.status) + "]";
            break;
    }
    return res;
}

/// Branch-and-bound on the binary variables: best-bound node selection
/// tie-broken toward deeper (then newer) nodes, branching on the most
/// fractional binary with ties to the lowest column index. Deterministic
/// given identical inputs and limits.
inline SolveResult solve_milp(const MilpModel& m, const SolveLimits& limits = {}) {
    SolveResult res;
    const auto t0 = std::chrono::steady_clock::now();
    auto elapsed_s = [&] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };
    LpEngine engine(m);

    std::vector<int> bin_cols;
    for (const auto& v : m.vars) {
        if (v.kind == VarKind::Binary) bin_cols.push_back(v.column);
    }

    struct Node {
        double bound;
        int depth;
        long id;
        std::vector<std::pair<int, std::pair<double, double>>> fixings;
    };
    struct NodeOrder {
        bool operator()(const Node& a, const Node& b) const {
            if (a.bound != b.bound) return a.bound < b.bound;
            if (a.depth != b.depth) return a.depth > b.depth;
            return a.id > b.id;
        }
    };
    std::multiset<Node, NodeOrder> open;
    long next_id = 0;
    open.insert({-kInf, 0, next_id++, {}});

    constexpr double int_tol = 1e-6;
    double incumbent_obj = kInf;
    std::vector<double> incumbent;
    double global_bound = -kInf;
    bool lp_trouble = false;
    enum class Stop { Exhausted, Cutoff, GapReached, Limit } stop = Stop::Exhausted;

    auto consider_incumbent = [&](const std::vector<double>& x, double obj) {
        if (obj >= incumbent_obj - 1e-12) return;
        incumbent_obj = obj;
        incumbent = x;
        res.stats.incumbent_updates++;
        const auto rep = check_solution(m, incumbent, 1e-6);
        if (!rep.ok(1e-6)) {
            res.stats.incumbents_clean = false;
            res.note += "[incumbent residual " + format_double(rep.max_violation) + " in " +
                        rep.worst_family + "] ";
        }
    };

    while (!open.empty()) {
        if (res.stats.bnb_nodes >= limits.node_limit || elapsed_s() > limits.time_limit_s) {
            stop = Stop::Limit;
            break;
        }
        Node node = *open.begin();
        open.erase(open.begin());

        if (node.bound > global_bound) global_bound = node.bound;
        if (!res.stats.bound_history.empty() &&
            global_bound < res.stats.bound_history.back()) {
            res.stats.bound_monotone = false;
        }
        res.stats.bound_history.push_back(global_bound);

        if (node.bound >= incumbent_obj - 1e-9) {
            // best-first order: every remaining node is at least as bad
            stop = Stop::Cutoff;
            open.clear();
            break;
        }

        res.stats.bnb_nodes++;
        LpResult lp = engine.solve(node.fixings);
        res.stats.simplex_iterations += lp.iterations;

        if (lp.status == LpStatus::Infeasible) continue;
        if (lp.status == LpStatus::Unbounded) {
            res.status = SolveStatus::Unbounded;
            res.note += "[unbounded relaxation] ";
            return res;
        }
        if (lp.status != LpStatus::Optimal) {
            lp_trouble = true;
            res.note += "[node " + std::to_string(node.id) + " " + to_string(lp.status) + "] ";
            continue;
        }
        if (lp.objective >= incumbent_obj - 1e-9) continue;

        int branch_col = -1;
        double branch_frac = int_tol;
        for (int c : bin_cols) {
            double v = lp.x[c];
            // respect node fixings exactly
            const double dist = std::min(v - std::floor(v), std::ceil(v) - v);
            if (dist > branch_frac + 1e-12) {
                branch_frac = dist;
                branch_col = c;
            }
        }

        if (branch_col < 0) {
            // integral: polish by fixing every binary to its rounded value
            auto fixings = node.fixings;
            for (int c : bin_cols) {
                const double v = std::round(lp.x[c]);
                fixings.emplace_back(c, std::make_pair(v, v));
            }
            LpResult polished = engine.solve(fixings);
            res.stats.simplex_iterations += polished.iterations;
            if (polished.status == LpStatus::Optimal) {
                consider_incumbent(polished.x, polished.objective);
            } else {
                consider_incumbent(lp.x, lp.objective);
            }
            continue;
        }

        for (double v : {0.0, 1.0}) {
            Node child;
            child.bound = lp.objective;
            child.depth = node.depth + 1;
            child.id = next_id++;
            child.fixings = node.fixings;
            child.fixings.emplace_back(branch_col, std::make_pair(v, v));
            open.insert(std::move(child));
        }

        if (incumbent_obj < kInf && !open.empty()) {
            const double bound_now = std::max(global_bound, open.begin()->bound);
            const double gap =
                (incumbent_obj - bound_now) / std::max(1.0, std::abs(incumbent_obj));
            if (gap <= limits.gap_tol) {
                global_bound = bound_now;
                stop = Stop::GapReached;
                open.clear();
                break;
            }
        }
    }

    res.stats.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
            .count();
    if (!open.empty()) global_bound = std::max(global_bound, open.begin()->bound);

    if (incumbent_obj < kInf) {
        res.objective = incumbent_obj;
        res.solution = std::move(incumbent);
        switch (stop) {
            case Stop::Exhausted:
            case Stop::Cutoff:
                // search space exhausted at the incumbent cutoff
                res.status = lp_trouble ? SolveStatus::FeasibleGap : SolveStatus::Optimal;
                if (!lp_trouble) global_bound = incumbent_obj;
                break;
            case Stop::GapReached:
                res.status = SolveStatus::Optimal; // within the requested gap
                break;
            case Stop::Limit:
                res.status = SolveStatus::LimitReached;
                break;
        }
        res.best_bound = std::min(global_bound, incumbent_obj);
        res.gap = (res.objective - res.best_bound) / std::max(1.0, std::abs(res.objective));
    } else if (stop == Stop::Limit) {
        res.status = SolveStatus::LimitReached;
        res.best_bound = global_bound;
    } else {
        res.status = lp_trouble ? SolveStatus::LimitReached : SolveStatus::Infeasible;
        res.best_bound = kInf;
        res.gap = 0;
    }
    return res;
}

} // namespace fogpon
