#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <optional>
#include <random>
#include <vector>

#include "fogpon/linear_model.hpp"
#include "fogpon/simplex.hpp"
#include "fogpon/solver.hpp"

using namespace fogpon;

namespace {

// Brute-force LP oracle for small boxed problems: enumerate all choices of
// n active constraints (rows as equalities plus bounds), solve the square
// system, keep feasible points. Independent of the simplex path.
std::optional<std::vector<double>> solve_square(std::vector<std::vector<double>> a,
                                                std::vector<double> rhs) {
    const int n = static_cast<int>(rhs.size());
    for (int k = 0; k < n; ++k) {
        int piv = -1;
        double best = 1e-9;
        for (int r = k; r < n; ++r) {
            if (std::abs(a[r][k]) > best) {
                best = std::abs(a[r][k]);
                piv = r;
            }
        }
        if (piv < 0) return std::nullopt;
        std::swap(a[k], a[piv]);
        std::swap(rhs[k], rhs[piv]);
        for (int r = 0; r < n; ++r) {
            if (r == k || a[r][k] == 0) continue;
            const double f = a[r][k] / a[k][k];
            for (int c = k; c < n; ++c) a[r][c] -= f * a[k][c];
            rhs[r] -= f * rhs[k];
        }
    }
    std::vector<double> x(n);
    for (int k = 0; k < n; ++k) x[k] = rhs[k] / a[k][k];
    return x;
}

struct BruteResult {
    bool feasible = false;
    double objective = kInf;
};

BruteResult brute_lp(const MilpModel& m,
                     const std::vector<std::pair<int, std::pair<double, double>>>& fix = {}) {
    const int n = static_cast<int>(m.vars.size());
    std::vector<double> lo(n), hi(n);
    for (int j = 0; j < n; ++j) {
        lo[j] = m.vars[j].lo;
        hi[j] = m.vars[j].hi;
    }
    for (const auto& [c, b] : fix) {
        lo[c] = b.first;
        hi[c] = b.second;
    }
    // constraint pool as (coeff row, rhs)
    std::vector<std::vector<double>> pool;
    std::vector<double> pool_rhs;
    for (const auto& row : m.rows) {
        std::vector<double> r(n, 0.0);
        for (const auto& [c, v] : row.coeffs) r[c] = v;
        pool.push_back(r);
        pool_rhs.push_back(row.rhs);
    }
    for (int j = 0; j < n; ++j) {
        std::vector<double> r(n, 0.0);
        r[j] = 1;
        pool.push_back(r);
        pool_rhs.push_back(lo[j]);
        pool.push_back(r);
        pool_rhs.push_back(hi[j]);
    }
    const int p = static_cast<int>(pool.size());
    std::vector<int> idx(n);
    BruteResult best;

    auto feasible = [&](const std::vector<double>& x) {
        for (int j = 0; j < n; ++j) {
            if (x[j] < lo[j] - 1e-7 || x[j] > hi[j] + 1e-7) return false;
        }
        for (const auto& row : m.rows) {
            const double a = m.activity(row, x);
            if (row.rel == Relation::Le && a > row.rhs + 1e-7) return false;
            if (row.rel == Relation::Ge && a < row.rhs - 1e-7) return false;
            if (row.rel == Relation::Eq && std::abs(a - row.rhs) > 1e-7) return false;
        }
        return true;
    };

    // enumerate n-subsets of the pool
    std::vector<int> comb(n);
    for (int i = 0; i < n; ++i) comb[i] = i;
    while (true) {
        std::vector<std::vector<double>> a;
        std::vector<double> rhs;
        for (int i : comb) {
            a.push_back(pool[i]);
            rhs.push_back(pool_rhs[i]);
        }
        if (auto x = solve_square(a, rhs); x && feasible(*x)) {
            best.feasible = true;
            best.objective = std::min(best.objective, m.objective_value(*x));
        }
        int i = n - 1;
        while (i >= 0 && comb[i] == p - n + i) --i;
        if (i < 0) break;
        ++comb[i];
        for (int k = i + 1; k < n; ++k) comb[k] = comb[k - 1] + 1;
    }
    return best;
}

MilpModel random_boxed_lp(std::mt19937& rng, bool with_binaries) {
    std::uniform_int_distribution<int> nv(2, 4), nr(1, 4), coeff(-3, 3), pick(0, 2);
    MilpModel m;
    const int n = nv(rng);
    int nbin = 0;
    for (int j = 0; j < n; ++j) {
        const bool bin = with_binaries && pick(rng) == 0 && nbin < 3;
        nbin += bin;
        if (bin) {
            m.add_var("v" + std::to_string(j), VarKind::Binary, 0, 1);
        } else {
            const double lo = pick(rng) == 0 ? -2 : 0;
            const double hi = lo + 1 + pick(rng) * 2;
            m.add_var("v" + std::to_string(j), VarKind::Continuous, lo, hi);
        }
    }
    const int rows = nr(rng);
    for (int i = 0; i < rows; ++i) {
        std::vector<std::pair<int, double>> coeffs;
        for (int j = 0; j < n; ++j) {
            const int c = coeff(rng);
            if (c != 0) coeffs.emplace_back(j, static_cast<double>(c));
        }
        if (coeffs.empty()) coeffs.emplace_back(0, 1.0);
        const Relation rel =
            pick(rng) == 0 ? Relation::Le : (pick(rng) == 0 ? Relation::Ge : Relation::Eq);
        m.add_row("r" + std::to_string(i), "r", rel, coeff(rng), coeffs);
    }
    for (int j = 0; j < n; ++j) {
        const int c = coeff(rng);
        if (c != 0) m.objective.emplace_back(j, static_cast<double>(c));
    }
    return m;
}

} // namespace

TEST_CASE("trivial LPs") {
    MilpModel m;
    const int x = m.add_var("x", VarKind::Continuous, 0, kInf);
    m.add_row("c1", "c1", Relation::Ge, 3, {{x, 1.0}});
    m.add_row("c2", "c2", Relation::Le, 10, {{x, 1.0}});
    m.objective = {{x, 1.0}};
    const auto r = solve_lp(m);
    REQUIRE(r.status == SolveStatus::Optimal);
    CHECK(r.objective == Catch::Approx(3.0).margin(1e-9));
    CHECK(r.solution[x] == Catch::Approx(3.0).margin(1e-9));
}

TEST_CASE("degenerate optimum face") {
    MilpModel m;
    const int x = m.add_var("x", VarKind::Continuous, 0, 1);
    const int y = m.add_var("y", VarKind::Continuous, 0, 1);
    m.add_row("c", "c", Relation::Le, 1, {{x, 1.0}, {y, 1.0}});
    m.objective = {{x, -1.0}, {y, -1.0}};
    const auto r = solve_lp(m);
    REQUIRE(r.status == SolveStatus::Optimal);
    CHECK(r.objective == Catch::Approx(-1.0).margin(1e-9));
}

TEST_CASE("infeasible and unbounded LPs are classified") {
    MilpModel m;
    const int x = m.add_var("x", VarKind::Continuous, 0, kInf);
    m.add_row("c1", "c1", Relation::Ge, 3, {{x, 1.0}});
    m.add_row("c2", "c2", Relation::Le, 2, {{x, 1.0}});
    m.objective = {{x, 1.0}};
    CHECK(solve_lp(m).status == SolveStatus::Infeasible);

    MilpModel m2;
    const int y = m2.add_var("y", VarKind::Continuous, 0, kInf);
    m2.add_row("c", "c", Relation::Ge, 0, {{y, 1.0}});
    m2.objective = {{y, -1.0}};
    CHECK(solve_lp(m2).status == SolveStatus::Unbounded);
}

TEST_CASE("random boxed LPs match brute-force vertex enumeration") {
    std::mt19937 rng(20240811);
    int optimal_cases = 0;
    for (int it = 0; it < 300; ++it) {
        const MilpModel m = random_boxed_lp(rng, false);
        const auto engine = solve_lp(m);
        const auto brute = brute_lp(m);
        INFO("instance " << it);
        if (brute.feasible) {
            REQUIRE(engine.status == SolveStatus::Optimal);
            CHECK(engine.objective ==
                  Catch::Approx(brute.objective).margin(1e-6).epsilon(1e-7));
            ++optimal_cases;
        } else {
            REQUIRE(engine.status == SolveStatus::Infeasible);
        }
    }
    CHECK(optimal_cases > 100); // the generator must actually exercise solves
}

TEST_CASE("random boxed MILPs match brute-force enumeration over binaries") {
    std::mt19937 rng(777);
    int optimal_cases = 0;
    for (int it = 0; it < 150; ++it) {
        const MilpModel m = random_boxed_lp(rng, true);
        std::vector<int> bins;
        for (const auto& v : m.vars) {
            if (v.kind == VarKind::Binary) bins.push_back(v.column);
        }
        BruteResult best;
        const int k = static_cast<int>(bins.size());
        for (int mask = 0; mask < (1 << k); ++mask) {
            std::vector<std::pair<int, std::pair<double, double>>> fix;
            for (int i = 0; i < k; ++i) {
                const double v = (mask >> i) & 1;
                fix.emplace_back(bins[i], std::make_pair(v, v));
            }
            const auto sub = brute_lp(m, fix);
            if (sub.feasible) {
                best.feasible = true;
                best.objective = std::min(best.objective, sub.objective);
            }
        }
        const auto engine = solve_milp(m);
        INFO("instance " << it);
        if (best.feasible) {
            REQUIRE(engine.status == SolveStatus::Optimal);
            CHECK(engine.objective ==
                  Catch::Approx(best.objective).margin(1e-6).epsilon(1e-7));
            ++optimal_cases;
        } else {
            REQUIRE(engine.status == SolveStatus::Infeasible);
        }
    }
    CHECK(optimal_cases > 50);
}
