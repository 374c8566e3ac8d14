#pragma once

#include <cmath>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "fogpon/linear_model.hpp"

namespace fogpon {

/// Max constraint violation per equation family, plus bound and
/// integrality deviations, for a candidate solution vector.
struct ResidualReport {
    std::map<std::string, double> family_violation;
    double max_violation = 0;
    std::string worst_family;
    double max_integrality = 0;
    double max_bound_violation = 0;
    std::vector<std::string> worst_rows; // rows violated beyond the check tolerance

    bool ok(double tol) const {
        return max_violation <= tol && max_integrality <= tol && max_bound_violation <= tol;
    }
};

inline ResidualReport check_solution(const MilpModel& m, std::span<const double> x,
                                     double tol = 1e-6) {
    if (x.size() != m.vars.size()) {
        throw ConfigError("check_solution: vector length " + std::to_string(x.size()) +
                          " does not match registry size " + std::to_string(m.vars.size()));
    }
    ResidualReport rep;
    for (const auto& row : m.rows) {
        const double a = m.activity(row, x);
        double viol = 0;
        switch (row.rel) {
            case Relation::Le: viol = std::max(0.0, a - row.rhs); break;
            case Relation::Ge: viol = std::max(0.0, row.rhs - a); break;
            case Relation::Eq: viol = std::abs(a - row.rhs); break;
        }
        auto& fam = rep.family_violation[row.tag];
        fam = std::max(fam, viol);
        if (viol > rep.max_violation) {
            rep.max_violation = viol;
            rep.worst_family = row.tag;
        }
        if (viol > tol && rep.worst_rows.size() < 16) rep.worst_rows.push_back(row.name);
    }
    for (const auto& v : m.vars) {
        const double val = x[v.column];
        double bviol = 0;
        if (val < v.lo) bviol = v.lo - val;
        if (val > v.hi) bviol = std::max(bviol, val - v.hi);
        rep.max_bound_violation = std::max(rep.max_bound_violation, bviol);
        if (v.kind == VarKind::Binary) {
            rep.max_integrality =
                std::max(rep.max_integrality, std::abs(val - std::round(val)));
        }
    }
    return rep;
}

} // namespace fogpon
