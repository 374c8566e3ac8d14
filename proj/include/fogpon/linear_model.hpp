#pragma once

#include <algorithm>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "fogpon/common.hpp"

namespace fogpon {

enum class VarKind { Continuous, Binary };

struct VariableRef {
    std::string name;
    VarKind kind = VarKind::Continuous;
    double lo = 0;
    double hi = kInf;
    int column = -1;
};

enum class Relation { Le, Eq, Ge };

inline char relation_char(Relation r) {
    switch (r) {
        case Relation::Le: return 'L';
        case Relation::Eq: return 'E';
        case Relation::Ge: return 'G';
    }
    return '?';
}

/// One sparse constraint row. The tag names the equation family the row
/// belongs to ("eq19", "eq23", ...), used for grouped residual reports.
struct ConstraintRow {
    std::string name;
    std::string tag;
    Relation rel = Relation::Eq;
    double rhs = 0;
    std::vector<std::pair<int, double>> coeffs; // (column, value), column-sorted
};

/// Variable registry + sparse rows + linear objective, in canonical order.
struct MilpModel {
    std::string name = "fogpon";
    std::vector<VariableRef> vars;
    std::vector<ConstraintRow> rows;
    std::vector<std::pair<int, double>> objective; // column-sorted
    double alpha = 1;
    double beta = 0;

    int add_var(const std::string& vname, VarKind kind, double lo, double hi) {
        if (index_.count(vname)) throw ConfigError("duplicate variable '" + vname + "'");
        VariableRef v{vname, kind, lo, hi, static_cast<int>(vars.size())};
        index_[vname] = v.column;
        vars.push_back(std::move(v));
        return static_cast<int>(vars.size()) - 1;
    }

    int column(const std::string& vname) const {
        auto it = index_.find(vname);
        if (it == index_.end()) throw ConfigError("unknown variable '" + vname + "'");
        return it->second;
    }
    bool has_var(const std::string& vname) const { return index_.count(vname) != 0; }

    void add_row(std::string rname, std::string tag, Relation rel, double rhs,
                 std::vector<std::pair<int, double>> coeffs) {
        std::sort(coeffs.begin(), coeffs.end());
        // merge duplicate columns
        std::vector<std::pair<int, double>> merged;
        for (const auto& [c, v] : coeffs) {
            if (!merged.empty() && merged.back().first == c) {
                merged.back().second += v;
            } else {
                merged.emplace_back(c, v);
            }
        }
        rows.push_back({std::move(rname), std::move(tag), rel, rhs, std::move(merged)});
    }

    std::map<std::string, int> tag_counts() const {
        std::map<std::string, int> out;
        for (const auto& r : rows) out[r.tag]++;
        return out;
    }

    int binary_count() const {
        int n = 0;
        for (const auto& v : vars) n += v.kind == VarKind::Binary;
        return n;
    }

    /// Row activity for a candidate solution.
    double activity(const ConstraintRow& row, std::span<const double> x) const {
        double a = 0;
        for (const auto& [c, v] : row.coeffs) a += v * x[c];
        return a;
    }

    double objective_value(std::span<const double> x) const {
        double o = 0;
        for (const auto& [c, v] : objective) o += v * x[c];
        return o;
    }

    /// Platform-stable fingerprint of the full model structure.
    std::string hash() const {
        Fnv1a h;
        h.feed(name);
        h.feed(static_cast<std::int64_t>(vars.size()));
        for (const auto& v : vars) {
            h.feed(v.name);
            h.feed(v.kind == VarKind::Binary ? "B" : "C");
            h.feed(v.lo);
            h.feed(v.hi);
        }
        h.feed(static_cast<std::int64_t>(rows.size()));
        for (const auto& r : rows) {
            h.feed(r.name);
            h.feed(r.tag);
            h.feed(std::string(1, relation_char(r.rel)));
            h.feed(r.rhs);
            for (const auto& [c, v] : r.coeffs) {
                h.feed(static_cast<std::int64_t>(c));
                h.feed(v);
            }
        }
        for (const auto& [c, v] : objective) {
            h.feed(static_cast<std::int64_t>(c));
            h.feed(v);
        }
        h.feed(alpha);
        h.feed(beta);
        return h.hex();
    }

private:
    std::unordered_map<std::string, int> index_;
};

} // namespace fogpon
