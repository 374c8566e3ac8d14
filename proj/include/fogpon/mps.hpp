#pragma once

#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "fogpon/common.hpp"
#include "fogpon/linear_model.hpp"

namespace fogpon {

/// Free-format MPS writer. Rows and columns appear in registry order,
/// binaries are wrapped in INTORG/INTEND markers and pinned with BV
/// bounds, and numbers use shortest round-trip decimals so a parse
/// recovers the exact doubles.
inline void export_mps(const MilpModel& m, std::ostream& os) {
    os << "NAME " << (m.name.empty() ? "MODEL" : m.name) << "\n";
    os << "ROWS\n";
    os << " N OBJ\n";
    for (const auto& r : m.rows) {
        os << " " << relation_char(r.rel) << " " << r.name << "\n";
    }

    // column-major view
    const int n = static_cast<int>(m.vars.size());
    std::vector<std::vector<std::pair<std::string, double>>> entries(n);
    for (const auto& [c, v] : m.objective) {
        if (v != 0) entries[c].emplace_back("OBJ", v);
    }
    for (const auto& r : m.rows) {
        for (const auto& [c, v] : r.coeffs) {
            if (v != 0) entries[c].emplace_back(r.name, v);
        }
    }

    os << "COLUMNS\n";
    bool integer_mode = false;
    int marker = 0;
    for (const auto& var : m.vars) {
        const bool is_int = var.kind == VarKind::Binary;
        if (is_int != integer_mode) {
            os << " M" << marker++ << " 'MARKER' '" << (is_int ? "INTORG" : "INTEND")
               << "'\n";
            integer_mode = is_int;
        }
        const auto& col = entries[var.column];
        if (col.empty()) {
            os << " " << var.name << " OBJ 0\n"; // declare otherwise-empty column
            continue;
        }
        for (const auto& [row, v] : col) {
            os << " " << var.name << " " << row << " " << format_double(v) << "\n";
        }
    }
    if (integer_mode) os << " M" << marker++ << " 'MARKER' 'INTEND'\n";

    os << "RHS\n";
    for (const auto& r : m.rows) {
        if (r.rhs != 0) os << " RHS " << r.name << " " << format_double(r.rhs) << "\n";
    }

    os << "BOUNDS\n";
    for (const auto& var : m.vars) {
        if (var.kind == VarKind::Binary) {
            os << " BV BND " << var.name << "\n";
            continue;
        }
        if (var.lo == -kInf) {
            os << " MI BND " << var.name << "\n";
        } else if (var.lo != 0) {
            os << " LO BND " << var.name << " " << format_double(var.lo) << "\n";
        }
        if (var.hi != kInf) {
            if (var.hi == var.lo) {
                os << " FX BND " << var.name << " " << format_double(var.hi) << "\n";
            } else {
                os << " UP BND " << var.name << " " << format_double(var.hi) << "\n";
            }
        }
    }
    os << "ENDATA\n";
}

inline void export_mps_file(const MilpModel& m, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError("cannot write '" + path + "'");
    export_mps(m, os);
    if (!os.good()) throw ConfigError("I/O failure writing '" + path + "'");
}

/// Parses free-format MPS (the dialect export_mps emits, which is also
/// what mainstream solvers accept). Row tags are recovered from the name
/// prefix before '[' so residual reports keep their family grouping.
inline MilpModel parse_mps(std::istream& is) {
    MilpModel m;
    std::map<std::string, int> row_index;
    std::string obj_name;
    enum class Section { None, Rows, Columns, Rhs, Bounds, Done };
    Section section = Section::None;
    bool integer_mode = false;
    std::string line;

    auto tag_of = [](const std::string& row_name) {
        const auto p = row_name.find('[');
        return p == std::string::npos ? row_name : row_name.substr(0, p);
    };

    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::istringstream ss(line);
        std::vector<std::string> tok;
        for (std::string w; ss >> w;) tok.push_back(w);
        if (tok.empty() || tok[0][0] == '*') continue;

        const bool indented = line[0] == ' ' || line[0] == '\t';
        if (!indented) {
            const std::string& head = tok[0];
            if (head == "NAME") {
                m.name = tok.size() > 1 ? tok[1] : "";
            } else if (head == "ROWS") {
                section = Section::Rows;
            } else if (head == "COLUMNS") {
                section = Section::Columns;
            } else if (head == "RHS") {
                section = Section::Rhs;
            } else if (head == "BOUNDS") {
                section = Section::Bounds;
            } else if (head == "ENDATA") {
                section = Section::Done;
                break;
            } else if (head == "RANGES" || head == "OBJSENSE" || head == "SOS") {
                throw ConfigError("parse_mps: unsupported section '" + head + "'");
            } else {
                throw ConfigError("parse_mps: unknown section '" + head + "'");
            }
            continue;
        }

        switch (section) {
            case Section::Rows: {
                if (tok.size() != 2) throw ConfigError("parse_mps: bad ROWS line: " + line);
                if (tok[0] == "N") {
                    if (obj_name.empty()) obj_name = tok[1];
                    break;
                }
                Relation rel;
                if (tok[0] == "L") {
                    rel = Relation::Le;
                } else if (tok[0] == "G") {
                    rel = Relation::Ge;
                } else if (tok[0] == "E") {
                    rel = Relation::Eq;
                } else {
                    throw ConfigError("parse_mps: bad row sense '" + tok[0] + "'");
                }
                row_index[tok[1]] = static_cast<int>(m.rows.size());
                m.rows.push_back({tok[1], tag_of(tok[1]), rel, 0, {}});
                break;
            }
            case Section::Columns: {
                if (tok.size() >= 3 && tok[1] == "'MARKER'") {
                    if (tok[2] == "'INTORG'") {
                        integer_mode = true;
                    } else if (tok[2] == "'INTEND'") {
                        integer_mode = false;
                    } else {
                        throw ConfigError("parse_mps: bad marker line: " + line);
                    }
                    break;
                }
                if (tok.size() < 3 || tok.size() % 2 == 0) {
                    throw ConfigError("parse_mps: bad COLUMNS line: " + line);
                }
                if (!m.has_var(tok[0])) {
                    m.add_var(tok[0], integer_mode ? VarKind::Binary : VarKind::Continuous,
                              0, integer_mode ? 1 : kInf);
                }
                const int col = m.column(tok[0]);
                for (std::size_t i = 1; i + 1 < tok.size(); i += 2) {
                    const double v = parse_double(tok[i + 1]);
                    if (v == 0) continue;
                    if (tok[i] == obj_name) {
                        m.objective.emplace_back(col, v);
                    } else {
                        auto it = row_index.find(tok[i]);
                        if (it == row_index.end()) {
                            throw ConfigError("parse_mps: unknown row '" + tok[i] + "'");
                        }
                        m.rows[it->second].coeffs.emplace_back(col, v);
                    }
                }
                break;
            }
            case Section::Rhs: {
                if (tok.size() < 3 || tok.size() % 2 == 0) {
                    throw ConfigError("parse_mps: bad RHS line: " + line);
                }
                for (std::size_t i = 1; i + 1 < tok.size(); i += 2) {
                    auto it = row_index.find(tok[i]);
                    if (it == row_index.end()) {
                        throw ConfigError("parse_mps: unknown RHS row '" + tok[i] + "'");
                    }
                    m.rows[it->second].rhs = parse_double(tok[i + 1]);
                }
                break;
            }
            case Section::Bounds: {
                if (tok.size() < 3) throw ConfigError("parse_mps: bad BOUNDS line: " + line);
                const std::string& kind = tok[0];
                const std::string& var = tok[2];
                if (!m.has_var(var)) {
                    throw ConfigError("parse_mps: bound for unknown column '" + var + "'");
                }
                auto& v = m.vars[m.column(var)];
                if (kind == "BV") {
                    v.kind = VarKind::Binary;
                    v.lo = 0;
                    v.hi = 1;
                } else if (kind == "UP") {
                    v.hi = parse_double(tok.at(3));
                } else if (kind == "LO") {
                    v.lo = parse_double(tok.at(3));
                } else if (kind == "FX") {
                    v.lo = v.hi = parse_double(tok.at(3));
                } else if (kind == "MI") {
                    v.lo = -kInf;
                } else if (kind == "PL") {
                    v.hi = kInf;
                } else {
                    throw ConfigError("parse_mps: unsupported bound type '" + kind + "'");
                }
                break;
            }
            default:
                throw ConfigError("parse_mps: data line outside a section: " + line);
        }
    }
    if (section != Section::Done) throw ConfigError("parse_mps: missing ENDATA");
    for (auto& r : m.rows) std::sort(r.coeffs.begin(), r.coeffs.end());
    std::sort(m.objective.begin(), m.objective.end());
    return m;
}

inline MilpModel parse_mps_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError("cannot read '" + path + "'");
    return parse_mps(is);
}

/// Structural equality: variables with kinds and bounds, row senses,
/// right-hand sides and the nonzero sparse pattern, and the objective.
/// Names participate; row tags do not.
inline bool models_structurally_equal(const MilpModel& a, const MilpModel& b,
                                      std::string* why = nullptr) {
    auto fail = [&](const std::string& msg) {
        if (why) *why = msg;
        return false;
    };
    if (a.vars.size() != b.vars.size()) return fail("variable count differs");
    for (std::size_t i = 0; i < a.vars.size(); ++i) {
        const auto& va = a.vars[i];
        const auto& vb = b.vars[i];
        if (va.name != vb.name) return fail("variable name mismatch at column " + std::to_string(i));
        if (va.kind != vb.kind) return fail("variable kind mismatch: " + va.name);
        if (va.lo != vb.lo || va.hi != vb.hi) return fail("bounds mismatch: " + va.name);
    }
    if (a.rows.size() != b.rows.size()) return fail("row count differs");
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        const auto& ra = a.rows[i];
        const auto& rb = b.rows[i];
        if (ra.name != rb.name) return fail("row name mismatch at row " + std::to_string(i));
        if (ra.rel != rb.rel) return fail("row sense mismatch: " + ra.name);
        if (ra.rhs != rb.rhs) return fail("rhs mismatch: " + ra.name);
        auto nz = [](const std::vector<std::pair<int, double>>& c) {
            std::vector<std::pair<int, double>> out;
            for (const auto& e : c) {
                if (e.second != 0) out.push_back(e);
            }
            return out;
        };
        if (nz(ra.coeffs) != nz(rb.coeffs)) return fail("coefficient mismatch: " + ra.name);
    }
    if (a.objective != b.objective) return fail("objective mismatch");
    return true;
}

/// CPLEX-style LP text for eyeballing small models.
inline void export_lp(const MilpModel& m, std::ostream& os) {
    os << "\\ " << m.name << "\nMinimize\n obj:";
    for (const auto& [c, v] : m.objective) {
        os << (v >= 0 ? " + " : " - ") << format_double(std::abs(v)) << " "
           << m.vars[c].name;
    }
    os << "\nSubject To\n";
    for (const auto& r : m.rows) {
        os << " " << r.name << ":";
        for (const auto& [c, v] : r.coeffs) {
            os << (v >= 0 ? " + " : " - ") << format_double(std::abs(v)) << " "
               << m.vars[c].name;
        }
        switch (r.rel) {
            case Relation::Le: os << " <= "; break;
            case Relation::Ge: os << " >= "; break;
            case Relation::Eq: os << " = "; break;
        }
        os << format_double(r.rhs) << "\n";
    }
    os << "Bounds\n";
    for (const auto& v : m.vars) {
        if (v.kind == VarKind::Binary) continue;
        os << " " << (v.lo == -kInf ? std::string("-inf") : format_double(v.lo)) << " <= "
           << v.name << " <= " << (v.hi == kInf ? std::string("+inf") : format_double(v.hi))
           << "\n";
    }
    bool any_bin = false;
    for (const auto& v : m.vars) {
        if (v.kind == VarKind::Binary) {
            if (!any_bin) os << "Binaries\n";
            any_bin = true;
            os << " " << v.name << "\n";
        }
    }
    os << "End\n";
}

} // namespace fogpon
