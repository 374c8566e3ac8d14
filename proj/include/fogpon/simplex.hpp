#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fogpon/linear_model.hpp"

namespace fogpon {

enum class LpStatus { Optimal, Infeasible, Unbounded, IterLimit, Numerical };

inline std::string to_string(LpStatus s) {
    switch (s) {
        case LpStatus::Optimal: return "optimal";
        case LpStatus::Infeasible: return "infeasible";
        case LpStatus::Unbounded: return "unbounded";
        case LpStatus::IterLimit: return "iteration-limit";
        case LpStatus::Numerical: return "numerical";
    }
    return "?";
}

struct LpResult {
    LpStatus status = LpStatus::Numerical;
    double objective = 0;
    std::vector<double> x; // structural variable values
    long iterations = 0;
    std::string note;
};

struct LpConfig {
    double feas_tol = 1e-7;
    double opt_tol = 1e-7;
    double pivot_tol = 1e-9;
    int refactor_interval = 100;
    long max_iterations = 0; // 0 = automatic from problem size
};

/// Bounded-variable primal simplex over a sparse LU-factorized basis with
/// product-form eta updates. Bland's rule engages after stall detection.
/// Rows get one slack each, so the all-slack basis is the (identity)
/// starting point; a composite phase 1 drives out bound infeasibility.
class LpEngine {
public:
    explicit LpEngine(const MilpModel& model, LpConfig cfg = {}) : cfg_(cfg) {
        n_ = static_cast<int>(model.vars.size());
        m_ = static_cast<int>(model.rows.size());
        ncol_ = n_ + m_;

        cost_.assign(ncol_, 0.0);
        for (const auto& [c, v] : model.objective) cost_[c] = v;
        lo_.assign(ncol_, 0.0);
        hi_.assign(ncol_, kInf);
        for (int j = 0; j < n_; ++j) {
            lo_[j] = model.vars[j].lo;
            hi_[j] = model.vars[j].hi;
        }
        rhs_.resize(m_);
        col_ptr_.assign(ncol_ + 1, 0);
        for (const auto& row : model.rows) {
            for (const auto& [c, v] : row.coeffs) {
                if (v != 0) col_ptr_[c + 1]++;
            }
        }
        for (int i = 0; i < m_; ++i) col_ptr_[n_ + i + 1] = 1; // slack unit column
        std::partial_sum(col_ptr_.begin(), col_ptr_.end(), col_ptr_.begin());
        col_row_.resize(col_ptr_.back());
        col_val_.resize(col_ptr_.back());
        std::vector<int> fill(ncol_, 0);
        for (int i = 0; i < m_; ++i) {
            const auto& row = model.rows[i];
            rhs_[i] = row.rhs;
            for (const auto& [c, v] : row.coeffs) {
                if (v == 0) continue;
                const int k = col_ptr_[c] + fill[c]++;
                col_row_[k] = i;
                col_val_[k] = v;
            }
            switch (row.rel) {
                case Relation::Le: break;                      // slack in [0, inf)
                case Relation::Ge: lo_[n_ + i] = -kInf; hi_[n_ + i] = 0; break;
                case Relation::Eq: hi_[n_ + i] = 0; break;     // fixed at 0
            }
            const int k = col_ptr_[n_ + i] + fill[n_ + i]++;
            col_row_[k] = i;
            col_val_[k] = 1.0;
        }
        scale();
        if (cfg_.max_iterations <= 0) {
            cfg_.max_iterations = 20000 + 50L * (m_ + n_);
        }
    }

    int rows() const { return m_; }
    int structural_cols() const { return n_; }

    /// Solves with per-column bound overrides (original units); pass an
    /// empty list for the plain relaxation.
    LpResult solve(std::span<const std::pair<int, std::pair<double, double>>> overrides = {}) {
        wlo_ = lo_;
        whi_ = hi_;
        for (const auto& [col, bounds] : overrides) {
            wlo_[col] = bounds.first / col_scale_[col];
            whi_[col] = bounds.second / col_scale_[col];
        }
        LpResult res;
        for (int j = 0; j < ncol_; ++j) {
            if (wlo_[j] > whi_[j] + cfg_.feas_tol) {
                res.status = LpStatus::Infeasible;
                res.note = "conflicting bounds";
                return res;
            }
        }
        init_basis();
        const LpStatus st = iterate(res.iterations);
        res.status = st;
        if (st == LpStatus::Optimal) {
            res.x = extract_solution();
            double obj = 0;
            for (int j = 0; j < n_; ++j) obj += cost_[j] / col_scale_[j] * res.x[j];
            res.objective = obj;
        }
        res.note += note_;
        return res;
    }

private:
    // ---- static problem data (scaled) ----
    LpConfig cfg_;
    int n_ = 0, m_ = 0, ncol_ = 0;
    std::vector<int> col_ptr_, col_row_;
    std::vector<double> col_val_;
    std::vector<double> cost_, lo_, hi_, rhs_;
    std::vector<double> col_scale_, row_scale_;

    // ---- per-solve state ----
    enum class St : std::uint8_t { Basic, AtLo, AtHi, Free };
    std::vector<double> wlo_, whi_;
    std::vector<St> stat_;
    std::vector<int> basis_;  // column id per basis position
    std::vector<int> where_;  // column id -> basis position or -1
    std::vector<double> xb_;  // basic values by position
    std::vector<double> nbval_; // nonbasic values by column
    std::string note_;

    // ---- LU factors of the basis ----
    struct Factor {
        std::vector<int> pivot_row;               // elimination step -> row
        std::vector<int> col_pos;                 // elimination step -> basis position
        std::vector<double> diag;
        std::vector<std::vector<std::pair<int, double>>> lcols; // (row, multiplier)
        std::vector<std::vector<std::pair<int, double>>> ucols; // (earlier step, value)
    };
    Factor lu_;
    struct Eta {
        int pos = 0;
        double pivot = 1;
        std::vector<std::pair<int, double>> entries; // position-space, excludes pos
    };
    std::vector<Eta> etas_;

    static double pow2_scale(double vmin, double vmax) {
        if (vmax == 0) return 1.0;
        return std::exp2(std::round(std::log2(1.0 / std::sqrt(vmin * vmax))));
    }

    /// Geometric-mean equilibration restricted to powers of two, applied
    /// to the structural columns; slack columns stay exact unit columns
    /// of the scaled system.
    void scale() {
        row_scale_.assign(m_, 1.0);
        col_scale_.assign(ncol_, 1.0);
        for (int pass = 0; pass < 3; ++pass) {
            std::vector<double> rmax(m_, 0.0), rmin(m_, kInf);
            for (int j = 0; j < n_; ++j) {
                for (int k = col_ptr_[j]; k < col_ptr_[j + 1]; ++k) {
                    const double a = std::abs(col_val_[k]);
                    if (a == 0) continue;
                    rmax[col_row_[k]] = std::max(rmax[col_row_[k]], a);
                    rmin[col_row_[k]] = std::min(rmin[col_row_[k]], a);
                }
            }
            std::vector<double> rs(m_, 1.0);
            for (int i = 0; i < m_; ++i) {
                rs[i] = pow2_scale(rmin[i], rmax[i]);
                row_scale_[i] *= rs[i];
                rhs_[i] *= rs[i];
            }
            for (int j = 0; j < n_; ++j) {
                for (int k = col_ptr_[j]; k < col_ptr_[j + 1]; ++k) {
                    col_val_[k] *= rs[col_row_[k]];
                }
            }
            for (int j = 0; j < n_; ++j) {
                double cmax = 0, cmin = kInf;
                for (int k = col_ptr_[j]; k < col_ptr_[j + 1]; ++k) {
                    const double a = std::abs(col_val_[k]);
                    if (a == 0) continue;
                    cmax = std::max(cmax, a);
                    cmin = std::min(cmin, a);
                }
                const double s = pow2_scale(cmin, cmax);
                if (s == 1.0) continue;
                for (int k = col_ptr_[j]; k < col_ptr_[j + 1]; ++k) col_val_[k] *= s;
                // x' = x / s keeps A'x' = Ax, so bounds and cost scale with s
                col_scale_[j] *= s;
                cost_[j] *= s;
                lo_[j] = lo_[j] == -kInf ? -kInf : lo_[j] / s;
                hi_[j] = hi_[j] == kInf ? kInf : hi_[j] / s;
            }
        }
    }

    void init_basis() {
        stat_.assign(ncol_, St::AtLo);
        nbval_.assign(ncol_, 0.0);
        basis_.resize(m_);
        where_.assign(ncol_, -1);
        for (int j = 0; j < ncol_; ++j) {
            if (wlo_[j] == -kInf && whi_[j] == kInf) {
                stat_[j] = St::Free;
                nbval_[j] = 0;
            } else if (wlo_[j] == -kInf) {
                stat_[j] = St::AtHi;
                nbval_[j] = whi_[j];
            } else {
                stat_[j] = St::AtLo;
                nbval_[j] = wlo_[j];
            }
        }
        for (int i = 0; i < m_; ++i) {
            const int col = n_ + i;
            basis_[i] = col;
            where_[col] = i;
            stat_[col] = St::Basic;
        }
        etas_.clear();
        factorize();
        recompute_xb();
    }

    void column_of(int col, std::vector<double>& dense) const {
        for (int k = col_ptr_[col]; k < col_ptr_[col + 1]; ++k) {
            dense[col_row_[k]] += col_val_[k];
        }
    }

    /// Left-looking LU with partial pivoting over the basis columns.
    /// Columns that eliminate to nothing pivotable are swapped for the
    /// slack of an unclaimed row on the spot, so factorization always
    /// completes; the ejected variable parks at its nearest bound.
    bool factorize() {
        lu_ = Factor{};
        lu_.pivot_row.assign(m_, -1);
        lu_.col_pos.assign(m_, -1);
        lu_.diag.assign(m_, 0.0);
        lu_.lcols.assign(m_, {});
        lu_.ucols.assign(m_, {});
        std::vector<int> order(m_);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
            const int ca = basis_[a], cb = basis_[b];
            return col_ptr_[ca + 1] - col_ptr_[ca] < col_ptr_[cb + 1] - col_ptr_[cb];
        });
        std::vector<double> w(m_, 0.0);
        std::vector<char> row_pivoted(m_, 0);
        for (int k = 0; k < m_; ++k) {
            const int pos = order[k];
            bool repaired = false;
            for (;;) {
                std::fill(w.begin(), w.end(), 0.0);
                column_of(basis_[pos], w);
                lu_.ucols[k].clear();
                for (int kk = 0; kk < k; ++kk) {
                    const double piv = w[lu_.pivot_row[kk]];
                    if (piv == 0) continue;
                    lu_.ucols[k].emplace_back(kk, piv);
                    for (const auto& [r, mult] : lu_.lcols[kk]) w[r] -= piv * mult;
                    w[lu_.pivot_row[kk]] = 0;
                }
                int best = -1;
                double best_abs = 0;
                for (int r = 0; r < m_; ++r) {
                    if (row_pivoted[r]) continue;
                    const double a = std::abs(w[r]);
                    if (a > best_abs) {
                        best_abs = a;
                        best = r;
                    }
                }
                if (best >= 0 && best_abs >= cfg_.pivot_tol) {
                    lu_.pivot_row[k] = best;
                    lu_.col_pos[k] = pos;
                    lu_.diag[k] = w[best];
                    row_pivoted[best] = 1;
                    for (int r = 0; r < m_; ++r) {
                        if (r == best || row_pivoted[r]) continue;
                        if (w[r] != 0) lu_.lcols[k].emplace_back(r, w[r] / lu_.diag[k]);
                    }
                    break;
                }
                if (repaired) return false;
                // eject this column for the slack of an unclaimed row
                int sub_row = -1;
                for (int r = 0; r < m_; ++r) {
                    if (!row_pivoted[r] && stat_[n_ + r] != St::Basic) {
                        sub_row = r;
                        break;
                    }
                }
                if (sub_row < 0) return false;
                const int old_col = basis_[pos];
                if (wlo_[old_col] == -kInf && whi_[old_col] == kInf) {
                    stat_[old_col] = St::Free;
                    nbval_[old_col] = 0;
                } else if (wlo_[old_col] == -kInf) {
                    stat_[old_col] = St::AtHi;
                    nbval_[old_col] = whi_[old_col];
                } else {
                    stat_[old_col] = St::AtLo;
                    nbval_[old_col] = wlo_[old_col];
                }
                where_[old_col] = -1;
                basis_[pos] = n_ + sub_row;
                where_[n_ + sub_row] = pos;
                stat_[n_ + sub_row] = St::Basic;
                note_ += "[basis repair] ";
                repaired = true;
            }
        }
        return true;
    }

    /// x = B^{-1} v; input in row space, output in basis-position space.
    void ftran(std::vector<double>& v) const {
        for (int k = 0; k < m_; ++k) {
            const double piv = v[lu_.pivot_row[k]];
            if (piv == 0) continue;
            for (const auto& [r, mult] : lu_.lcols[k]) v[r] -= piv * mult;
        }
        std::vector<double> z(m_);
        for (int k = 0; k < m_; ++k) z[k] = v[lu_.pivot_row[k]];
        std::vector<double> y(m_, 0.0);
        for (int k = m_ - 1; k >= 0; --k) {
            const double val = z[k] / lu_.diag[k];
            y[k] = val;
            if (val != 0) {
                for (const auto& [kk, uv] : lu_.ucols[k]) z[kk] -= uv * val;
            }
        }
        std::fill(v.begin(), v.end(), 0.0);
        for (int k = 0; k < m_; ++k) v[lu_.col_pos[k]] = y[k];
        for (const auto& e : etas_) {
            const double t = v[e.pos] / e.pivot;
            v[e.pos] = t;
            if (t == 0) continue;
            for (const auto& [i, wi] : e.entries) v[i] -= wi * t;
        }
    }

    /// y with y^T B = c; input in basis-position space, output row space.
    void btran(std::vector<double>& y) const {
        for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
            double acc = y[it->pos];
            for (const auto& [i, wi] : it->entries) acc -= wi * y[i];
            y[it->pos] = acc / it->pivot;
        }
        std::vector<double> yt(m_);
        for (int k = 0; k < m_; ++k) yt[k] = y[lu_.col_pos[k]];
        std::vector<double> g(m_, 0.0);
        for (int k = 0; k < m_; ++k) {
            double acc = yt[k];
            for (const auto& [kk, uv] : lu_.ucols[k]) acc -= uv * g[kk];
            g[k] = acc / lu_.diag[k];
        }
        std::fill(y.begin(), y.end(), 0.0);
        std::vector<double> w(m_, 0.0);
        for (int k = 0; k < m_; ++k) w[lu_.pivot_row[k]] = g[k];
        for (int k = m_ - 1; k >= 0; --k) {
            double acc = g[k];
            for (const auto& [r, mult] : lu_.lcols[k]) acc -= mult * w[r];
            w[lu_.pivot_row[k]] = acc;
        }
        y = w;
    }

    void recompute_xb() {
        std::vector<double> v = rhs_;
        for (int j = 0; j < ncol_; ++j) {
            if (stat_[j] == St::Basic || nbval_[j] == 0) continue;
            for (int k = col_ptr_[j]; k < col_ptr_[j + 1]; ++k) {
                v[col_row_[k]] -= col_val_[k] * nbval_[j];
            }
        }
        ftran(v);
        xb_ = v;
    }

    double infeasibility() const {
        double s = 0;
        for (int i = 0; i < m_; ++i) {
            const int col = basis_[i];
            if (xb_[i] < wlo_[col]) s += wlo_[col] - xb_[i];
            if (xb_[i] > whi_[col]) s += xb_[i] - whi_[col];
        }
        return s;
    }

    std::vector<double> extract_solution() const {
        std::vector<double> x(n_, 0.0);
        for (int j = 0; j < n_; ++j) {
            if (stat_[j] != St::Basic) x[j] = nbval_[j] * col_scale_[j];
        }
        for (int i = 0; i < m_; ++i) {
            const int col = basis_[i];
            if (col < n_) {
                double v = xb_[i];
                // snap basics sitting on a bound within tolerance
                if (std::abs(v - wlo_[col]) < cfg_.feas_tol) v = wlo_[col];
                if (std::abs(v - whi_[col]) < cfg_.feas_tol) v = whi_[col];
                x[col] = v * col_scale_[col];
            }
        }
        return x;
    }

    LpStatus iterate(long& iters) {
        const double big_step = 1e30;
        int stall = 0;
        long bland_until = -1;
        double last_merit = kInf;
        long updates_since_recompute = 0;
        std::vector<double> y(m_), w(m_);

        // Incremental basic values drift; every terminal conclusion is
        // re-verified against a fresh factorization before it is trusted.
        auto verify_or = [&](LpStatus conclusion) -> std::optional<LpStatus> {
            if (updates_since_recompute == 0) return conclusion;
            if (!refactor_now()) return LpStatus::Numerical;
            updates_since_recompute = 0;
            return std::nullopt; // state refreshed; keep iterating
        };

        for (iters = 0; iters < cfg_.max_iterations; ++iters) {
            const double infeas = infeasibility();
            const bool phase1 = infeas > cfg_.feas_tol;

            // dual prices for the phase objective
            std::fill(y.begin(), y.end(), 0.0);
            bool any_cost = false;
            for (int i = 0; i < m_; ++i) {
                const int col = basis_[i];
                double c = 0;
                if (phase1) {
                    if (xb_[i] < wlo_[col] - cfg_.feas_tol) c = -1;
                    else if (xb_[i] > whi_[col] + cfg_.feas_tol) c = 1;
                } else {
                    c = cost_[col];
                }
                if (c != 0) {
                    y[i] = c;
                    any_cost = true;
                }
            }
            if (any_cost) btran(y);

            const double merit = phase1 ? infeas : current_objective();
            if (merit < last_merit - 1e-12) {
                stall = 0;
            } else if (++stall > 200 && bland_until < iters) {
                bland_until = iters + 1000;
                stall = 0;
            }
            last_merit = merit;
            const bool bland = iters <= bland_until;

            // pricing
            int q = -1;
            double best = cfg_.opt_tol;
            int dir = +1;
            for (int j = 0; j < ncol_; ++j) {
                if (stat_[j] == St::Basic) continue;
                if (wlo_[j] == whi_[j]) continue; // fixed
                double d = phase1 ? 0.0 : cost_[j];
                if (any_cost) {
                    for (int k = col_ptr_[j]; k < col_ptr_[j + 1]; ++k) {
                        d -= y[col_row_[k]] * col_val_[k];
                    }
                }
                int cand_dir = 0;
                if (stat_[j] == St::AtLo && d < -cfg_.opt_tol) cand_dir = +1;
                else if (stat_[j] == St::AtHi && d > cfg_.opt_tol) cand_dir = -1;
                else if (stat_[j] == St::Free && std::abs(d) > cfg_.opt_tol) {
                    cand_dir = d < 0 ? +1 : -1;
                }
                if (cand_dir == 0) continue;
                if (bland) {
                    q = j;
                    dir = cand_dir;
                    break;
                }
                if (std::abs(d) > best) {
                    best = std::abs(d);
                    q = j;
                    dir = cand_dir;
                }
            }
            if (q < 0) {
                if (auto st = verify_or(phase1 ? LpStatus::Infeasible : LpStatus::Optimal)) {
                    return *st;
                }
                continue;
            }

            std::fill(w.begin(), w.end(), 0.0);
            column_of(q, w);
            ftran(w);

            // ratio test: entering moves by t >= 0 in direction dir,
            // basics move by -t * dir * w.
            double t_max = big_step;
            if (wlo_[q] != -kInf && whi_[q] != kInf) t_max = whi_[q] - wlo_[q];
            int leave = -1; // basis position; -1 = bound flip
            double t_best = t_max;
            double leave_delta = 0;
            bool leave_at_lo = true;
            for (int i = 0; i < m_; ++i) {
                const double delta = dir * w[i];
                if (std::abs(delta) < cfg_.pivot_tol) continue;
                const int col = basis_[i];
                const bool below = xb_[i] < wlo_[col] - cfg_.feas_tol;
                const bool above = xb_[i] > whi_[col] + cfg_.feas_tol;
                double t = -1;
                bool at_lo = true;
                if (below) {
                    // infeasible basics block only when they reach feasibility
                    if (delta < 0) t = (xb_[i] - wlo_[col]) / delta;
                } else if (above) {
                    if (delta > 0) {
                        t = (xb_[i] - whi_[col]) / delta;
                        at_lo = false;
                    }
                } else if (delta > 0) {
                    if (wlo_[col] == -kInf) continue;
                    t = (xb_[i] - wlo_[col]) / delta;
                } else {
                    if (whi_[col] == kInf) continue;
                    t = (xb_[i] - whi_[col]) / delta;
                    at_lo = false;
                }
                if (t < 0) {
                    if (t > -1e-9) t = 0;
                    else continue;
                }
                if (t < t_best - 1e-12 ||
                    (t < t_best + 1e-12 &&
                     (leave < 0 || std::abs(delta) > std::abs(leave_delta) + 1e-12))) {
                    t_best = t;
                    leave = i;
                    leave_delta = delta;
                    leave_at_lo = at_lo;
                }
            }

            if (leave < 0 && t_best >= big_step) {
                if (auto st = verify_or(phase1 ? LpStatus::Numerical : LpStatus::Unbounded)) {
                    if (*st == LpStatus::Numerical) note_ += "[phase-1 ray] ";
                    return *st;
                }
                continue;
            }

            if (leave < 0) {
                // bound flip: entering crosses to its other bound
                const double t = t_best;
                for (int i = 0; i < m_; ++i) xb_[i] -= t * dir * w[i];
                ++updates_since_recompute;
                stat_[q] = dir > 0 ? St::AtHi : St::AtLo;
                nbval_[q] = dir > 0 ? whi_[q] : wlo_[q];
                continue;
            }

            const double t = t_best;
            const double wpiv = w[leave];
            if (std::abs(wpiv) < cfg_.pivot_tol) {
                // unreliable pivot: refactorize and retry this iteration
                if (!refactor_now()) return LpStatus::Numerical;
                updates_since_recompute = 0;
                --iters;
                continue;
            }
            const int leaving_col = basis_[leave];
            const double enter_val =
                (stat_[q] == St::AtLo ? wlo_[q] : stat_[q] == St::AtHi ? whi_[q] : nbval_[q]) +
                dir * t;
            for (int i = 0; i < m_; ++i) xb_[i] -= t * dir * w[i];
            ++updates_since_recompute;

            // leaving variable parks at the bound it hit
            if (whi_[leaving_col] == wlo_[leaving_col] || leave_at_lo) {
                stat_[leaving_col] = St::AtLo;
                nbval_[leaving_col] = wlo_[leaving_col];
            } else {
                stat_[leaving_col] = St::AtHi;
                nbval_[leaving_col] = whi_[leaving_col];
            }
            where_[leaving_col] = -1;
            basis_[leave] = q;
            where_[q] = leave;
            stat_[q] = St::Basic;
            xb_[leave] = enter_val;

            Eta e;
            e.pos = leave;
            e.pivot = wpiv;
            for (int i = 0; i < m_; ++i) {
                if (i != leave && w[i] != 0) e.entries.emplace_back(i, w[i]);
            }
            etas_.push_back(std::move(e));
            if (static_cast<int>(etas_.size()) >= cfg_.refactor_interval) {
                if (!refactor_now()) return LpStatus::Numerical;
                updates_since_recompute = 0;
            }
        }
        return LpStatus::IterLimit;
    }

    double current_objective() const {
        double obj = 0;
        for (int j = 0; j < ncol_; ++j) {
            if (cost_[j] == 0) continue;
            obj += cost_[j] * (stat_[j] == St::Basic ? xb_[where_[j]] : nbval_[j]);
        }
        return obj;
    }

    bool refactor_now() {
        etas_.clear();
        if (!factorize()) return false;
        recompute_xb();
        return true;
    }

};

} // namespace fogpon
