#include "ossdp/ldl.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>

namespace ossdp {

namespace {

double max_abs_value(const SparseMatrix& m) {
    double s = 0.0;
    for (double v : m.values()) s = std::max(s, std::abs(v));
    return s;
}

}  // namespace

std::vector<int> min_degree_ordering(const SparseMatrix& k_mat) {
    const int n = k_mat.rows();
    if (k_mat.cols() != n)
        throw std::invalid_argument("min_degree_ordering: matrix not square");

    // variable adjacency (pattern of K + K^T, no self loops)
    std::vector<std::vector<int>> adj(static_cast<size_t>(n));
    for (int c = 0; c < n; ++c)
        for (int p = k_mat.col_ptr()[static_cast<size_t>(c)];
             p < k_mat.col_ptr()[static_cast<size_t>(c) + 1]; ++p) {
            const int r = k_mat.row_idx()[static_cast<size_t>(p)];
            if (r != c) {
                adj[static_cast<size_t>(c)].push_back(r);
                adj[static_cast<size_t>(r)].push_back(c);
            }
        }
    for (auto& a : adj) {
        std::sort(a.begin(), a.end());
        a.erase(std::unique(a.begin(), a.end()), a.end());
    }

    std::vector<std::vector<int>> elem_vars;  // clique variables per element
    std::vector<std::vector<int>> var_elems(static_cast<size_t>(n));
    std::vector<char> alive(static_cast<size_t>(n), 1);
    std::vector<int> degree(static_cast<size_t>(n));
    std::set<std::pair<int, int>> queue;
    for (int v = 0; v < n; ++v) {
        degree[static_cast<size_t>(v)] =
            static_cast<int>(adj[static_cast<size_t>(v)].size());
        queue.insert({degree[static_cast<size_t>(v)], v});
    }

    std::vector<int> perm;
    perm.reserve(static_cast<size_t>(n));
    std::vector<int> mark(static_cast<size_t>(n), -1);

    while (!queue.empty()) {
        const int v = queue.begin()->second;
        queue.erase(queue.begin());
        alive[static_cast<size_t>(v)] = 0;
        perm.push_back(v);

        // clique of the new element: live neighbours plus the variables of
        // the elements absorbed from v
        std::vector<int> clique;
        mark[static_cast<size_t>(v)] = v;
        auto push = [&](int u) {
            if (alive[static_cast<size_t>(u)] && mark[static_cast<size_t>(u)] != v) {
                mark[static_cast<size_t>(u)] = v;
                clique.push_back(u);
            }
        };
        for (int u : adj[static_cast<size_t>(v)]) push(u);
        for (int e : var_elems[static_cast<size_t>(v)])
            for (int u : elem_vars[static_cast<size_t>(e)]) push(u);
        for (int e : var_elems[static_cast<size_t>(v)])
            elem_vars[static_cast<size_t>(e)].clear();
        var_elems[static_cast<size_t>(v)].clear();
        adj[static_cast<size_t>(v)].clear();

        const int eid = static_cast<int>(elem_vars.size());
        elem_vars.push_back(clique);

        for (int u : clique) {
            auto& au = adj[static_cast<size_t>(u)];
            au.erase(std::remove_if(au.begin(), au.end(),
                                    [&](int w) {
                                        return w == v ||
                                               !alive[static_cast<size_t>(w)] ||
                                               mark[static_cast<size_t>(w)] == v;
                                    }),
                     au.end());
            auto& eu = var_elems[static_cast<size_t>(u)];
            eu.erase(std::remove_if(eu.begin(), eu.end(),
                                    [&](int e) {
                                        return elem_vars[static_cast<size_t>(e)].empty();
                                    }),
                     eu.end());
            eu.push_back(eid);
            int nd = static_cast<int>(au.size());
            for (int e : eu)
                nd += static_cast<int>(elem_vars[static_cast<size_t>(e)].size()) - 1;
            nd = std::min(nd, n - 1);
            queue.erase({degree[static_cast<size_t>(u)], u});
            degree[static_cast<size_t>(u)] = nd;
            queue.insert({nd, u});
        }
    }
    return perm;
}

SymFactor ldl_factor(const SparseMatrix& k_mat, const LdlOptions& opts) {
    const int n = k_mat.rows();
    if (k_mat.cols() != n)
        throw std::invalid_argument("ldl_factor: matrix not square");
    if (!(opts.pivot_tol > 0.0) || opts.pivot_tol > 0.5)
        throw std::invalid_argument("ldl_factor: pivot_tol outside (0, 0.5]");
    if (!opts.ordering.empty() && opts.ordering.size() != static_cast<size_t>(n))
        throw std::invalid_argument("ldl_factor: ordering size mismatch");
    if (opts.static_reg != 0.0 && opts.reg_sign.size() != static_cast<size_t>(n))
        throw std::invalid_argument("ldl_factor: reg_sign size mismatch");

    SymFactor f;
    f.refine_steps_ = opts.refine_steps;
    f.original_ = std::make_shared<SparseMatrix>(k_mat);
    f.perm_ = opts.ordering.empty() ? min_degree_ordering(k_mat) : opts.ordering;
    f.iperm_.assign(static_cast<size_t>(n), -1);
    for (int k = 0; k < n; ++k) {
        const int o = f.perm_[static_cast<size_t>(k)];
        if (o < 0 || o >= n || f.iperm_[static_cast<size_t>(o)] != -1)
            throw std::invalid_argument("ldl_factor: ordering is not a permutation");
        f.iperm_[static_cast<size_t>(o)] = k;
    }

    const double scale = std::max(max_abs_value(k_mat), 1e-300);
    const double tiny = scale * 1e-15;

    std::vector<int> lp;  // column pointers of L (strict lower triangle)
    std::vector<int> li;
    std::vector<double> lx;
    lp.reserve(static_cast<size_t>(n) + 1);
    lp.push_back(0);
    li.reserve(k_mat.values().size() * 2);
    lx.reserve(k_mat.values().size() * 2);

    f.d_.assign(static_cast<size_t>(n), 0.0);
    f.e_.assign(static_cast<size_t>(n), 0.0);
    f.pair_start_.assign(static_cast<size_t>(n), 0);

    std::vector<double> w(static_cast<size_t>(n), 0.0);
    std::vector<double> w2(static_cast<size_t>(n), 0.0);
    std::vector<int> bucket(static_cast<size_t>(n), -1);  // columns whose next row is r
    std::vector<int> chain(static_cast<size_t>(n), -1);
    std::vector<int> cursor(static_cast<size_t>(n), 0);

    auto rebucket = [&](int j, int p) {
        cursor[static_cast<size_t>(j)] = p;
        if (p < lp[static_cast<size_t>(j) + 1]) {
            const int r = li[static_cast<size_t>(p)];
            chain[static_cast<size_t>(j)] = bucket[static_cast<size_t>(r)];
            bucket[static_cast<size_t>(r)] = j;
        }
    };

    // scatter the updated column k of P K P^T into acc, consuming bucket[k]
    auto build_column = [&](int k, std::vector<double>& acc) {
        const int oc = f.perm_[static_cast<size_t>(k)];
        for (int p = k_mat.col_ptr()[static_cast<size_t>(oc)];
             p < k_mat.col_ptr()[static_cast<size_t>(oc) + 1]; ++p) {
            const int pr =
                f.iperm_[static_cast<size_t>(k_mat.row_idx()[static_cast<size_t>(p)])];
            if (pr >= k)
                acc[static_cast<size_t>(pr)] += k_mat.values()[static_cast<size_t>(p)];
        }
        if (opts.static_reg != 0.0)
            acc[static_cast<size_t>(k)] +=
                opts.static_reg * opts.reg_sign[static_cast<size_t>(oc)];
        int j = bucket[static_cast<size_t>(k)];
        bucket[static_cast<size_t>(k)] = -1;
        while (j != -1) {
            const int nextj = chain[static_cast<size_t>(j)];
            const int p = cursor[static_cast<size_t>(j)];
            const int pend = lp[static_cast<size_t>(j) + 1];
            if (f.pair_start_[static_cast<size_t>(j)]) {
                // the pair columns j, j+1 share one row pattern
                const int q = lp[static_cast<size_t>(j) + 1] + (p - lp[static_cast<size_t>(j)]);
                const double l1 = lx[static_cast<size_t>(p)];
                const double l2 = lx[static_cast<size_t>(q)];
                const double c1 =
                    f.d_[static_cast<size_t>(j)] * l1 + f.e_[static_cast<size_t>(j)] * l2;
                const double c2 =
                    f.e_[static_cast<size_t>(j)] * l1 + f.d_[static_cast<size_t>(j) + 1] * l2;
                for (int pp = p, qq = q; pp < pend; ++pp, ++qq)
                    acc[static_cast<size_t>(li[static_cast<size_t>(pp)])] -=
                        lx[static_cast<size_t>(pp)] * c1 + lx[static_cast<size_t>(qq)] * c2;
            } else {
                const double c = f.d_[static_cast<size_t>(j)] * lx[static_cast<size_t>(p)];
                for (int pp = p; pp < pend; ++pp)
                    acc[static_cast<size_t>(li[static_cast<size_t>(pp)])] -=
                        lx[static_cast<size_t>(pp)] * c;
            }
            rebucket(j, p + 1);
            j = nextj;
        }
    };

    std::vector<int> rows_scratch;
    rows_scratch.reserve(static_cast<size_t>(n));

    // emits column k from acc (pivot value piv), zeroes acc, buckets k
    auto emit_1x1 = [&](int k, std::vector<double>& acc, double piv) {
        f.d_[static_cast<size_t>(k)] = piv;
        for (int r = k + 1; r < n; ++r) {
            const double v = acc[static_cast<size_t>(r)];
            if (v != 0.0) {
                li.push_back(r);
                lx.push_back(v / piv);
                acc[static_cast<size_t>(r)] = 0.0;
            }
        }
        acc[static_cast<size_t>(k)] = 0.0;
        lp.push_back(static_cast<int>(li.size()));
        rebucket(k, lp[static_cast<size_t>(k)]);
    };

    int k = 0;
    while (k < n) {
        build_column(k, w);
        const double dcand = w[static_cast<size_t>(k)];
        double gamma = 0.0;
        for (int r = k + 1; r < n; ++r)
            gamma = std::max(gamma, std::abs(w[static_cast<size_t>(r)]));

        if (std::abs(dcand) <= tiny && gamma <= tiny) {
            // the whole remaining column vanished
            if (opts.static_reg == 0.0)
                throw SingularMatrixError(
                    "ldl_factor: singular matrix (zero pivot column at step " +
                    std::to_string(k) + ")");
            f.perturbed_ = true;
            ++f.inertia_.zeros;
            emit_1x1(k, w, dcand >= 0.0 ? tiny : -tiny);
            ++k;
            continue;
        }

        if (std::abs(dcand) >= opts.pivot_tol * gamma || k == n - 1) {
            emit_1x1(k, w, dcand);
            if (dcand > 0.0) ++f.inertia_.positives; else ++f.inertia_.negatives;
            ++k;
            continue;
        }

        // candidate 2x2 pivot with the next column in the order
        build_column(k + 1, w2);
        const double b11 = dcand;
        const double b12 = w[static_cast<size_t>(k) + 1];
        const double b22 = w2[static_cast<size_t>(k) + 1];
        const double det = b11 * b22 - b12 * b12;
        double gamma2 = 0.0;
        for (int r = k + 2; r < n; ++r)
            gamma2 = std::max(gamma2, std::abs(w2[static_cast<size_t>(r)]));
        const double bscale =
            std::max({std::abs(b11), std::abs(b12), std::abs(b22), gamma, gamma2});

        if (std::abs(det) > opts.pivot_tol * bscale * bscale) {
            f.d_[static_cast<size_t>(k)] = b11;
            f.e_[static_cast<size_t>(k)] = b12;
            f.d_[static_cast<size_t>(k) + 1] = b22;
            f.pair_start_[static_cast<size_t>(k)] = 1;
            rows_scratch.clear();
            for (int r = k + 2; r < n; ++r)
                if (w[static_cast<size_t>(r)] != 0.0 || w2[static_cast<size_t>(r)] != 0.0)
                    rows_scratch.push_back(r);
            // L rows of the pair: [w[r] w2[r]] B^{-1}
            for (int r : rows_scratch) {
                li.push_back(r);
                lx.push_back((w[static_cast<size_t>(r)] * b22 -
                              w2[static_cast<size_t>(r)] * b12) / det);
            }
            lp.push_back(static_cast<int>(li.size()));
            for (int r : rows_scratch) {
                li.push_back(r);
                lx.push_back((w2[static_cast<size_t>(r)] * b11 -
                              w[static_cast<size_t>(r)] * b12) / det);
            }
            lp.push_back(static_cast<int>(li.size()));
            for (int r : rows_scratch) {
                w[static_cast<size_t>(r)] = 0.0;
                w2[static_cast<size_t>(r)] = 0.0;
            }
            w[static_cast<size_t>(k)] = w[static_cast<size_t>(k) + 1] = 0.0;
            w2[static_cast<size_t>(k) + 1] = 0.0;
            rebucket(k, lp[static_cast<size_t>(k)]);
            cursor[static_cast<size_t>(k) + 1] = lp[static_cast<size_t>(k) + 1];
            if (det < 0.0) {
                ++f.inertia_.positives;
                ++f.inertia_.negatives;
            } else if (b11 + b22 > 0.0) {
                f.inertia_.positives += 2;
            } else {
                f.inertia_.negatives += 2;
            }
            k += 2;
            continue;
        }

        // 2x2 rejected: perturb the small pivot, push its update into w2 by
        // hand (bucket[k+1] is already consumed), then finish column k+1
        f.perturbed_ = true;
        const double mag =
            std::max(std::abs(dcand), opts.pivot_tol * std::max(gamma, tiny));
        const double piv = dcand >= 0.0 ? mag : -mag;
        const double lk1 = w[static_cast<size_t>(k) + 1] / piv;
        w2[static_cast<size_t>(k) + 1] -= w[static_cast<size_t>(k) + 1] * lk1;
        for (int r = k + 2; r < n; ++r)
            if (w[static_cast<size_t>(r)] != 0.0)
                w2[static_cast<size_t>(r)] -= w[static_cast<size_t>(r)] * lk1;
        emit_1x1(k, w, piv);
        if (piv > 0.0) ++f.inertia_.positives; else ++f.inertia_.negatives;
        // column k may have bucketed itself at row k+1; its contribution to
        // column k+1 was applied above, so advance it past that row
        if (cursor[static_cast<size_t>(k)] < lp[static_cast<size_t>(k) + 1] &&
            li[static_cast<size_t>(cursor[static_cast<size_t>(k)])] == k + 1) {
            bucket[static_cast<size_t>(k) + 1] = chain[static_cast<size_t>(k)];
            rebucket(k, cursor[static_cast<size_t>(k)] + 1);
        }

        double piv2 = w2[static_cast<size_t>(k) + 1];
        double g2 = 0.0;
        for (int r = k + 2; r < n; ++r)
            g2 = std::max(g2, std::abs(w2[static_cast<size_t>(r)]));
        if (std::abs(piv2) <= tiny && g2 <= tiny) {
            if (opts.static_reg == 0.0)
                throw SingularMatrixError(
                    "ldl_factor: singular matrix (zero pivot column at step " +
                    std::to_string(k + 1) + ")");
            ++f.inertia_.zeros;
            emit_1x1(k + 1, w2, piv2 >= 0.0 ? tiny : -tiny);
        } else {
            if (std::abs(piv2) <= tiny)
                piv2 = piv2 >= 0.0 ? opts.pivot_tol * g2 : -opts.pivot_tol * g2;
            emit_1x1(k + 1, w2, piv2);
            if (piv2 > 0.0) ++f.inertia_.positives; else ++f.inertia_.negatives;
        }
        k += 2;
    }

    // wrap the CSC arrays of L without re-canonicalizing
    {
        std::vector<Triplet> tr;
        tr.reserve(li.size());
        for (int c = 0; c < n; ++c)
            for (int p = lp[static_cast<size_t>(c)]; p < lp[static_cast<size_t>(c) + 1]; ++p)
                tr.push_back({li[static_cast<size_t>(p)], c, lx[static_cast<size_t>(p)]});
        f.lower_ = SparseMatrix::from_triplets(n, n, tr);
    }
    return f;
}

std::vector<double> SymFactor::solve_raw(std::span<const double> r) const {
    const int n = static_cast<int>(perm_.size());
    if (r.size() != static_cast<size_t>(n))
        throw std::invalid_argument("SymFactor::solve: dimension mismatch");
    const auto& lp = lower_.col_ptr();
    const auto& li = lower_.row_idx();
    const auto& lx = lower_.values();

    std::vector<double> x(static_cast<size_t>(n));
    for (int k = 0; k < n; ++k)
        x[static_cast<size_t>(k)] = r[static_cast<size_t>(perm_[static_cast<size_t>(k)])];

    for (int k = 0; k < n; ++k) {
        const double xk = x[static_cast<size_t>(k)];
        if (xk == 0.0) continue;
        for (int p = lp[static_cast<size_t>(k)]; p < lp[static_cast<size_t>(k) + 1]; ++p)
            x[static_cast<size_t>(li[static_cast<size_t>(p)])] -=
                lx[static_cast<size_t>(p)] * xk;
    }
    for (int k = 0; k < n; ++k) {
        if (pair_start_[static_cast<size_t>(k)]) {
            const double det = d_[static_cast<size_t>(k)] * d_[static_cast<size_t>(k) + 1] -
                               e_[static_cast<size_t>(k)] * e_[static_cast<size_t>(k)];
            const double u1 = x[static_cast<size_t>(k)];
            const double u2 = x[static_cast<size_t>(k) + 1];
            x[static_cast<size_t>(k)] =
                (d_[static_cast<size_t>(k) + 1] * u1 - e_[static_cast<size_t>(k)] * u2) / det;
            x[static_cast<size_t>(k) + 1] =
                (d_[static_cast<size_t>(k)] * u2 - e_[static_cast<size_t>(k)] * u1) / det;
            ++k;
        } else {
            x[static_cast<size_t>(k)] /= d_[static_cast<size_t>(k)];
        }
    }
    for (int k = n - 1; k >= 0; --k) {
        double s = x[static_cast<size_t>(k)];
        for (int p = lp[static_cast<size_t>(k)]; p < lp[static_cast<size_t>(k) + 1]; ++p)
            s -= lx[static_cast<size_t>(p)] * x[static_cast<size_t>(li[static_cast<size_t>(p)])];
        x[static_cast<size_t>(k)] = s;
    }

    std::vector<double> out(static_cast<size_t>(n));
    for (int k = 0; k < n; ++k)
        out[static_cast<size_t>(perm_[static_cast<size_t>(k)])] = x[static_cast<size_t>(k)];
    return out;
}

std::vector<double> SymFactor::solve(std::span<const double> r) const {
    std::vector<double> x = solve_raw(r);
    const int n = static_cast<int>(perm_.size());
    double rnorm = 0.0;
    for (double v : r) rnorm = std::max(rnorm, std::abs(v));
    const int max_passes = perturbed_ ? std::max(refine_steps_, 12) : refine_steps_;
    std::vector<double> resid(static_cast<size_t>(n));
    double last = std::numeric_limits<double>::infinity();
    for (int pass = 0; pass < max_passes; ++pass) {
        for (int i = 0; i < n; ++i) resid[static_cast<size_t>(i)] = r[static_cast<size_t>(i)];
        original_->multiply_add(x, resid, -1.0);
        double rmax = 0.0;
        for (double v : resid) rmax = std::max(rmax, std::abs(v));
        if (rmax <= 1e-16 * std::max(1.0, rnorm) || rmax >= last) break;
        last = rmax;
        const std::vector<double> dx = solve_raw(resid);
        for (int i = 0; i < n; ++i) x[static_cast<size_t>(i)] += dx[static_cast<size_t>(i)];
    }
    return x;
}

}  // namespace ossdp
