#include "ossdp/ip_solver.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <istream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "ossdp/dense_ldl.hpp"
#include "ossdp/ldl.hpp"

namespace ossdp {

const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::feasible: return "Feasible";
        case SolveStatus::infeasible: return "Infeasible";
        default: return "Indeterminate";
    }
}

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

using Eigen::MatrixXd;
using Eigen::VectorXd;

// packed svec layout shared by the variable packing and the cone
struct SvecMap {
    int n = 0;
    int m = 0;                  // N(N+1)/2
    std::vector<int> bi, bj;    // svec index -> (i >= j)
    std::vector<double> scale;  // 1 on the diagonal, sqrt(2) off it

    explicit SvecMap(int n_side) : n(n_side), m(n_side * (n_side + 1) / 2) {
        bi.reserve(static_cast<size_t>(m));
        bj.reserve(static_cast<size_t>(m));
        scale.reserve(static_cast<size_t>(m));
        for (int j = 0; j < n; ++j)
            for (int i = j; i < n; ++i) {
                bi.push_back(i);
                bj.push_back(j);
                scale.push_back(i == j ? 1.0 : kSqrt2);
            }
    }

    MatrixXd smat(const double* v) const {
        MatrixXd M(n, n);
        for (int p = 0; p < m; ++p) {
            const double x = v[static_cast<size_t>(p)] / scale[static_cast<size_t>(p)];
            M(bi[static_cast<size_t>(p)], bj[static_cast<size_t>(p)]) = x;
            M(bj[static_cast<size_t>(p)], bi[static_cast<size_t>(p)]) = x;
        }
        return M;
    }

    void svec(const MatrixXd& M, double* out) const {
        for (int p = 0; p < m; ++p)
            out[static_cast<size_t>(p)] = scale[static_cast<size_t>(p)] *
                                          M(bi[static_cast<size_t>(p)], bj[static_cast<size_t>(p)]);
    }

    // dense matrix of u -> svec(T smat(u) T)
    void symkron(const MatrixXd& T, MatrixXd& V) const {
        V.resize(m, m);
        for (int q = 0; q < m; ++q) {
            const int k = bi[static_cast<size_t>(q)];
            const int l = bj[static_cast<size_t>(q)];
            const double aq = scale[static_cast<size_t>(q)];
            for (int p = 0; p < m; ++p) {
                const int i = bi[static_cast<size_t>(p)];
                const int j = bj[static_cast<size_t>(p)];
                V(p, q) = 0.5 * scale[static_cast<size_t>(p)] * aq *
                          (T(i, k) * T(j, l) + T(i, l) * T(j, k));
            }
        }
    }
};

struct Layout {
    int n = 0;      // block side
    int nb = 0;     // unknown blocks
    int m = 0;      // svec size per block
    int sigma = 0;  // packed variables nb*m
    int nw = 0;     // sigma + 1 (x, t)
    int rho = 0;    // equality rows, instance + midpoint
    int cone = 0;   // nb*m
    int ntot = 0;
    int yoff = 0;
    int zoff = 0;
};

struct KktFrame {
    Layout lay;
    SparseMatrix a_solve;          // instance rows + midpoint rows
    std::vector<double> b_solve;
    SparseMatrix k_mat;            // fixed pattern, V entries rewritten per pass
    std::vector<int> vpos;         // value positions of the V entries
    std::vector<int> ordering;     // x, z blocks, y, t
    std::vector<std::int8_t> reg_sign;
    double reg = 0.0;
};

KktFrame build_frame(const SdpInstance& inst, const SvecMap& sv) {
    KktFrame f;
    Layout& L = f.lay;
    L.n = inst.n;
    L.nb = inst.num_blocks;
    L.m = sv.m;
    L.sigma = L.nb * L.m;
    L.nw = L.sigma + 1;

    const MidpointRows mid = midpoint_rows(inst.k_queries, inst.n);
    {
        const SparseMatrix* parts[] = {&inst.a_mat, &mid.a_mat};
        f.a_solve = vstack(parts);
        f.b_solve = inst.b_vec;
        f.b_solve.insert(f.b_solve.end(), mid.b_vec.begin(), mid.b_vec.end());
    }
    L.rho = f.a_solve.rows();
    L.cone = L.nb * L.m;
    L.yoff = L.nw;
    L.zoff = L.nw + L.rho;
    L.ntot = L.nw + L.rho + L.cone;

    std::vector<Triplet> tr;
    tr.reserve(static_cast<size_t>(2 * f.a_solve.nnz() + 4 * L.sigma) +
               static_cast<size_t>(L.nb) * static_cast<size_t>(L.m) * static_cast<size_t>(L.m));
    const auto& A = f.a_solve;
    for (int c = 0; c < A.cols(); ++c)
        for (int p = A.col_ptr()[static_cast<size_t>(c)];
             p < A.col_ptr()[static_cast<size_t>(c) + 1]; ++p) {
            const int r = L.yoff + A.row_idx()[static_cast<size_t>(p)];
            const double v = A.values()[static_cast<size_t>(p)];
            tr.push_back({r, c, v});
            tr.push_back({c, r, v});
        }
    for (int b = 0; b < L.nb; ++b)
        for (int p = 0; p < L.m; ++p) {
            const int zr = L.zoff + b * L.m + p;
            const int xc = b * L.m + p;
            tr.push_back({zr, xc, -sv.scale[static_cast<size_t>(p)]});
            tr.push_back({xc, zr, -sv.scale[static_cast<size_t>(p)]});
            if (sv.bi[static_cast<size_t>(p)] == sv.bj[static_cast<size_t>(p)]) {
                tr.push_back({zr, L.sigma, 1.0});
                tr.push_back({L.sigma, zr, 1.0});
            }
        }
    for (int b = 0; b < L.nb; ++b)
        for (int q = 0; q < L.m; ++q)
            for (int p = 0; p < L.m; ++p)
                tr.push_back({L.zoff + b * L.m + p, L.zoff + b * L.m + q, -1.0});

    f.k_mat = SparseMatrix::from_triplets(L.ntot, L.ntot, tr);

    f.vpos.resize(static_cast<size_t>(L.nb) * static_cast<size_t>(L.m) * static_cast<size_t>(L.m));
    size_t idx = 0;
    for (int b = 0; b < L.nb; ++b)
        for (int q = 0; q < L.m; ++q)
            for (int p = 0; p < L.m; ++p)
                f.vpos[idx++] = f.k_mat.find(L.zoff + b * L.m + p, L.zoff + b * L.m + q);

    f.ordering.reserve(static_cast<size_t>(L.ntot));
    for (int i = 0; i < L.sigma; ++i) f.ordering.push_back(i);
    for (int i = 0; i < L.cone; ++i) f.ordering.push_back(L.zoff + i);
    for (int i = 0; i < L.rho; ++i) f.ordering.push_back(L.yoff + i);
    f.ordering.push_back(L.sigma);

    f.reg_sign.assign(static_cast<size_t>(L.ntot), -1);
    for (int i = 0; i < L.nw; ++i) f.reg_sign[static_cast<size_t>(i)] = 1;

    double amax = 0.0;
    for (double v : A.values()) amax = std::max(amax, std::abs(v));
    f.reg = 1e-9 * (1.0 + amax);
    return f;
}

std::vector<double> dense_refined_solve(const DenseLdl& f, const SparseMatrix& K,
                                        std::span<const double> r, int steps) {
    std::vector<double> x = f.solve_raw(r);
    std::vector<double> resid(r.size());
    double last = std::numeric_limits<double>::infinity();
    for (int pass = 0; pass < steps; ++pass) {
        std::copy(r.begin(), r.end(), resid.begin());
        K.multiply_add(x, resid, -1.0);
        double rmax = 0.0;
        for (double v : resid) rmax = std::max(rmax, std::abs(v));
        if (rmax >= last || rmax <= 1e-16) break;
        last = rmax;
        const std::vector<double> dx = f.solve_raw(resid);
        for (size_t i = 0; i < x.size(); ++i) x[i] += dx[i];
    }
    return x;
}

// least-norm solution of A x = b through the augmented system [I A^T; A 0]
std::vector<double> least_norm_solution(const SparseMatrix& A,
                                        std::span<const double> b) {
    const int nc = A.cols();
    const int nr = A.rows();
    std::vector<Triplet> tr;
    tr.reserve(static_cast<size_t>(nc) + 2 * static_cast<size_t>(A.nnz()));
    for (int i = 0; i < nc; ++i) tr.push_back({i, i, 1.0});
    for (int c = 0; c < nc; ++c)
        for (int p = A.col_ptr()[static_cast<size_t>(c)];
             p < A.col_ptr()[static_cast<size_t>(c) + 1]; ++p) {
            const int r = nc + A.row_idx()[static_cast<size_t>(p)];
            tr.push_back({r, c, A.values()[static_cast<size_t>(p)]});
            tr.push_back({c, r, A.values()[static_cast<size_t>(p)]});
        }
    const SparseMatrix aug = SparseMatrix::from_triplets(nc + nr, nc + nr, tr);
    LdlOptions opts;
    opts.ordering.resize(static_cast<size_t>(nc + nr));
    for (int i = 0; i < nc + nr; ++i) opts.ordering[static_cast<size_t>(i)] = i;
    opts.refine_steps = 2;
    const SymFactor fac = ldl_factor(aug, opts);
    std::vector<double> rhs(static_cast<size_t>(nc + nr), 0.0);
    std::copy(b.begin(), b.end(), rhs.begin() + nc);
    std::vector<double> sol = fac.solve(rhs);
    sol.resize(static_cast<size_t>(nc));
    return sol;
}

struct Scaling {
    std::vector<MatrixXd> r, ri, t;
    std::vector<VectorXd> lam;
};

SolveOutcome solve_margin(const SdpInstance& inst, const SolverConfig& cfg) {
    const auto t_start = std::chrono::steady_clock::now();
    auto elapsed = [&] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                             t_start).count();
    };

    SolveOutcome out;
    auto fail = [&](const std::string& why, int iters) {
        out.status = SolveStatus::indeterminate;
        out.diagnostic = why;
        out.iterations = iters;
        out.wall_time = elapsed();
        return out;
    };

    const SvecMap sv(inst.n);
    if (cfg.kkt_mode == KktMode::dense) {
        // size the KKT from dimensions alone; assembly comes after the check
        const double sigma = static_cast<double>(inst.num_blocks) * sv.m;
        const double extra = inst.n % 2 == 0 ? inst.k_queries / 2 : 0;
        const double ntot = (sigma + 1) + (inst.a_mat.rows() + extra) + sigma;
        const double cells = ntot * ntot;
        if (cells > cfg.budget_cells)
            throw BudgetExceededError(
                "dense KKT needs " + std::to_string(static_cast<long long>(cells)) +
                " cells, over the budget of " +
                std::to_string(static_cast<long long>(cfg.budget_cells)));
    }
    KktFrame frame = build_frame(inst, sv);
    const Layout& L = frame.lay;

    // strictly feasible primal start: least-norm x, margin shifted below the
    // smallest block eigenvalue
    std::vector<double> x0;
    try {
        x0 = least_norm_solution(frame.a_solve, frame.b_solve);
    } catch (const SingularMatrixError& e) {
        return fail(std::string("initialization failed: ") + e.what(), 0);
    }
    {
        std::vector<double> r = frame.a_solve.multiply(x0);
        double bmax = 0.0;
        for (double v : frame.b_solve) bmax = std::max(bmax, std::abs(v));
        double e = 0.0;
        for (size_t i = 0; i < r.size(); ++i)
            e = std::max(e, std::abs(r[i] - frame.b_solve[i]));
        if (!(e <= 1e-7 * (1.0 + bmax)))
            return fail("equality system inconsistent at initialization", 0);
    }
    double tvar;
    {
        double mineig = std::numeric_limits<double>::infinity();
        for (int b = 1; b <= L.nb; ++b) {
            const SymMatrix q = unpack_block(x0, b, inst.vars);
            Eigen::Map<const MatrixXd> qm(q.row_major().data(), L.n, L.n);
            Eigen::SelfAdjointEigenSolver<MatrixXd> es(qm, Eigen::EigenvaluesOnly);
            mineig = std::min(mineig, es.eigenvalues().minCoeff());
        }
        tvar = mineig - 1.0;
    }

    std::vector<double> x = std::move(x0);
    std::vector<double> y(static_cast<size_t>(L.rho), 0.0);
    std::vector<double> s(static_cast<size_t>(L.cone), 0.0);
    std::vector<double> z(static_cast<size_t>(L.cone), 0.0);
    for (int b = 0; b < L.nb; ++b)
        for (int p = 0; p < L.m; ++p) {
            const size_t ip = static_cast<size_t>(b * L.m + p);
            const bool diag = sv.bi[static_cast<size_t>(p)] == sv.bj[static_cast<size_t>(p)];
            s[ip] = sv.scale[static_cast<size_t>(p)] * x[ip] - (diag ? tvar : 0.0);
            z[ip] = diag ? 1.0 : 0.0;
        }

    const double nu = static_cast<double>(L.nb) * L.n;
    double bnorm = 0.0;
    for (double v : frame.b_solve) bnorm += v * v;
    bnorm = std::sqrt(bnorm);

    Scaling sc;
    sc.r.resize(static_cast<size_t>(L.nb));
    sc.ri.resize(static_cast<size_t>(L.nb));
    sc.t.resize(static_cast<size_t>(L.nb));
    sc.lam.resize(static_cast<size_t>(L.nb));
    MatrixXd vblock;

    std::vector<double> rx(static_cast<size_t>(L.nw));
    std::vector<double> ry(static_cast<size_t>(L.rho));
    std::vector<double> rz(static_cast<size_t>(L.cone));
    std::vector<double> rhs(static_cast<size_t>(L.ntot));

    auto block_seg = [&](std::vector<double>& v, int b) {
        return v.data() + static_cast<size_t>(b) * static_cast<size_t>(L.m);
    };
    auto cblock_seg = [&](const std::vector<double>& v, int b) {
        return v.data() + static_cast<size_t>(b) * static_cast<size_t>(L.m);
    };

    int iter = 0;
    for (iter = 1; iter <= cfg.max_iter; ++iter) {
        // residuals
        {
            std::vector<double> aty = frame.a_solve.multiply_transpose(y);
            double zdiag = 0.0;
            for (int b = 0; b < L.nb; ++b)
                for (int p = 0; p < L.m; ++p)
                    if (sv.bi[static_cast<size_t>(p)] == sv.bj[static_cast<size_t>(p)])
                        zdiag += z[static_cast<size_t>(b * L.m + p)];
            for (int i = 0; i < L.sigma; ++i)
                rx[static_cast<size_t>(i)] = aty[static_cast<size_t>(i)] -
                                             sv.scale[static_cast<size_t>(i % L.m)] *
                                                 z[static_cast<size_t>(i)];
            rx[static_cast<size_t>(L.sigma)] = zdiag - 1.0;

            ry = frame.a_solve.multiply(x);
            for (size_t i = 0; i < ry.size(); ++i) ry[i] -= frame.b_solve[i];

            for (int b = 0; b < L.nb; ++b)
                for (int p = 0; p < L.m; ++p) {
                    const size_t ip = static_cast<size_t>(b * L.m + p);
                    const bool diag =
                        sv.bi[static_cast<size_t>(p)] == sv.bj[static_cast<size_t>(p)];
                    rz[ip] = -sv.scale[static_cast<size_t>(p)] * x[ip] +
                             (diag ? tvar : 0.0) + s[ip];
                }
        }
        double gap = 0.0;
        for (size_t i = 0; i < s.size(); ++i) gap += s[i] * z[i];
        auto norm2 = [](const std::vector<double>& v) {
            double sum = 0.0;
            for (double u : v) sum += u * u;
            return std::sqrt(sum);
        };
        const double pres = norm2(ry) / (1.0 + bnorm);
        const double dres = norm2(rx) / 2.0;
        const double zres = norm2(rz) / 2.0;

        if (gap <= cfg.tol_gap * (1.0 + std::abs(tvar)) && pres <= cfg.tol_eq &&
            dres <= cfg.tol_eq && zres <= cfg.tol_eq)
            break;
        if (!std::isfinite(gap) || !std::isfinite(tvar))
            return fail("iterate diverged", iter);

        // Nesterov-Todd scaling per block
        for (int b = 0; b < L.nb; ++b) {
            const MatrixXd S = sv.smat(cblock_seg(s, b));
            const MatrixXd Z = sv.smat(cblock_seg(z, b));
            Eigen::LLT<MatrixXd> lls(S), llz(Z);
            if (lls.info() != Eigen::Success || llz.info() != Eigen::Success)
                return fail("cone iterate lost definiteness", iter);
            const MatrixXd Ls = lls.matrixL();
            const MatrixXd Lz = llz.matrixL();
            Eigen::JacobiSVD<MatrixXd> svd(Lz.transpose() * Ls,
                                           Eigen::ComputeFullU | Eigen::ComputeFullV);
            const VectorXd sig = svd.singularValues();
            const VectorXd isq = sig.array().sqrt().inverse().matrix();
            sc.lam[static_cast<size_t>(b)] = sig;
            sc.r[static_cast<size_t>(b)] = Ls * svd.matrixV() * isq.asDiagonal();
            sc.ri[static_cast<size_t>(b)] =
                isq.asDiagonal() * svd.matrixU().transpose() * Lz.transpose();
            sc.t[static_cast<size_t>(b)] = sc.r[static_cast<size_t>(b)] *
                                           sc.r[static_cast<size_t>(b)].transpose();
        }
        // refresh the scaled cone block of the KKT matrix
        {
            size_t idx = 0;
            for (int b = 0; b < L.nb; ++b) {
                sv.symkron(sc.t[static_cast<size_t>(b)], vblock);
                for (int q = 0; q < L.m; ++q)
                    for (int p = 0; p < L.m; ++p)
                        frame.k_mat.values()[static_cast<size_t>(frame.vpos[idx++])] =
                            -vblock(p, q);
            }
        }

        SymFactor sparse_fac;
        DenseLdl dense_fac;
        if (cfg.kkt_mode == KktMode::sparse) {
            LdlOptions opts;
            opts.ordering = frame.ordering;
            opts.static_reg = frame.reg;
            opts.reg_sign = frame.reg_sign;
            opts.refine_steps = 3;
            try {
                sparse_fac = ldl_factor(frame.k_mat, opts);
            } catch (const SingularMatrixError& e) {
                return fail(std::string("KKT factorization failed: ") + e.what(), iter);
            }
        } else {
            dense_fac = DenseLdl::factor(L.ntot, frame.k_mat.to_dense_row_major(),
                                         frame.reg, frame.reg_sign);
        }
        auto kkt_solve = [&](const std::vector<double>& bx,
                             const std::vector<double>& by,
                             const std::vector<double>& bz) {
            std::copy(bx.begin(), bx.end(), rhs.begin());
            std::copy(by.begin(), by.end(), rhs.begin() + L.nw);
            std::copy(bz.begin(), bz.end(), rhs.begin() + L.zoff);
            return cfg.kkt_mode == KktMode::sparse
                       ? sparse_fac.solve(rhs)
                       : dense_refined_solve(dense_fac, frame.k_mat, rhs, 3);
        };

        const double mu = gap / nu;

        // Jordan algebra helpers in the scaled space
        auto jmul = [&](const std::vector<double>& u, const std::vector<double>& v) {
            std::vector<double> o(static_cast<size_t>(L.cone));
            for (int b = 0; b < L.nb; ++b) {
                const MatrixXd U = sv.smat(cblock_seg(u, b));
                const MatrixXd V = sv.smat(cblock_seg(v, b));
                const MatrixXd M = 0.5 * (U * V + V * U);
                sv.svec(M, block_seg(o, b));
            }
            return o;
        };
        auto jdiv_lambda = [&](const std::vector<double>& u) {
            std::vector<double> o(static_cast<size_t>(L.cone));
            for (int b = 0; b < L.nb; ++b) {
                MatrixXd U = sv.smat(cblock_seg(u, b));
                const VectorXd& lam = sc.lam[static_cast<size_t>(b)];
                for (int i = 0; i < L.n; ++i)
                    for (int j = 0; j < L.n; ++j)
                        U(i, j) *= 2.0 / (lam(i) + lam(j));
                sv.svec(U, block_seg(o, b));
            }
            return o;
        };
        auto apply_wt = [&](const std::vector<double>& u) {  // svec(R M R^T)
            std::vector<double> o(static_cast<size_t>(L.cone));
            for (int b = 0; b < L.nb; ++b) {
                const MatrixXd& R = sc.r[static_cast<size_t>(b)];
                const MatrixXd M = R * sv.smat(cblock_seg(u, b)) * R.transpose();
                sv.svec(M, block_seg(o, b));
            }
            return o;
        };
        auto apply_w = [&](const std::vector<double>& u) {  // svec(R^T M R)
            std::vector<double> o(static_cast<size_t>(L.cone));
            for (int b = 0; b < L.nb; ++b) {
                const MatrixXd& R = sc.r[static_cast<size_t>(b)];
                const MatrixXd M = R.transpose() * sv.smat(cblock_seg(u, b)) * R;
                sv.svec(M, block_seg(o, b));
            }
            return o;
        };
        auto apply_wmt = [&](const std::vector<double>& u) {  // svec(R^-1 M R^-T)
            std::vector<double> o(static_cast<size_t>(L.cone));
            for (int b = 0; b < L.nb; ++b) {
                const MatrixXd& Ri = sc.ri[static_cast<size_t>(b)];
                const MatrixXd M = Ri * sv.smat(cblock_seg(u, b)) * Ri.transpose();
                sv.svec(M, block_seg(o, b));
            }
            return o;
        };
        auto max_step = [&](const std::vector<double>& dv, bool s_side) {
            double amax = 1.0;
            const std::vector<double> scaled = s_side ? apply_wmt(dv) : apply_w(dv);
            for (int b = 0; b < L.nb; ++b) {
                MatrixXd M = sv.smat(cblock_seg(scaled, b));
                const VectorXd& lam = sc.lam[static_cast<size_t>(b)];
                for (int i = 0; i < L.n; ++i)
                    for (int j = 0; j < L.n; ++j)
                        M(i, j) /= std::sqrt(lam(i)) * std::sqrt(lam(j));
                Eigen::SelfAdjointEigenSolver<MatrixXd> es(M, Eigen::EigenvaluesOnly);
                const double ev = es.eigenvalues().minCoeff();
                if (ev < 0.0) amax = std::min(amax, -1.0 / ev);
            }
            return amax;
        };

        std::vector<double> lam_v(static_cast<size_t>(L.cone));
        for (int b = 0; b < L.nb; ++b) {
            const MatrixXd lm = sc.lam[static_cast<size_t>(b)].asDiagonal();
            sv.svec(lm, block_seg(lam_v, b));
        }

        std::vector<double> neg_rx(rx.size()), neg_ry(ry.size());
        for (size_t i = 0; i < rx.size(); ++i) neg_rx[i] = -rx[i];
        for (size_t i = 0; i < ry.size(); ++i) neg_ry[i] = -ry[i];

        // affine scaling direction
        std::vector<double> dtarget = jmul(lam_v, lam_v);
        for (auto& v : dtarget) v = -v;
        std::vector<double> rhs3 = apply_wt(jdiv_lambda(dtarget));
        for (size_t i = 0; i < rhs3.size(); ++i) rhs3[i] = -rz[i] - rhs3[i];
        std::vector<double> sol = kkt_solve(neg_rx, neg_ry, rhs3);
        std::vector<double> dw_a(sol.begin(), sol.begin() + L.nw);
        std::vector<double> dz_a(sol.begin() + L.zoff, sol.end());
        std::vector<double> ds_a(static_cast<size_t>(L.cone));
        for (int b = 0; b < L.nb; ++b)
            for (int p = 0; p < L.m; ++p) {
                const size_t ip = static_cast<size_t>(b * L.m + p);
                const bool diag = sv.bi[static_cast<size_t>(p)] == sv.bj[static_cast<size_t>(p)];
                ds_a[ip] = -rz[ip] + sv.scale[static_cast<size_t>(p)] * dw_a[ip] -
                           (diag ? dw_a[static_cast<size_t>(L.sigma)] : 0.0);
            }

        const double a_aff = std::min(max_step(ds_a, true), max_step(dz_a, false));
        double gap_aff = 0.0;
        for (size_t i = 0; i < s.size(); ++i)
            gap_aff += (s[i] + a_aff * ds_a[i]) * (z[i] + a_aff * dz_a[i]);
        const double sigma_c =
            std::pow(std::clamp(gap_aff / gap, 0.0, 1.0), 3.0);

        // combined direction with second-order correction
        dtarget = jmul(lam_v, lam_v);
        {
            const std::vector<double> cross = jmul(apply_wmt(ds_a), apply_w(dz_a));
            for (int b = 0; b < L.nb; ++b)
                for (int p = 0; p < L.m; ++p) {
                    const size_t ip = static_cast<size_t>(b * L.m + p);
                    const bool diag =
                        sv.bi[static_cast<size_t>(p)] == sv.bj[static_cast<size_t>(p)];
                    dtarget[ip] = -dtarget[ip] - cross[ip] +
                                  (diag ? sigma_c * mu : 0.0);
                }
        }
        rhs3 = apply_wt(jdiv_lambda(dtarget));
        for (size_t i = 0; i < rhs3.size(); ++i) rhs3[i] = -rz[i] - rhs3[i];
        sol = kkt_solve(neg_rx, neg_ry, rhs3);
        std::vector<double> dw(sol.begin(), sol.begin() + L.nw);
        std::vector<double> dy(sol.begin() + L.nw, sol.begin() + L.zoff);
        std::vector<double> dz(sol.begin() + L.zoff, sol.end());
        std::vector<double> ds(static_cast<size_t>(L.cone));
        for (int b = 0; b < L.nb; ++b)
            for (int p = 0; p < L.m; ++p) {
                const size_t ip = static_cast<size_t>(b * L.m + p);
                const bool diag = sv.bi[static_cast<size_t>(p)] == sv.bj[static_cast<size_t>(p)];
                ds[ip] = -rz[ip] + sv.scale[static_cast<size_t>(p)] * dw[ip] -
                         (diag ? dw[static_cast<size_t>(L.sigma)] : 0.0);
            }

        const double alpha =
            std::min(1.0, 0.99 * std::min(max_step(ds, true), max_step(dz, false)));
        if (alpha < 1e-10)
            return fail("step length collapsed", iter);

        for (int i = 0; i < L.sigma; ++i) x[static_cast<size_t>(i)] += alpha * dw[static_cast<size_t>(i)];
        tvar += alpha * dw[static_cast<size_t>(L.sigma)];
        for (int i = 0; i < L.rho; ++i) y[static_cast<size_t>(i)] += alpha * dy[static_cast<size_t>(i)];
        for (int i = 0; i < L.cone; ++i) {
            s[static_cast<size_t>(i)] += alpha * ds[static_cast<size_t>(i)];
            z[static_cast<size_t>(i)] += alpha * dz[static_cast<size_t>(i)];
        }
    }

    if (iter > cfg.max_iter)
        return fail("iteration limit reached without convergence", cfg.max_iter);

    out.iterations = iter;
    out.margin = tvar;
    if (tvar > cfg.tol_margin)
        out.status = SolveStatus::feasible;
    else if (tvar < -cfg.tol_margin)
        out.status = SolveStatus::infeasible;
    else {
        out.status = SolveStatus::indeterminate;
        out.diagnostic = "margin inside the decision band";
    }
    out.blocks.reserve(static_cast<size_t>(L.nb));
    for (int b = 1; b <= L.nb; ++b)
        out.blocks.push_back(unpack_block(x, b, inst.vars));
    {
        std::vector<double> r = inst.a_mat.multiply(x);
        double e = 0.0;
        for (size_t i = 0; i < r.size(); ++i)
            e = std::max(e, std::abs(r[i] - inst.b_vec[i]));
        out.eq_residual = e;
    }
    out.wall_time = elapsed();
    return out;
}

}  // namespace

SolveOutcome solve(const SdpInstance& inst, const SolverConfig& cfg) {
    return solve_margin(inst, cfg);
}

SolveOutcome solve_dense_reference(const SdpInstance& inst, SolverConfig cfg) {
    cfg.kkt_mode = KktMode::dense;
    return solve_margin(inst, cfg);
}

SearchResult search_max_feasible_n(int k, int n_lo, int n_hi,
                                   const SolverConfig& cfg, bool speculative) {
    if (n_lo < 2 || n_lo > n_hi)
        throw std::invalid_argument("search_max_feasible_n: bad range");
    SearchResult res;
    auto probe = [&](int n) {
        const SolveOutcome o = solve(build_instance(k, n), cfg);
        return SearchProbe{n, o.status, o.margin};
    };
    auto record = [&](const SearchProbe& p) {
        res.probes.push_back(p);
        if (p.status == SolveStatus::indeterminate) {
            res.aborted = true;
            res.diagnostic = "indeterminate probe at N = " + std::to_string(p.n);
        }
        return p.status;
    };

    if (record(probe(n_lo)) != SolveStatus::feasible || res.aborted) {
        return res;  // no feasible N in range, or aborted
    }
    int lo = n_lo, hi = n_hi;
    while (lo < hi) {
        const int mid = lo + (hi - lo + 1) / 2;
        SearchProbe pm;
        if (speculative && mid < hi) {
            // run the probe that follows a feasible verdict concurrently
            const int spec = mid + (hi - mid + 1) / 2;
            auto fut = std::async(std::launch::async, probe, spec);
            pm = probe(mid);
            const SearchProbe ps = fut.get();
            if (record(pm) == SolveStatus::feasible && !res.aborted) {
                lo = mid;
                if (record(ps) == SolveStatus::feasible)
                    lo = spec;
                else if (!res.aborted)
                    hi = spec - 1;
            } else {
                hi = mid - 1;
            }
            if (res.aborted) return res;
            continue;
        }
        pm = probe(mid);
        const SolveStatus st = record(pm);
        if (res.aborted) return res;
        if (st == SolveStatus::feasible)
            lo = mid;
        else
            hi = mid - 1;
    }
    res.max_feasible = lo;
    return res;
}

double rate(int k, int n) {
    if (n < 2) throw std::invalid_argument("rate: N must be >= 2");
    if (k < 1) throw std::invalid_argument("rate: k must be positive");
    return static_cast<double>(k) / std::log2(static_cast<double>(n));
}

std::string solution_to_json(int k, int n, const SolveOutcome& out,
                             const SolverConfig& cfg) {
    nlohmann::json j;
    j["k"] = k;
    j["N"] = n;
    j["status"] = to_string(out.status);
    j["margin"] = out.margin;
    j["iterations"] = out.iterations;
    j["eq_residual"] = out.eq_residual;
    j["wall_time"] = out.wall_time;
    if (!out.diagnostic.empty()) j["diagnostic"] = out.diagnostic;
    j["config"] = {{"tol_gap", cfg.tol_gap},
                   {"tol_eq", cfg.tol_eq},
                   {"tol_margin", cfg.tol_margin},
                   {"max_iter", cfg.max_iter},
                   {"kkt", cfg.kkt_mode == KktMode::sparse ? "sparse" : "dense"},
                   {"budget_cells", cfg.budget_cells}};
    j["blocks"] = nlohmann::json::array();
    for (const SymMatrix& q : out.blocks)
        j["blocks"].push_back(q.row_major());
    return j.dump(2);
}

Solution solution_from_json(std::istream& is) {
    nlohmann::json j;
    is >> j;
    Solution sol;
    sol.k = j.at("k").get<int>();
    sol.n = j.at("N").get<int>();
    const std::string st = j.value("status", "Indeterminate");
    sol.status = st == "Feasible"    ? SolveStatus::feasible
                 : st == "Infeasible" ? SolveStatus::infeasible
                                      : SolveStatus::indeterminate;
    sol.margin = j.value("margin", 0.0);
    sol.iterations = j.value("iterations", 0);
    for (const auto& blk : j.at("blocks")) {
        std::vector<double> data = blk.get<std::vector<double>>();
        sol.blocks.push_back(SymMatrix::from_row_major(sol.n, std::move(data)));
    }
    return sol;
}

}  // namespace ossdp
