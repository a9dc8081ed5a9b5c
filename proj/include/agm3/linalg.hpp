#ifndef AGM3_LINALG_HPP
#define AGM3_LINALG_HPP

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "agm3/tolerance.hpp"

namespace agm3 {

using Cx = std::complex<double>;
using MatC = Eigen::MatrixXcd;
using VecC = Eigen::VectorXcd;

/// Certificate attached to every rank decision. `gap_ratio` is
/// sigma_{r+1}/sigma_r for the claimed rank r (0 when the matrix is full
/// rank and there is nothing below the gap). A certificate is accepted only
/// when gap_ratio < eps_rank, which is exactly the recorded invariant.
struct RankCertificate {
    std::string label;
    std::vector<double> singular_values;  // descending
    int claimed_rank = 0;
    double gap_ratio = 0.0;
};

struct NullspaceResult {
    MatC basis;  // columns: orthonormal null vectors (may have 0 columns)
    RankCertificate cert;
};

/// Rank-revealing nullspace. Rank rule: r = #{sigma_j > eps_rank * sigma_1};
/// the decision must then be certified by sigma_{r+1}/sigma_r < eps_rank,
/// otherwise the spectrum is ambiguous and we re-run the SVD in extended
/// precision; if still ambiguous, Error(AmbiguousRank).
/// When `expected_nullity` is given, a clean spectrum with the wrong nullity
/// is also reported as AmbiguousRank (the upstream configuration is bad).
NullspaceResult nullspace(const MatC& M, const ToleranceProfile& profile, std::string label,
                          std::optional<int> expected_nullity = std::nullopt);

/// Square complex Newton iteration for small systems, with backtracking.
/// `fun(x, r, J)` fills residual r (n) and Jacobian J (n x n).
/// Returns true on convergence; x is updated in place.
template <typename F>
bool newton_solve(VecC& x, F&& fun, int max_iters, double tol = 1e-14) {
    const int n = static_cast<int>(x.size());
    VecC r(n), r_new(n);
    MatC J(n, n), J_new(n, n);
    fun(x, r, J);
    double rn = r.norm();
    for (int it = 0; it < max_iters; ++it) {
        Eigen::PartialPivLU<MatC> lu(J);
        VecC dx = lu.solve(r);
        if (!dx.allFinite()) return false;
        double lambda = 1.0, step = 0.0;
        bool improved = false;
        VecC x_new;
        for (int h = 0; h < 10; ++h) {
            x_new = x - lambda * dx;
            fun(x_new, r_new, J_new);
            if (r_new.norm() < rn || rn == 0.0) {
                improved = true;
                step = (lambda * dx).norm();
                break;
            }
            lambda *= 0.5;
        }
        if (!improved) return rn <= 1e-10 * (1.0 + x.norm());
        x = x_new;
        r = r_new;
        J = J_new;
        rn = r.norm();
        if (step <= tol * (1.0 + x.norm())) return true;
    }
    return rn <= 1e-10 * (1.0 + x.norm());
}

/// Damped Gauss-Newton for small overdetermined systems (m >= n).
/// `fun(x, r, J)` fills residual r (m) and Jacobian J (m x n).
template <typename F>
bool gauss_newton_solve(VecC& x, F&& fun, int m, int max_iters, double tol = 1e-14) {
    const int n = static_cast<int>(x.size());
    VecC r(m);
    MatC J(m, n);
    fun(x, r, J);
    double best = r.norm();
    for (int it = 0; it < max_iters; ++it) {
        Eigen::JacobiSVD<MatC> svd(J, Eigen::ComputeThinU | Eigen::ComputeThinV);
        VecC dx = svd.solve(r);
        if (!dx.allFinite()) return false;
        double lambda = 1.0;
        VecC x_new;
        double rn = best;
        for (int h = 0; h < 12; ++h) {
            x_new = x - lambda * dx;
            VecC r2(m);
            MatC J2(m, n);
            fun(x_new, r2, J2);
            rn = r2.norm();
            if (rn <= best) {
                r = r2;
                J = J2;
                break;
            }
            lambda *= 0.5;
        }
        if (rn > best) return best <= tol;
        double step = (lambda * dx).norm();
        x = x_new;
        best = rn;
        if (step <= tol * (1.0 + x.norm())) return true;
    }
    return best <= 1e-10;
}

}  // namespace agm3

#endif
