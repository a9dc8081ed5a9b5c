#ifndef AGM3_ABERTH_HPP
#define AGM3_ABERTH_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <vector>

#include "agm3/tolerance.hpp"
#include "agm3/unipoly.hpp"

namespace agm3 {

/// A root with its clustered multiplicity.
struct RootMult {
    std::complex<double> value;
    int multiplicity = 1;
};

namespace detail {

/// Bini's initial guesses: radii from the upper convex hull of
/// (k, log|c_k|), angles spread with an irrational offset per ring.
template <typename T>
std::vector<std::complex<T>> aberth_initial(const UniPoly<T>& p) {
    const int n = p.degree();
    std::vector<T> logc(n + 1, -std::numeric_limits<T>::infinity());
    for (int k = 0; k <= n; ++k)
        if (std::abs(p.c[k]) > T(0)) logc[k] = std::log(std::abs(p.c[k]));

    // upper convex hull of (k, logc[k])
    std::vector<int> hull;
    for (int k = 0; k <= n; ++k) {
        if (logc[k] == -std::numeric_limits<T>::infinity()) continue;
        while (hull.size() >= 2) {
            int a = hull[hull.size() - 2], b = hull[hull.size() - 1];
            // keep turn convex from above
            T lhs = (logc[b] - logc[a]) * T(k - a);
            T rhs = (logc[k] - logc[a]) * T(b - a);
            if (lhs <= rhs)
                hull.pop_back();
            else
                break;
        }
        hull.push_back(k);
    }

    std::vector<std::complex<T>> z;
    z.reserve(n);
    const T two_pi = T(6.283185307179586476925286766559L);
    int ring = 0;
    for (size_t h = 0; h + 1 < hull.size(); ++h) {
        int k1 = hull[h], k2 = hull[h + 1];
        T r = std::exp((logc[k1] - logc[k2]) / T(k2 - k1));
        int cnt = k2 - k1;
        for (int j = 0; j < cnt; ++j) {
            T th = two_pi * (T(j) / T(cnt) + T(0.26) * T(ring + 1)) + T(0.5);
            z.push_back(std::complex<T>(r * std::cos(th), r * std::sin(th)));
        }
        ++ring;
    }
    while (static_cast<int>(z.size()) < n) z.push_back(std::complex<T>(T(1), T(0.3)));
    return z;
}

}  // namespace detail

/// Aberth–Ehrlich simultaneous iteration. Input must have a nonzero leading
/// coefficient (trim first). Returns approximations to all n roots;
/// `converged` reports whether every root met the stopping test.
template <typename T>
struct AberthOutcome {
    std::vector<std::complex<T>> roots;
    bool converged = false;
    int iterations = 0;
};

template <typename T>
AberthOutcome<T> aberth_solve(const UniPoly<T>& poly, int max_iters) {
    using C = std::complex<T>;
    AberthOutcome<T> out;
    const int n = poly.degree();
    if (n < 1) {
        out.converged = true;
        return out;
    }
    if (n == 1) {
        out.roots = {-poly.c[0] / poly.c[1]};
        out.converged = true;
        return out;
    }

    UniPoly<T> p = poly;
    T scale = p.max_abs();
    if (scale > 0)
        for (auto& z : p.c) z /= scale;

    std::vector<C> z = detail::aberth_initial(p);
    std::vector<char> frozen(n, 0);
    const T eps = std::numeric_limits<T>::epsilon();

    for (int iter = 0; iter < max_iters; ++iter) {
        out.iterations = iter + 1;
        bool all_done = true;
        for (int k = 0; k < n; ++k) {
            if (frozen[k]) continue;
            C pv, dv;
            p.eval_with_derivative(z[k], pv, dv);
            if (!std::isfinite(std::abs(pv))) {
                // overflow at a runaway iterate: pull it back toward the pack
                z[k] *= T(0.5);
                all_done = false;
                continue;
            }
            // residual-based freeze: |p| below the roundoff floor of Horner
            T floor_k = p.eval_scale(z[k]) * eps * T(8 * n);
            if (std::abs(pv) <= floor_k) {
                frozen[k] = 1;
                continue;
            }
            C newton = (dv != C(0)) ? pv / dv : C(T(0.5), T(0.5));
            C sum(0);
            for (int j = 0; j < n; ++j) {
                if (j == k) continue;
                C d = z[k] - z[j];
                if (std::abs(d) < T(1e-100)) d = C(T(1e-100), 0);
                sum += C(1) / d;
            }
            C denom = C(1) - newton * sum;
            C w = (std::abs(denom) > T(1e-100)) ? newton / denom : newton;
            z[k] -= w;
            T tol_step = eps * T(64) * (T(1) + std::abs(z[k]));
            if (std::abs(w) > tol_step) all_done = false;
        }
        if (all_done) {
            out.converged = true;
            break;
        }
    }
    if (!out.converged) {
        // accept anyway if every residual reached its floor-ish level
        bool ok = true;
        for (int k = 0; k < n; ++k) {
            T floor_k = p.eval_scale(z[k]) * eps * T(64 * n);
            if (std::abs(p.eval(z[k])) > floor_k) {
                ok = false;
                break;
            }
        }
        out.converged = ok;
    }
    out.roots = std::move(z);
    return out;
}

namespace detail {

/// Single-linkage clustering of roots; radius grows with |z|.
inline std::vector<std::vector<int>> cluster_roots(const std::vector<std::complex<double>>& z,
                                                   double radius) {
    const int n = static_cast<int>(z.size());
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int a) {
        while (parent[a] != a) a = parent[a] = parent[parent[a]];
        return a;
    };
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            double r = radius * (1.0 + std::max(std::abs(z[i]), std::abs(z[j])));
            if (std::abs(z[i] - z[j]) <= r) parent[find(i)] = find(j);
        }
    std::vector<std::vector<int>> groups(n);
    for (int i = 0; i < n; ++i) groups[find(i)].push_back(i);
    std::vector<std::vector<int>> res;
    for (auto& g : groups)
        if (!g.empty()) res.push_back(std::move(g));
    return res;
}

/// Newton-polish the center of a multiplicity-m cluster on p^{(m-1)}.
inline std::complex<double> polish_multiple(const UniPoly<double>& p, std::complex<double> z0,
                                            int mult, int iters) {
    UniPoly<double> d = p;
    for (int k = 1; k < mult; ++k) d = d.derivative();
    std::complex<double> z = z0;
    for (int it = 0; it < iters; ++it) {
        std::complex<double> pv, dv;
        d.eval_with_derivative(z, pv, dv);
        if (std::abs(dv) < 1e-300) break;
        std::complex<double> step = pv / dv;
        z -= step;
        if (std::abs(step) <= 1e-15 * (1.0 + std::abs(z))) break;
    }
    // keep the polished value only if it stayed inside the cluster
    if (std::abs(z - z0) > 10.0 * (1e-6 + 1e-6 * std::abs(z0))) return z0;
    return z;
}

}  // namespace detail

/// roots_univariate: all complex roots with multiplicities obtained by
/// cluster merging. Escalates to extended precision on non-convergence and
/// verifies the answer by re-expanding the product of root factors.
/// Throws Error(NonConvergence) when even extended precision fails.
std::vector<RootMult> roots_univariate(const UniPoly<double>& p, const ToleranceProfile& profile);

/// Same, but without the reconstruction gate: for high-degree elimination
/// polynomials whose junk root clusters are validated geometrically by the
/// caller rather than algebraically here.
std::vector<RootMult> roots_univariate_lenient(const UniPoly<double>& p,
                                               const ToleranceProfile& profile);

/// Reconstruction residual: || lc * prod (x - r)^m  -  p || / max|p|.
double reconstruction_residual(const UniPoly<double>& p, const std::vector<RootMult>& roots);

}  // namespace agm3

#endif
