#include "agm3/resultant.hpp"

#include <Eigen/LU>

namespace agm3 {

namespace {

BinaryForm rotate_binary(const BinaryForm& f, const Eigen::Matrix2cd& U) {
    // substitute [s; t] = U [s'; t']
    const int d = f.degree;
    BinaryForm g(d);
    // powers of (U00 s' + U01 t') and (U10 s' + U11 t')
    std::vector<std::vector<Cx>> rowpow(d + 1), colpow(d + 1);
    rowpow[0] = {Cx(1)};
    colpow[0] = {Cx(1)};
    for (int e = 1; e <= d; ++e) {
        auto grow = [&](const std::vector<Cx>& prev, Cx a, Cx b) {
            std::vector<Cx> cur(prev.size() + 1, Cx(0));
            for (size_t k = 0; k < prev.size(); ++k) {
                cur[k] += prev[k] * a;
                cur[k + 1] += prev[k] * b;
            }
            return cur;
        };
        rowpow[e] = grow(rowpow[e - 1], U(0, 0), U(0, 1));
        colpow[e] = grow(colpow[e - 1], U(1, 0), U(1, 1));
    }
    for (int k = 0; k <= d; ++k) {
        if (f.c[k] == Cx(0)) continue;
        const auto& a = rowpow[d - k];  // s^{d-k}
        const auto& b = colpow[k];      // t^k
        for (size_t i = 0; i < a.size(); ++i)
            for (size_t j = 0; j < b.size(); ++j) g.c[i + j] += f.c[k] * a[i] * b[j];
    }
    return g;
}

}  // namespace

double projroot_distance(const ProjRoot& a, const ProjRoot& b) {
    VecC u(2), w(2);
    u << a.s, a.t;
    w << b.s, b.t;
    return projective_distance(u, w);
}

std::vector<ProjRoot> binary_roots(const BinaryForm& f, const ToleranceProfile& profile,
                                   Rng& rng) {
    if (f.degree < 1 || f.max_abs() == 0.0)
        fail(ErrorCode::ZeroForm, "binary_roots", "degenerate binary form");

    // leading coefficient of p(tau) = g(1, tau) is g.c[degree]; a unitary
    // substitution makes it the value of f at a random direction. For
    // wide-dynamic-range forms that value is routinely many orders below the
    // largest coefficient, so pick the best of several draws rather than
    // demanding a fixed ratio.
    Eigen::Matrix2cd U;
    BinaryForm g;
    double best = -1.0;
    for (int attempt = 0; attempt < 8; ++attempt) {
        Eigen::Matrix2cd U2 = random_unitary2(rng);
        BinaryForm g2 = rotate_binary(f, U2);
        double q = std::abs(g2.c[f.degree]) / g2.max_abs();
        if (q > best) {
            best = q;
            U = U2;
            g = std::move(g2);
        }
    }
    if (!(best > 1e-30))
        fail(ErrorCode::NonConvergence, "binary_roots", "could not move roots off infinity");

    // p(tau) = g(1, tau): coefficient of tau^k is g.c[k]
    UniPoly<double> p;
    p.c = g.c;
    // high-degree elimination polynomials carry smeared junk clusters; their
    // validation is geometric and happens at the caller
    auto roots = f.degree <= 24 ? roots_univariate(p, profile)
                                : roots_univariate_lenient(p, profile);

    std::vector<ProjRoot> out;
    out.reserve(roots.size());
    for (const auto& r : roots) {
        Eigen::Vector2cd v = U * Eigen::Vector2cd(Cx(1), r.value);
        VecC vv(2);
        vv << v(0), v(1);
        vv = canonicalize_vector(std::move(vv));
        out.push_back({vv(0), vv(1), r.multiplicity});
    }
    return out;
}

BinaryForm resultant_form(const HomogeneousForm& F, const HomogeneousForm& G, int var,
                          bool& identically_zero) {
    identically_zero = false;
    auto fc = F.coefficients_in(var);
    auto gc = G.coefficients_in(var);
    auto xdeg = [](const std::vector<BinaryForm>& c) {
        int d = -1;
        for (int k = 0; k < static_cast<int>(c.size()); ++k)
            if (c[k].max_abs() > 0) d = k;
        return d;
    };
    int m = xdeg(fc), n = xdeg(gc);
    if (m < 0 || n < 0) fail(ErrorCode::ZeroForm, "resultant", "zero input form");
    if (m == 0 || n == 0)
        fail(ErrorCode::ChartDegenerate, "resultant",
             "input independent of the eliminated variable");

    // single per-form scaling keeps determinant samples interpolable
    double fscale = F.max_abs(), gscale = G.max_abs();

    const int size = m + n;
    // the Sylvester determinant with x-degrees (m, n) is homogeneous of this
    // degree in the remaining variables (= deg f * deg g at full x-degree)
    const int D = n * F.degree + m * G.degree - m * n;
    const int N = D + 9;  // sample margin

    // determinants accumulate in log space: a 24x24 determinant with O(1e-2)
    // entries sits far below the double underflow line
    std::vector<double> logmag(N);
    std::vector<Cx> phase(N);
    double max_log = -1e300;
    int singular_votes = 0;
    for (int j = 0; j < N; ++j) {
        double th = 6.283185307179586476925286766559 * j / N;
        Cx u(std::cos(th), std::sin(th));
        std::vector<Cx> fv(m + 1), gv(n + 1);
        for (int k = 0; k <= m; ++k) fv[k] = fc[k].eval(u, Cx(1)) / fscale;
        for (int k = 0; k <= n; ++k) gv[k] = gc[k].eval(u, Cx(1)) / gscale;
        MatC S = MatC::Zero(size, size);
        for (int r = 0; r < n; ++r)
            for (int k = 0; k <= m; ++k) S(r, r + (m - k)) = fv[k];
        for (int r = 0; r < m; ++r)
            for (int k = 0; k <= n; ++k) S(n + r, r + (n - k)) = gv[k];
        Eigen::PartialPivLU<MatC> lu(S);
        double lm = 0;
        Cx ph = Cx(static_cast<double>(lu.permutationP().determinant()), 0.0);
        double piv_max = 0, piv_min = 1e300;
        bool exact_zero = false;
        for (int r = 0; r < size; ++r) {
            Cx piv = lu.matrixLU()(r, r);
            double a = std::abs(piv);
            piv_max = std::max(piv_max, a);
            piv_min = std::min(piv_min, a);
            if (a == 0.0) {
                exact_zero = true;
                break;
            }
            lm += std::log(a);
            ph *= piv / a;
        }
        // a shared component makes the Sylvester matrix singular at EVERY
        // sample; isolated near-singularity just means a root of R nearby
        if (exact_zero || piv_min <= 1e-13 * size * piv_max) ++singular_votes;
        if (exact_zero) {
            logmag[j] = -1e300;
            phase[j] = Cx(0);
        } else {
            logmag[j] = lm;
            phase[j] = ph;
            max_log = std::max(max_log, lm);
        }
    }

    if (singular_votes >= (9 * N) / 10) {
        identically_zero = true;
        return BinaryForm(0);
    }

    // renormalized samples, then inverse DFT; R(u) = sum_k r_k u^k, deg <= D
    std::vector<Cx> dets(N);
    for (int j = 0; j < N; ++j)
        dets[j] = (logmag[j] < -1e299) ? Cx(0) : phase[j] * std::exp(logmag[j] - max_log);
    std::vector<Cx> rk(N, Cx(0));
    // restore the true scale when it fits in range; only the projective
    // class of R matters to every caller otherwise
    double log_unscale = max_log + n * std::log(fscale) + m * std::log(gscale);
    double unscale = (std::abs(log_unscale) < 600.0) ? std::exp(log_unscale) : 1.0;
    for (int k = 0; k < N; ++k) {
        Cx acc(0);
        for (int j = 0; j < N; ++j) {
            double th = -6.283185307179586476925286766559 * j * k / N;
            acc += dets[j] * Cx(std::cos(th), std::sin(th));
        }
        rk[k] = acc * (unscale / static_cast<double>(N));
    }
    // r_k multiplies x_a^k; homogenize at the full determinant degree so
    // roots at (1:0) survive
    BinaryForm R(D);
    for (int k = 0; k <= D; ++k) R.c[D - k] = rk[k];
    return R;
}

ResultantOutput resultant_eliminate(const HomogeneousForm& F, const HomogeneousForm& G, int var,
                                    const ToleranceProfile& profile) {
    (void)profile;
    bool zero = false;
    BinaryForm R = resultant_form(F, G, var, zero);
    if (zero)
        fail(ErrorCode::CommonComponent, "resultant_eliminate",
             "resultant vanishes identically (shared component)");
    ResultantOutput out;
    out.var_kept = (var == 0) ? 1 : 0;
    out.var_chart = (var == 2) ? 1 : 2;
    out.degree_bound = F.degree * G.degree;
    // c[i] of R multiplies x_a^{D-i} x_b^i; at x_b = 1 the univariate
    // coefficient of x_a^{D-i} is R.c[i]
    out.poly.c.assign(R.degree + 1, Cx(0));
    for (int i = 0; i <= R.degree; ++i) out.poly.c[R.degree - i] = R.c[i];
    out.poly.trim();
    return out;
}

}  // namespace agm3
