#include "agm3/aberth.hpp"

#include <algorithm>

namespace agm3 {

namespace {

std::vector<RootMult> cluster_and_polish(const UniPoly<double>& p,
                                         const std::vector<std::complex<double>>& raw,
                                         const ToleranceProfile& profile) {
    auto groups = detail::cluster_roots(raw, profile.cluster_radius());
    std::vector<RootMult> out;
    out.reserve(groups.size());
    for (const auto& g : groups) {
        std::complex<double> mean(0);
        for (int idx : g) mean += raw[idx];
        mean /= static_cast<double>(g.size());
        RootMult rm;
        rm.multiplicity = static_cast<int>(g.size());
        rm.value = rm.multiplicity > 1
                       ? detail::polish_multiple(p, mean, rm.multiplicity, profile.max_newton_iters)
                       : mean;
        out.push_back(rm);
    }
    std::sort(out.begin(), out.end(), [](const RootMult& a, const RootMult& b) {
        if (a.value.real() != b.value.real()) return a.value.real() < b.value.real();
        return a.value.imag() < b.value.imag();
    });
    return out;
}

}  // namespace

double reconstruction_residual(const UniPoly<double>& p, const std::vector<RootMult>& roots) {
    std::vector<std::pair<std::complex<double>, int>> rs;
    rs.reserve(roots.size());
    for (const auto& r : roots) rs.push_back({r.value, r.multiplicity});
    UniPoly<double> q = poly_from_roots(rs);
    q *= p.c.back();
    double scale = p.max_abs();
    if (scale == 0) return 0;
    double err = 0;
    for (size_t k = 0; k < p.c.size(); ++k) {
        std::complex<double> qk = (k < q.c.size()) ? q.c[k] : std::complex<double>(0);
        err = std::max(err, std::abs(qk - p.c[k]));
    }
    return err / scale;
}

namespace {

std::vector<RootMult> roots_impl(const UniPoly<double>& p, const ToleranceProfile& profile,
                                 bool strict) {
    UniPoly<double> q = p;
    q.trim();
    if (q.degree() < 1)
        fail(ErrorCode::NonConvergence, "roots_univariate",
             q.is_zero() ? "zero polynomial" : "degree < 1 after trimming");

    // pull out exact-ish roots at the origin first
    int zero_mult = 0;
    {
        double cut = 1e-14 * q.max_abs();
        while (q.degree() >= 1 && std::abs(q.c.front()) <= cut) {
            q.c.erase(q.c.begin());
            ++zero_mult;
        }
    }

    auto attempt = [&](bool extended) -> std::pair<std::vector<RootMult>, double> {
        std::vector<std::complex<double>> raw;
        if (!extended) {
            auto res = aberth_solve(q, std::max(profile.max_newton_iters, 4 * q.degree()));
            if (!res.converged) return {{}, 1.0};
            raw = std::move(res.roots);
        } else {
            auto res = aberth_solve(convert_poly<long double>(q),
                                    std::max(2 * profile.max_newton_iters, 8 * q.degree()));
            if (!res.converged) return {{}, 1.0};
            raw.reserve(res.roots.size());
            for (const auto& z : res.roots)
                raw.emplace_back(static_cast<double>(z.real()), static_cast<double>(z.imag()));
        }
        auto clustered = cluster_and_polish(q, raw, profile);
        double resid = strict ? reconstruction_residual(q, clustered) : 0.0;
        return {clustered, resid};
    };

    std::vector<RootMult> roots;
    bool start_extended = profile.precision == Precision::Extended;
    auto [r1, res1] = attempt(start_extended);
    if (!r1.empty() && res1 <= profile.eps_residual) {
        roots = std::move(r1);
    } else {
        auto [r2, res2] = attempt(true);
        if (!r2.empty() && res2 <= profile.eps_residual)
            roots = std::move(r2);
        else
            fail(ErrorCode::NonConvergence, "roots_univariate",
                 "root iteration failed to converge/reconstruct after escalation");
    }

    if (zero_mult > 0) {
        bool merged = false;
        for (auto& r : roots)
            if (std::abs(r.value) <= profile.cluster_radius()) {
                r.multiplicity += zero_mult;
                r.value = 0.0;
                merged = true;
                break;
            }
        if (!merged) roots.push_back({std::complex<double>(0), zero_mult});
    }
    return roots;
}

}  // namespace

std::vector<RootMult> roots_univariate(const UniPoly<double>& p, const ToleranceProfile& profile) {
    return roots_impl(p, profile, true);
}

std::vector<RootMult> roots_univariate_lenient(const UniPoly<double>& p,
                                               const ToleranceProfile& profile) {
    return roots_impl(p, profile, false);
}

}  // namespace agm3
