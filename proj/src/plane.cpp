#include "agm3/plane.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>

namespace agm3 {

namespace {

/// two independent spanning points of the line {x : n . x = 0}
void line_span(const Eigen::Vector3cd& n, Eigen::Vector3cd& A, Eigen::Vector3cd& B) {
    Eigen::Vector3cd cand[4] = {cross3(n, Eigen::Vector3cd(1, 0, 0)),
                                cross3(n, Eigen::Vector3cd(0, 1, 0)),
                                cross3(n, Eigen::Vector3cd(0, 0, 1)), n};
    int best = 0;
    for (int k = 1; k < 3; ++k)
        if (cand[k].norm() > cand[best].norm()) best = k;
    A = cand[best].normalized();
    // candidate 3 (n itself) only spans the line when n is isotropic,
    // exactly the case where the cross candidates collapse onto A
    for (int k = 0; k < 4; ++k) {
        if (k == best) continue;
        if (k == 3 && std::abs(n.dot(n)) > 1e-12 * n.squaredNorm()) continue;
        Eigen::Vector3cd b = cand[k] - A * (A.adjoint() * cand[k])(0);
        if (b.norm() > 1e-8 * (cand[k].norm() + 1e-300)) {
            B = b.normalized();
            return;
        }
    }
    fail(ErrorCode::DegenerateLine, "line_span", "could not span the line");
}

Cx eval3(const HomogeneousForm& F, const Eigen::Vector3cd& x) { return F.eval(x); }

double residual_scale(const HomogeneousForm& F, const Eigen::Vector3cd& x) {
    VecC v(3);
    v << x(0), x(1), x(2);
    double s = F.eval_scale(v);
    return s > 1e-300 ? s : 1.0;
}

/// Newton polish of a transversal intersection point; x kept near unit norm
/// by a fixed affine gauge.
bool polish_simple(const HomogeneousForm& F, const HomogeneousForm& G, Eigen::Vector3cd& x,
                   int iters) {
    Eigen::Vector3cd gauge = x.normalized();
    VecC z(3);
    z << x(0), x(1), x(2);
    auto fun = [&](const VecC& v, VecC& r, MatC& J) {
        Eigen::Vector3cd p(v(0), v(1), v(2));
        r.resize(3);
        J.resize(3, 3);
        r(0) = eval3(F, p);
        r(1) = eval3(G, p);
        r(2) = (gauge.adjoint() * p)(0) - Cx(1);
        Eigen::Vector3cd gF = F.gradient_at(p), gG = G.gradient_at(p);
        for (int j = 0; j < 3; ++j) {
            J(0, j) = gF(j);
            J(1, j) = gG(j);
            J(2, j) = std::conj(gauge(j));
        }
    };
    z /= (gauge.adjoint() * Eigen::Vector3cd(z(0), z(1), z(2)))(0);
    bool ok = newton_solve(z, fun, iters);
    x = Eigen::Vector3cd(z(0), z(1), z(2));
    return ok;
}

/// Gauss-Newton polish of a tangential intersection point: add the two
/// strongest components of grad F x grad G, which vanish exactly where the
/// curves are tangent.
bool polish_tangential(const HomogeneousForm& F, const HomogeneousForm& G, Eigen::Vector3cd& x,
                       int iters) {
    Eigen::Vector3cd gauge = x.normalized();
    std::vector<HomogeneousForm> gradF = F.gradient(), gradG = G.gradient();
    std::vector<std::vector<HomogeneousForm>> hessF(3), hessG(3);
    for (int i = 0; i < 3; ++i) {
        hessF[i].reserve(3);
        hessG[i].reserve(3);
        for (int j = 0; j < 3; ++j) {
            hessF[i].push_back(gradF[i].partial(j));
            hessG[i].push_back(gradG[i].partial(j));
        }
    }
    // pick cross components once, at the initial point
    Eigen::Vector3cd g0 = F.gradient_at(x);
    int cmax = 0;
    for (int k = 1; k < 3; ++k)
        if (std::abs(g0(k)) > std::abs(g0(cmax))) cmax = k;
    int ca = (cmax + 1) % 3, cb = (cmax + 2) % 3;

    auto cross_comp = [](const Eigen::Vector3cd& a, const Eigen::Vector3cd& b, int c) {
        int i = (c + 1) % 3, j = (c + 2) % 3;
        return a(i) * b(j) - a(j) * b(i);
    };

    VecC z(3);
    z << x(0), x(1), x(2);
    auto fun = [&](const VecC& v, VecC& r, MatC& J) {
        Eigen::Vector3cd p(v(0), v(1), v(2));
        r.resize(5);
        J.resize(5, 3);
        Eigen::Vector3cd gF = F.gradient_at(p), gG = G.gradient_at(p);
        r(0) = eval3(F, p);
        r(1) = eval3(G, p);
        r(2) = cross_comp(gF, gG, ca);
        r(3) = cross_comp(gF, gG, cb);
        r(4) = (gauge.adjoint() * p)(0) - Cx(1);
        Eigen::Matrix3cd HF, HG;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                HF(i, j) = hessF[i][j].eval(p);
                HG(i, j) = hessG[i][j].eval(p);
            }
        for (int j = 0; j < 3; ++j) {
            J(0, j) = gF(j);
            J(1, j) = gG(j);
            // d/dx_j of (gF x gG)_c
            Eigen::Vector3cd dF = HF.col(j), dG = HG.col(j);
            J(2, j) = cross_comp(dF, gG, ca) + cross_comp(gF, dG, ca);
            J(3, j) = cross_comp(dF, gG, cb) + cross_comp(gF, dG, cb);
            J(4, j) = std::conj(gauge(j));
        }
    };
    bool ok = gauss_newton_solve(z, fun, 5, iters);
    x = Eigen::Vector3cd(z(0), z(1), z(2));
    return ok;
}

struct RawPoint {
    Eigen::Vector3cd x;
    int mult;
};

}  // namespace

double on_curve_residual(const HomogeneousForm& F, const ProjPoint& p) {
    Eigen::Vector3cd x = as3(p.v);
    return std::abs(F.eval(x)) / residual_scale(F, x);
}

bool polish_point_on_two_curves(const HomogeneousForm& F, const HomogeneousForm& G,
                                Eigen::Vector3cd& x, int iters) {
    return polish_simple(F, G, x, iters);
}

void TangencyConstraint::validate(const ToleranceProfile& profile) const {
    Eigen::Vector3cd n = line.line_normal();
    double v = std::abs(line.eval(as3(point.v)));
    double scale = n.norm() * point.v.norm();
    if (v > 1e4 * profile.eps_point * (scale > 0 ? scale : 1.0))
        fail(ErrorCode::UsageError, "tangency_constraint", "point does not lie on its line");
}

HomogeneousForm line_through(const ProjPoint& p, const ProjPoint& q,
                             const ToleranceProfile& profile) {
    if (ProjPoint::distance(p, q) <= profile.eps_point)
        fail(ErrorCode::DegenerateLine, "line_through", "coincident points");
    Eigen::Vector3cd n = cross3(as3(p.v), as3(q.v));
    if (n.norm() < 1e-14)
        fail(ErrorCode::DegenerateLine, "line_through", "cross product vanished");
    return HomogeneousForm::line(n).normalized();
}

std::vector<IntersectionPoint> intersect_with_line(const HomogeneousForm& F,
                                                   const Eigen::Vector3cd& A,
                                                   const Eigen::Vector3cd& B,
                                                   const ToleranceProfile& profile) {
    BinaryForm phi = F.restrict_line(A, B);
    if (phi.max_abs() <= 1e-13 * F.max_abs())
        fail(ErrorCode::CommonComponent, "intersect_line", "line lies on the curve");
    Rng rng(profile.seed ^ 0x11be57a11UL);
    auto roots = binary_roots(phi, profile, rng);
    std::vector<IntersectionPoint> out;
    out.reserve(roots.size());
    for (const auto& r : roots) {
        Eigen::Vector3cd x = r.s * A + r.t * B;
        VecC v(3);
        v << x(0), x(1), x(2);
        out.push_back({ProjPoint(std::move(v)), r.mult});
    }
    return out;
}

std::vector<IntersectionPoint> intersect(const HomogeneousForm& F, const HomogeneousForm& G,
                                         const ToleranceProfile& profile) {
    if (F.nvars != 3 || G.nvars != 3)
        fail(ErrorCode::UsageError, "intersect", "plane curves only");
    if (F.degree == 1 || G.degree == 1) {
        const HomogeneousForm& line = (F.degree == 1) ? F : G;
        const HomogeneousForm& curve = (F.degree == 1) ? G : F;
        Eigen::Vector3cd A, B;
        line_span(line.line_normal(), A, B);
        return intersect_with_line(curve, A, B, profile);
    }

    const int target = F.degree * G.degree;
    Rng rng_master(profile.seed ^ 0x1c7e5ec7UL);
    std::string last_problem = "unknown";

    for (int attempt = 0; attempt < 6; ++attempt) {
        Rng rng = rng_master.fork(attempt + 1);
        Eigen::Matrix3cd U = random_unitary3(rng);
        HomogeneousForm Ft = F.compose_linear(U), Gt = G.compose_linear(U);
        // leading coefficients in x2 (constants) must be healthy
        Eigen::Vector3cd e2(0, 0, 1);
        if (std::abs(Ft.eval(e2)) < 1e-3 * Ft.max_abs() ||
            std::abs(Gt.eval(e2)) < 1e-3 * Gt.max_abs()) {
            last_problem = "leading coefficient degenerate";
            continue;
        }

        bool zero = false;
        BinaryForm R = resultant_form(Ft, Gt, 2, zero);
        if (zero)
            fail(ErrorCode::CommonComponent, "intersect", "curves share a component");

        std::vector<ProjRoot> roots;
        try {
            roots = binary_roots(R, profile, rng);
        } catch (const Error&) {
            last_problem = "resultant root-finding failed";
            continue;
        }
        int total = 0;
        for (const auto& r : roots) total += r.mult;
        if (total != target) {
            last_problem = "resultant degree defect";
            continue;
        }

        std::vector<RawPoint> raw;
        bool bad = false;
        for (const auto& rt : roots) {
            // x2 candidates: common roots of both specializations
            UniPoly<double> f2, g2;
            {
                auto fc = Ft.coefficients_in(2);
                auto gc = Gt.coefficients_in(2);
                f2.c.resize(fc.size());
                g2.c.resize(gc.size());
                for (size_t k = 0; k < fc.size(); ++k) f2.c[k] = fc[k].eval(rt.s, rt.t);
                for (size_t k = 0; k < gc.size(); ++k) g2.c[k] = gc[k].eval(rt.s, rt.t);
            }
            std::vector<RootMult> fr, gr;
            try {
                fr = roots_univariate(f2, profile);
                gr = roots_univariate(g2, profile);
            } catch (const Error&) {
                bad = true;
                last_problem = "fiber root-finding failed";
                break;
            }
            // pair up nearest f-root / g-root matches. The radius only needs
            // to absorb clustering error of multiple roots (~1e-6 before the
            // derivative polish); anything looser conflates genuinely close
            // curves, e.g. a cubic passing 1e-3 away from a conic
            std::vector<Cx> commons;
            double radius = 10.0 * profile.cluster_radius();
            for (const auto& a : fr)
                for (const auto& b : gr)
                    if (std::abs(a.value - b.value) <=
                        radius * (1.0 + std::max(std::abs(a.value), std::abs(b.value)))) {
                        Cx v = 0.5 * (a.value + b.value);
                        bool dup = false;
                        for (const auto& c : commons)
                            if (std::abs(c - v) <= radius * (1.0 + std::abs(v))) dup = true;
                        if (!dup) commons.push_back(v);
                    }
            if (commons.size() != 1) {
                // two distinct intersection points aligned with the projection
                // center, or none found: re-rotate
                if (std::getenv("AGM3_DEBUG")) {
                    std::fprintf(stderr, "[intersect] root (%.4f%+.4fi:%.4f%+.4fi) mult %d: %zu commons; froots:",
                                 rt.s.real(), rt.s.imag(), rt.t.real(), rt.t.imag(), rt.mult, commons.size());
                    for (auto& a : fr) std::fprintf(stderr, " (%.4f%+.4fi,m%d)", a.value.real(), a.value.imag(), a.multiplicity);
                    std::fprintf(stderr, " groots:");
                    for (auto& b : gr) std::fprintf(stderr, " (%.4f%+.4fi,m%d)", b.value.real(), b.value.imag(), b.multiplicity);
                    std::fprintf(stderr, "\n");
                }
                bad = true;
                last_problem = "projection not generic";
                break;
            }
            raw.push_back({Eigen::Vector3cd(rt.s, rt.t, commons[0]), rt.mult});
        }
        if (bad) continue;

        // polish and validate in rotated coordinates
        std::vector<IntersectionPoint> out;
        double worst = 0;
        for (auto& rp : raw) {
            rp.x.normalize();
            bool ok = rp.mult == 1 ? polish_simple(Ft, Gt, rp.x, profile.max_newton_iters)
                                   : polish_tangential(Ft, Gt, rp.x, profile.max_newton_iters);
            (void)ok;  // residual check below is the arbiter
            double res = std::max(std::abs(Ft.eval(rp.x)) / residual_scale(Ft, rp.x),
                                  std::abs(Gt.eval(rp.x)) / residual_scale(Gt, rp.x));
            worst = std::max(worst, res);
        }
        if (worst > profile.eps_residual) {
            last_problem = "post-polish residual too large";
            continue;
        }

        // second elimination order as an independent multiplicity check
        {
            bool zero1 = false;
            BinaryForm R1 = resultant_form(Ft, Gt, 1, zero1);
            if (zero1)
                fail(ErrorCode::CommonComponent, "intersect", "curves share a component");
            std::vector<ProjRoot> roots1 = binary_roots(R1, profile, rng);
            bool match = true;
            for (const auto& rp : raw) {
                // projection of rp onto (x0, x2)
                VecC pr(2);
                pr << rp.x(0), rp.x(2);
                pr = canonicalize_vector(std::move(pr));
                int found = -1;
                for (size_t i = 0; i < roots1.size(); ++i) {
                    VecC q(2);
                    q << roots1[i].s, roots1[i].t;
                    if (projective_distance(pr, q) <= 1e4 * profile.cluster_radius()) {
                        found = static_cast<int>(i);
                        break;
                    }
                }
                if (found < 0) {
                    match = false;
                    break;
                }
            }
            if (!match) {
                last_problem = "chart orders disagree";
                continue;
            }
        }

        for (const auto& rp : raw) {
            Eigen::Vector3cd x = U * rp.x;
            VecC v(3);
            v << x(0), x(1), x(2);
            out.push_back({ProjPoint(std::move(v)), rp.mult});
        }
        std::sort(out.begin(), out.end(), [](const IntersectionPoint& a, const IntersectionPoint& b) {
            for (int i = 0; i < 3; ++i) {
                if (a.point.v(i).real() != b.point.v(i).real())
                    return a.point.v(i).real() < b.point.v(i).real();
                if (a.point.v(i).imag() != b.point.v(i).imag())
                    return a.point.v(i).imag() < b.point.v(i).imag();
            }
            return false;
        });
        return out;
    }
    fail(ErrorCode::AmbiguousRank, "intersect",
         std::string("no generic chart found after retries: ") + last_problem);
}

HomogeneousForm polar_conic(const HomogeneousForm& E, const ProjPoint& t,
                            const ToleranceProfile& profile) {
    (void)profile;
    if (E.degree != 3 || E.nvars != 3)
        fail(ErrorCode::UsageError, "polar_conic", "expected a plane cubic");
    auto grad = E.gradient();
    HomogeneousForm P = grad[0].scaled(t.v(0)) + grad[1].scaled(t.v(1)) + grad[2].scaled(t.v(2));
    if (P.max_abs() <= 1e-13 * E.max_abs())
        fail(ErrorCode::ZeroForm, "polar_conic", "polar vanishes identically (triple point)");
    return P;
}

ProjPoint third_point(const HomogeneousForm& E, const ProjPoint& p, const ProjPoint& q,
                      const ToleranceProfile& profile) {
    if (E.degree != 3) fail(ErrorCode::UsageError, "third_point", "expected a cubic");
    if (ProjPoint::distance(p, q) <= profile.eps_point)
        fail(ErrorCode::DegenerateLine, "third_point", "p and q coincide");
    if (on_curve_residual(E, p) > 1e3 * profile.eps_residual ||
        on_curve_residual(E, q) > 1e3 * profile.eps_residual)
        fail(ErrorCode::NonGeneric, "third_point", "input points not on the cubic");

    Eigen::Vector3cd A = as3(p.v), B = as3(q.v);
    BinaryForm phi = E.restrict_line(A, B);
    if (phi.max_abs() <= 1e-13 * E.max_abs())
        fail(ErrorCode::NonGeneric, "third_point", "secant line lies on the cubic");
    Rng rng(profile.seed ^ 0x7417d904UL);
    auto roots = binary_roots(phi, profile, rng);

    ProjRoot root_p{Cx(1), Cx(0), 1}, root_q{Cx(0), Cx(1), 1};
    double dp = 2, dq = 2;
    int ip = -1, iq = -1;
    for (size_t i = 0; i < roots.size(); ++i) {
        double a = projroot_distance(roots[i], root_p);
        double b = projroot_distance(roots[i], root_q);
        if (a < dp) {
            dp = a;
            ip = static_cast<int>(i);
        }
        if (b < dq) {
            dq = b;
            iq = static_cast<int>(i);
        }
    }
    if (ip < 0 || iq < 0 || ip == iq)
        fail(ErrorCode::NonGeneric, "third_point", "could not identify p and q on the secant");
    int ir = -1;
    for (size_t i = 0; i < roots.size(); ++i) {
        if (static_cast<int>(i) == ip || static_cast<int>(i) == iq) continue;
        ir = static_cast<int>(i);
    }
    if (ir < 0) {
        // tangent line: one of the roots is double; the residual point
        // coincides with p or q
        fail(ErrorCode::NonGeneric, "third_point",
             "residual point coincides with p or q (tangent secant)");
    }
    const ProjRoot& r = roots[ir];

    // 1D Newton polish along the line, moving orthogonally to the gauge orbit
    Cx s = r.s, t = r.t;
    BinaryForm phi_s = phi.derivative_s();
    BinaryForm phi_t(phi.degree - 1);
    for (int k = 1; k <= phi.degree; ++k) phi_t.c[k - 1] = phi.c[k] * static_cast<double>(k);
    for (int it = 0; it < 40; ++it) {
        Cx val = phi.eval(s, t);
        Cx dir_s = -std::conj(t), dir_t = std::conj(s);
        Cx dv = phi_s.eval(s, t) * dir_s + phi_t.eval(s, t) * dir_t;
        if (std::abs(dv) < 1e-300) break;
        Cx step = val / dv;
        s -= step * dir_s;
        t -= step * dir_t;
        double nn = std::sqrt(std::norm(s) + std::norm(t));
        s /= nn;
        t /= nn;
        if (std::abs(step) < 1e-15) break;
    }

    Eigen::Vector3cd x = s * A + t * B;
    VecC v(3);
    v << x(0), x(1), x(2);
    ProjPoint res{std::move(v)};
    if (ProjPoint::distance(res, p) <= profile.eps_point ||
        ProjPoint::distance(res, q) <= profile.eps_point)
        fail(ErrorCode::NonGeneric, "third_point", "residual point coincides with p or q");
    return res;
}

std::pair<HomogeneousForm, RankCertificate> fit_form_constrained(
    int degree, const std::vector<ProjPoint>& points,
    const std::vector<TangencyConstraint>& tangencies, const ToleranceProfile& profile,
    const std::string& label) {
    if (degree < 2 || degree > 3)
        fail(ErrorCode::UsageError, "fit_form_constrained", "degree must be 2 or 3");
    const auto& table = MonomialTable::get(3, degree);
    const int ncoef = table.count();
    const int nrows = static_cast<int>(points.size()) + 2 * static_cast<int>(tangencies.size());
    if (nrows < ncoef - 1)
        fail(ErrorCode::UsageError, "fit_form_constrained", "under-determined system");

    MatC M = MatC::Zero(nrows, ncoef);
    int row = 0;
    for (const auto& p : points) {
        Eigen::Vector3cd x = as3(p.v);
        for (int m = 0; m < ncoef; ++m) {
            const auto& e = table.exps[m];
            Cx v(1);
            for (int i = 0; i < 3; ++i)
                for (int k = 0; k < e[i]; ++k) v *= x(i);
            M(row, m) = v;
        }
        ++row;
    }
    for (const auto& tc : tangencies) {
        tc.validate(profile);
        Eigen::Vector3cd x = as3(tc.point.v);
        Eigen::Vector3cd n = tc.line.line_normal().normalized();
        int cmax = 0;
        for (int k = 1; k < 3; ++k)
            if (std::abs(n(k)) > std::abs(n(cmax))) cmax = k;
        int comps[2] = {(cmax + 1) % 3, (cmax + 2) % 3};
        for (int cc = 0; cc < 2; ++cc) {
            int c = comps[cc];
            int i = (c + 1) % 3, j = (c + 2) % 3;
            for (int m = 0; m < ncoef; ++m) {
                const auto& e = table.exps[m];
                // (grad mon x n)_c = dmon_i n_j - dmon_j n_i at x
                auto dmon_at = [&](int var) -> Cx {
                    if (e[var] == 0) return Cx(0);
                    Cx v(static_cast<double>(e[var]));
                    for (int t2 = 0; t2 < 3; ++t2) {
                        int pw = e[t2] - (t2 == var ? 1 : 0);
                        for (int k = 0; k < pw; ++k) v *= x(t2);
                    }
                    return v;
                };
                M(row, m) = dmon_at(i) * n(j) - dmon_at(j) * n(i);
            }
            ++row;
        }
    }
    // row normalization: certificates speak about the row-equilibrated system
    for (int r = 0; r < nrows; ++r) {
        double nr = M.row(r).norm();
        if (nr > 0) M.row(r) /= nr;
    }

    NullspaceResult ns = nullspace(M, profile, label, 1);
    HomogeneousForm f(3, degree);
    f.coeffs = ns.basis.col(0);
    f = f.normalized();

    // a-posteriori validations
    for (const auto& p : points)
        if (on_curve_residual(f, p) > profile.eps_residual)
            fail(ErrorCode::AmbiguousRank, "fit_form_constrained",
                 label + ": fitted form misses an interpolation point");
    for (const auto& tc : tangencies) {
        Eigen::Vector3cd g = f.gradient_at(as3(tc.point.v));
        Eigen::Vector3cd n = tc.line.line_normal();
        double res = cross3(g, n).norm() / (g.norm() * n.norm());
        if (res > 1e3 * profile.eps_residual)
            fail(ErrorCode::AmbiguousRank, "fit_form_constrained",
                 label + ": fitted form misses a tangency");
    }
    return {f, ns.cert};
}

}  // namespace agm3
