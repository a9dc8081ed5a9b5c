#include <algorithm>
#include <cstdio>
#include <cstdlib>

#include "agm3/quartic.hpp"

namespace agm3 {

namespace {

inline bool bt_debug() {
    static bool v = std::getenv("AGM3_DEBUG") != nullptr;
    return v;
}

/// Contact-pair refinement: unknowns (p, r) in C^3 x C^3 with affine gauges;
/// equations put both points on the quartic and force the line pr to be the
/// tangent there (grad F(p).r = grad F(r).p = 0).
bool polish_contact_pair(const HomogeneousForm& F,
                         const std::vector<std::vector<HomogeneousForm>>& hess,
                         Eigen::Vector3cd& p, Eigen::Vector3cd& r, int iters) {
    Eigen::Vector3cd gp = p.normalized(), gr = r.normalized();
    VecC z(6);
    z << p(0), p(1), p(2), r(0), r(1), r(2);
    auto fun = [&](const VecC& v, VecC& res, MatC& J) {
        Eigen::Vector3cd P(v(0), v(1), v(2)), R(v(3), v(4), v(5));
        res.resize(6);
        J = MatC::Zero(6, 6);
        Eigen::Vector3cd gF_P = F.gradient_at(P), gF_R = F.gradient_at(R);
        Eigen::Matrix3cd H_P, H_R;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                H_P(i, j) = hess[i][j].eval(P);
                H_R(i, j) = hess[i][j].eval(R);
            }
        res(0) = F.eval(P);
        res(1) = F.eval(R);
        res(2) = (gF_P.transpose() * R)(0);
        res(3) = (gF_R.transpose() * P)(0);
        res(4) = (gp.adjoint() * P)(0) - Cx(1);
        res(5) = (gr.adjoint() * R)(0) - Cx(1);
        for (int j = 0; j < 3; ++j) {
            J(0, j) = gF_P(j);
            J(1, 3 + j) = gF_R(j);
            J(2, j) = (H_P.col(j).transpose() * R)(0);
            J(2, 3 + j) = gF_P(j);
            J(3, j) = gF_R(j);
            J(3, 3 + j) = (H_R.col(j).transpose() * P)(0);
            J(4, j) = std::conj(gp(j));
            J(5, 3 + j) = std::conj(gr(j));
        }
    };
    z.head<3>() /= (gp.adjoint() * p)(0);
    z.tail<3>() /= (gr.adjoint() * r)(0);
    bool ok = newton_solve(z, fun, iters);
    p = Eigen::Vector3cd(z(0), z(1), z(2));
    r = Eigen::Vector3cd(z(3), z(4), z(5));
    return ok;
}

void line_span_of(const Eigen::Vector3cd& n, Eigen::Vector3cd& A, Eigen::Vector3cd& B) {
    Eigen::Vector3cd cand[3] = {cross3(n, Eigen::Vector3cd(1, 0, 0)),
                                cross3(n, Eigen::Vector3cd(0, 1, 0)),
                                cross3(n, Eigen::Vector3cd(0, 0, 1))};
    int best = 0;
    for (int k = 1; k < 3; ++k)
        if (cand[k].norm() > cand[best].norm()) best = k;
    A = cand[best].normalized();
    B = cand[(best + 1) % 3] - A * (A.adjoint() * cand[(best + 1) % 3])(0);
    if (B.norm() < 1e-10)
        B = cand[(best + 2) % 3] - A * (A.adjoint() * cand[(best + 2) % 3])(0);
    B.normalize();
}

/// perfect-square residual of the quartic restricted to a line, measured
/// against the best multiple of (l_p * l_r)^2 where l_p, l_r are the root
/// factors of the two contact parameters
double perfect_square_residual(const HomogeneousForm& F, const Eigen::Vector3cd& p,
                               const Eigen::Vector3cd& r, const Eigen::Vector3cd& normal) {
    Eigen::Vector3cd A, B;
    line_span_of(normal, A, B);
    BinaryForm g = F.restrict_line(A, B);
    Cx sp = A.dot(p), tp = B.dot(p);
    Cx sr = A.dot(r), tr = B.dot(r);
    BinaryForm q(2);
    q.c[0] = tp * tr;
    q.c[1] = -(tp * sr + sp * tr);
    q.c[2] = sp * sr;
    BinaryForm h(4);
    for (int i = 0; i <= 2; ++i)
        for (int j = 0; j <= 2; ++j) h.c[i + j] += q.c[i] * q.c[j];
    Cx num(0), den(0);
    for (int k = 0; k <= 4; ++k) {
        num += std::conj(h.c[k]) * g.c[k];
        den += std::conj(h.c[k]) * h.c[k];
    }
    if (std::abs(den) < 1e-300) return 1.0;
    Cx c = num / den;
    double err = 0, scale = 0;
    for (int k = 0; k <= 4; ++k) {
        err += std::norm(g.c[k] - c * h.c[k]);
        scale += std::norm(g.c[k]);
    }
    return scale > 0 ? std::sqrt(err / scale) : 1.0;
}

/// dense bivariate polynomial in (m, c), just enough for the elimination
struct BiPoly {
    int dm = 0, dc = 0;
    std::vector<Cx> a;  // a[i * (dc+1) + j] multiplies m^i c^j

    BiPoly() : a(1, Cx(0)) {}
    BiPoly(int Dm, int Dc) : dm(Dm), dc(Dc), a((Dm + 1) * (Dc + 1), Cx(0)) {}

    Cx& at(int i, int j) { return a[i * (dc + 1) + j]; }
    Cx get(int i, int j) const {
        return (i <= dm && j <= dc) ? a[i * (dc + 1) + j] : Cx(0);
    }

    BiPoly operator*(const BiPoly& o) const {
        BiPoly r(dm + o.dm, dc + o.dc);
        for (int i = 0; i <= dm; ++i)
            for (int j = 0; j <= dc; ++j) {
                Cx v = get(i, j);
                if (v == Cx(0)) continue;
                for (int k = 0; k <= o.dm; ++k)
                    for (int l = 0; l <= o.dc; ++l) r.at(i + k, j + l) += v * o.get(k, l);
            }
        return r;
    }
    BiPoly operator+(const BiPoly& o) const {
        BiPoly r(std::max(dm, o.dm), std::max(dc, o.dc));
        for (int i = 0; i <= r.dm; ++i)
            for (int j = 0; j <= r.dc; ++j) r.at(i, j) = get(i, j) + o.get(i, j);
        return r;
    }
    BiPoly operator-(const BiPoly& o) const {
        BiPoly r(std::max(dm, o.dm), std::max(dc, o.dc));
        for (int i = 0; i <= r.dm; ++i)
            for (int j = 0; j <= r.dc; ++j) r.at(i, j) = get(i, j) - o.get(i, j);
        return r;
    }
    BiPoly scaled(Cx s) const {
        BiPoly r = *this;
        for (auto& v : r.a) v *= s;
        return r;
    }
    Cx eval(Cx m, Cx c) const {
        Cx acc(0);
        Cx mp(1);
        for (int i = 0; i <= dm; ++i) {
            Cx cp(1), row(0);
            for (int j = 0; j <= dc; ++j) {
                row += get(i, j) * cp;
                cp *= c;
            }
            acc += row * mp;
            mp *= m;
        }
        return acc;
    }
    /// coefficients as polynomials in m for each power of c
    std::vector<UniPoly<double>> coeffs_in_c() const {
        std::vector<UniPoly<double>> out(dc + 1);
        for (int j = 0; j <= dc; ++j) {
            out[j].c.assign(dm + 1, Cx(0));
            for (int i = 0; i <= dm; ++i) out[j].c[i] = get(i, j);
            out[j].trim(1e-300);  // keep structure; only exact-zero trim
        }
        return out;
    }
    double max_abs() const {
        double v = 0;
        for (const auto& z : a) v = std::max(v, std::abs(z));
        return v;
    }
};

struct ChartHit {
    Eigen::Vector3cd normal;  // rotated-frame line normal
    Eigen::Vector3cd p, r;    // rotated-frame contacts
};

/// Perfect-square elimination in one slope/intercept chart: lines
/// x_{s1} = m x_{s0} + c x_{s2}. Restriction F(x, m x + c, 1) =
/// sum c_k(m,c) x^k must equal c4 (x^2 + p x + q)^2; eliminating p, q gives
///   I  = 8 c1 c4^2 - 4 c2 c3 c4 + c3^3
///   II = 64 c0 c4^3 - (4 c2 c4 - c3^2)^2
/// whose finite common roots away from c4 = 0 are the bitangents visible in
/// the chart. Solved by interpolated Res_c plus 2D Newton.
std::vector<ChartHit> chart_bitangents(const HomogeneousForm& F,
                                       const std::vector<std::vector<HomogeneousForm>>& hess,
                                       const std::array<int, 3>& role,
                                       const ToleranceProfile& profile, Rng& rng) {
    // c_k(m, c), k = 0..4
    std::array<BiPoly, 5> ck;
    for (auto& c : ck) c = BiPoly(4, 4);
    const auto& table = F.table();
    auto binom = [](int n, int k) {
        double v = 1;
        for (int i = 0; i < k; ++i) v = v * (n - i) / (i + 1);
        return v;
    };
    for (int mo = 0; mo < table.count(); ++mo) {
        Cx coeff = F.coeffs(mo);
        if (coeff == Cx(0)) continue;
        const auto& e = table.exps[mo];
        int e0 = e[role[0]], e1 = e[role[1]];
        // x^{e0} (m x + c)^{e1}: expands over j with x-power e0 + j
        for (int j = 0; j <= e1; ++j) {
            int k = e0 + j;
            ck[k].at(j, e1 - j) += coeff * binom(e1, j);
        }
    }

    BiPoly I = ck[1] * ck[4] * ck[4];
    I = I.scaled(8.0) - (ck[2] * ck[3] * ck[4]).scaled(4.0) + ck[3] * ck[3] * ck[3];
    BiPoly inner = (ck[2] * ck[4]).scaled(4.0) - ck[3] * ck[3];
    BiPoly II = (ck[0] * ck[4] * ck[4] * ck[4]).scaled(64.0) - inner * inner;

    // normalize both equation sets once
    double iscale = I.max_abs(), iiscale = II.max_abs();
    if (iscale == 0 || iiscale == 0) return {};
    I = I.scaled(1.0 / iscale);
    II = II.scaled(1.0 / iiscale);

    // effective c-degrees (the BiPoly fields are allocation bounds)
    auto effective_dc = [](const BiPoly& P) {
        for (int j = P.dc; j >= 0; --j) {
            double mx = 0;
            for (int i = 0; i <= P.dm; ++i) mx = std::max(mx, std::abs(P.get(i, j)));
            if (mx > 1e-12 * P.max_abs()) return j;
        }
        return 0;
    };
    auto Ic_full = I.coeffs_in_c();
    auto IIc_full = II.coeffs_in_c();
    const int nc_i = effective_dc(I);    // 3 for a generic quartic
    const int nc_ii = effective_dc(II);  // 4
    if (nc_i < 1 || nc_ii < 1) return {};
    std::vector<UniPoly<double>> Ic(Ic_full.begin(), Ic_full.begin() + nc_i + 1);
    std::vector<UniPoly<double>> IIc(IIc_full.begin(), IIc_full.begin() + nc_ii + 1);

    // Res_c(I, II): Sylvester (nc_i + nc_ii) with entries polynomial in m,
    // sampled on the unit circle and interpolated by DFT
    const int size = nc_i + nc_ii;
    const int degm_bound = nc_ii * 12 + nc_i * 16 + 8;
    const int N = degm_bound + 17;
    std::vector<double> logmag(N);
    std::vector<Cx> phase(N);
    double max_log = -1e300;
    for (int j = 0; j < N; ++j) {
        double th = 6.283185307179586476925286766559 * j / N;
        Cx u(std::cos(th), std::sin(th));
        MatC S = MatC::Zero(size, size);
        std::vector<Cx> iv(nc_i + 1), iiv(nc_ii + 1);
        for (int k = 0; k <= nc_i; ++k) iv[k] = Ic[k].eval(u);
        for (int k = 0; k <= nc_ii; ++k) iiv[k] = IIc[k].eval(u);
        for (int r = 0; r < nc_ii; ++r)
            for (int k = 0; k <= nc_i; ++k) S(r, r + (nc_i - k)) = iv[k];
        for (int r = 0; r < nc_i; ++r)
            for (int k = 0; k <= nc_ii; ++k) S(nc_ii + r, r + (nc_ii - k)) = iiv[k];
        Eigen::PartialPivLU<MatC> lu(S);
        double lm = 0;
        Cx ph = Cx(static_cast<double>(lu.permutationP().determinant()), 0.0);
        bool zero = false;
        for (int r = 0; r < size; ++r) {
            Cx piv = lu.matrixLU()(r, r);
            double a2 = std::abs(piv);
            if (a2 == 0.0) {
                zero = true;
                break;
            }
            lm += std::log(a2);
            ph *= piv / a2;
        }
        logmag[j] = zero ? -1e300 : lm;
        phase[j] = zero ? Cx(0) : ph;
        max_log = std::max(max_log, logmag[j]);
    }
    if (max_log < -1e299) return {};
    std::vector<Cx> vals(N);
    for (int j = 0; j < N; ++j)
        vals[j] = (logmag[j] < -1e299) ? Cx(0) : phase[j] * std::exp(logmag[j] - max_log);
    UniPoly<double> Rm;
    Rm.c.assign(N, Cx(0));
    for (int k = 0; k < N; ++k) {
        Cx acc(0);
        for (int j = 0; j < N; ++j) {
            double th = -6.283185307179586476925286766559 * j * k / N;
            acc += vals[j] * Cx(std::cos(th), std::sin(th));
        }
        Rm.c[k] = acc / static_cast<double>(N);
    }
    Rm.trim(1e-12);
    if (Rm.degree() < 1) return {};

    std::vector<RootMult> mroots;
    try {
        mroots = roots_univariate_lenient(Rm, profile);
    } catch (const Error&) {
        return {};
    }

    // candidate (m, c) pairs: c-roots of both equations, cross-filtered
    std::vector<ChartHit> hits;
    double c4scale = 0;
    for (const auto& z : ck[4].a) c4scale = std::max(c4scale, std::abs(z));
    for (const auto& mr : mroots) {
        Cx m = mr.value;
        if (std::abs(m) > 1e4) continue;
        Cx c4v = ck[4].eval(m, Cx(0));
        if (std::abs(c4v) < 1e-6 * c4scale) continue;  // chart-degenerate blob
        std::vector<Cx> c_candidates;
        for (const auto& eq : {I, II}) {
            // univariate in c at fixed m
            UniPoly<double> pc;
            pc.c.assign(eq.dc + 1, Cx(0));
            for (int j = 0; j <= eq.dc; ++j) {
                Cx acc(0), mp(1);
                for (int i = 0; i <= eq.dm; ++i) {
                    acc += eq.get(i, j) * mp;
                    mp *= m;
                }
                pc.c[j] = acc;
            }
            pc.trim();
            if (pc.degree() < 1) continue;
            std::vector<RootMult> cr;
            try {
                cr = roots_univariate_lenient(pc, profile);
            } catch (const Error&) {
                continue;
            }
            for (const auto& c : cr) c_candidates.push_back(c.value);
        }
        for (Cx c : c_candidates) {
            if (std::abs(c) > 1e4) continue;
            // 2D Newton on (I, II)
            VecC z2(2);
            z2 << m, c;
            auto fun = [&](const VecC& v, VecC& res, MatC& J) {
                res.resize(2);
                J.resize(2, 2);
                Cx mm = v(0), cc = v(1);
                res(0) = I.eval(mm, cc);
                res(1) = II.eval(mm, cc);
                // numeric-free derivatives via coefficient shifts
                auto dm_eval = [&](const BiPoly& P) {
                    Cx acc(0), mp(1);
                    for (int i2 = 1; i2 <= P.dm; ++i2) {
                        Cx cp(1), row(0);
                        for (int j2 = 0; j2 <= P.dc; ++j2) {
                            row += P.get(i2, j2) * cp;
                            cp *= cc;
                        }
                        acc += row * static_cast<double>(i2) * mp;
                        mp *= mm;
                    }
                    return acc;
                };
                auto dc_eval = [&](const BiPoly& P) {
                    Cx acc(0), mp(1);
                    for (int i2 = 0; i2 <= P.dm; ++i2) {
                        Cx cp(1), row(0);
                        for (int j2 = 1; j2 <= P.dc; ++j2) {
                            row += P.get(i2, j2) * static_cast<double>(j2) * cp;
                            cp *= cc;
                        }
                        acc += row * mp;
                        mp *= mm;
                    }
                    return acc;
                };
                J(0, 0) = dm_eval(I);
                J(0, 1) = dc_eval(I);
                J(1, 0) = dm_eval(II);
                J(1, 1) = dc_eval(II);
            };
            if (!newton_solve(z2, fun, profile.max_newton_iters)) continue;
            Cx mf = z2(0), cf = z2(1);
            if (!std::isfinite(std::abs(mf)) || !std::isfinite(std::abs(cf))) continue;
            Cx c4f = ck[4].eval(mf, cf);
            if (std::abs(c4f) < 1e-6 * c4scale) continue;
            // contact parameters from the square structure
            Cx pcoef = ck[3].eval(mf, cf) / (2.0 * c4f);
            Cx qcoef = (4.0 * ck[2].eval(mf, cf) * c4f -
                        ck[3].eval(mf, cf) * ck[3].eval(mf, cf)) /
                       (8.0 * c4f * c4f);
            // roots of x^2 + p x + q
            Cx half = -pcoef / 2.0;
            Cx srt = std::sqrt(half * half - qcoef);
            Cx x1 = half + srt, x2 = half - srt;
            // homogeneous points in rotated coordinates
            auto chart_point = [&](Cx x) {
                Eigen::Vector3cd pt;
                pt(role[0]) = x;
                pt(role[1]) = mf * x + cf;
                pt(role[2]) = Cx(1);
                return pt.normalized();
            };
            Eigen::Vector3cd P = chart_point(x1), R = chart_point(x2);
            if (!polish_contact_pair(F, hess, P, R, profile.max_newton_iters)) continue;
            VecC pv(3), rv(3);
            pv << P(0), P(1), P(2);
            rv << R(0), R(1), R(2);
            if (projective_distance(pv, rv) < 1e3 * profile.eps_point) continue;
            if (std::abs(F.eval(pv)) > profile.eps_residual * F.eval_scale(pv)) continue;
            if (std::abs(F.eval(rv)) > profile.eps_residual * F.eval_scale(rv)) continue;
            Eigen::Vector3cd n1 = F.gradient_at(P), n2 = F.gradient_at(R);
            if (n1.norm() == 0 || n2.norm() == 0) continue;
            if (cross3(n1.normalized(), n2.normalized()).norm() > 1e-6) continue;
            if (perfect_square_residual(F, P, R, n1) > profile.eps_residual) continue;
            hits.push_back({n1, P, R});
        }
    }
    (void)rng;
    return hits;
}

}  // namespace

std::vector<BitangentRecord> bitangents(const Quartic& C, const ToleranceProfile& profile) {
    const HomogeneousForm& F0 = C.form;
    Rng master(profile.seed ^ 0xb17a47e5UL);

    std::string last = "no attempt";
    for (int attempt = 0; attempt < 5; ++attempt) {
        Rng rng = master.fork(attempt + 11);
        Eigen::Matrix3cd U = random_unitary3(rng);
        HomogeneousForm F = F0.compose_linear(U).normalized();
        auto grad = F.gradient();
        std::vector<std::vector<HomogeneousForm>> hess(3);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) hess[i].push_back(grad[i].partial(j));

        std::vector<ChartHit> all;
        const std::array<std::array<int, 3>, 3> roles{
            std::array<int, 3>{0, 1, 2}, {1, 2, 0}, {2, 0, 1}};
        for (const auto& role : roles) {
            std::vector<ChartHit> hits;
            try {
                hits = chart_bitangents(F, hess, role, profile, rng);
            } catch (const Error&) {
                continue;
            }
            all.insert(all.end(), hits.begin(), hits.end());
        }
        // dedupe by canonical line
        std::vector<ChartHit> unique;
        std::vector<VecC> unique_normals;
        for (const auto& h : all) {
            VecC n = canonicalize_vector(
                (VecC(3) << h.normal(0), h.normal(1), h.normal(2)).finished());
            bool dup = false;
            for (const auto& un : unique_normals)
                if (projective_distance(n, un) < 1e4 * profile.eps_point) {
                    dup = true;
                    break;
                }
            if (!dup) {
                unique.push_back(h);
                unique_normals.push_back(std::move(n));
            }
        }
        if (bt_debug())
            std::fprintf(stderr, "[bt] attempt %d: %zu hits, %zu unique lines\n", attempt,
                         all.size(), unique.size());
        if (unique.size() != 28) {
            last = "found " + std::to_string(unique.size()) + " lines";
            continue;
        }

        // back to original coordinates: points x = U x~, normals n = conj(U) n~
        std::vector<BitangentRecord> out;
        bool ok = true;
        for (const auto& rec : unique) {
            BitangentRecord b;
            Eigen::Vector3cd n = U.conjugate() * rec.normal;
            b.line = HomogeneousForm::line(n).normalized();
            Eigen::Vector3cd p = U * rec.p, r = U * rec.r;
            VecC pv(3), rv(3);
            pv << p(0), p(1), p(2);
            rv << r(0), r(1), r(2);
            std::array<ProjPoint, 2> contacts{ProjPoint(pv), ProjPoint(rv)};
            auto lessp = [](const ProjPoint& a, const ProjPoint& bpt) {
                for (int i = 0; i < 3; ++i) {
                    if (a.v(i).real() != bpt.v(i).real()) return a.v(i).real() < bpt.v(i).real();
                    if (a.v(i).imag() != bpt.v(i).imag()) return a.v(i).imag() < bpt.v(i).imag();
                }
                return false;
            };
            if (lessp(contacts[1], contacts[0])) std::swap(contacts[0], contacts[1]);
            b.contacts = contacts;
            b.residual = perfect_square_residual(F0, as3(b.contacts[0].v), as3(b.contacts[1].v),
                                                 b.line.line_normal());
            if (b.residual > profile.eps_residual) {
                ok = false;
                break;
            }
            out.push_back(std::move(b));
        }
        if (!ok) {
            last = "residual check failed after un-rotation";
            continue;
        }
        std::sort(out.begin(), out.end(), [](const BitangentRecord& a, const BitangentRecord& b) {
            for (int i = 0; i < 3; ++i) {
                if (a.line.coeffs(i).real() != b.line.coeffs(i).real())
                    return a.line.coeffs(i).real() < b.line.coeffs(i).real();
                if (a.line.coeffs(i).imag() != b.line.coeffs(i).imag())
                    return a.line.coeffs(i).imag() < b.line.coeffs(i).imag();
            }
            return false;
        });
        return out;
    }
    fail(ErrorCode::CountMismatch, "bitangents",
         "did not find exactly 28 bitangents after retries: " + last);
}

}  // namespace agm3
