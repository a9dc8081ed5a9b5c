#include "agm3/configuration.hpp"

#include <algorithm>

namespace agm3 {

const char* tower_type_label(TowerType t) {
    switch (t) {
        case TowerType::BothBranchedEtale: return "cc/=";
        case TowerType::BothBranchedRamified: return "cc/c";
        case TowerType::OneBranchedEtale: return "c=/=";
    }
    return "?";
}

namespace {

Cx det3(const ProjPoint& a, const ProjPoint& b, const ProjPoint& c) {
    Eigen::Matrix3cd M;
    M.row(0) = as3(a.v);
    M.row(1) = as3(b.v);
    M.row(2) = as3(c.v);
    return M.determinant();
}

/// symmetric matrix of a conic, for degeneracy checks
Eigen::Matrix3cd conic_matrix(const HomogeneousForm& Q) {
    const auto& t = Q.table();
    Eigen::Matrix3cd M = Eigen::Matrix3cd::Zero();
    for (int m = 0; m < t.count(); ++m) {
        const auto& e = t.exps[m];
        Cx c = Q.coeffs(m);
        if (e[0] == 2) M(0, 0) += c;
        else if (e[1] == 2) M(1, 1) += c;
        else if (e[2] == 2) M(2, 2) += c;
        else if (e[0] == 1 && e[1] == 1) { M(0, 1) += c / 2.0; M(1, 0) += c / 2.0; }
        else if (e[0] == 1 && e[2] == 1) { M(0, 2) += c / 2.0; M(2, 0) += c / 2.0; }
        else { M(1, 2) += c / 2.0; M(2, 1) += c / 2.0; }
    }
    return M;
}

MatC interpolation_rows(const std::vector<ProjPoint>& pts, int degree) {
    const auto& table = MonomialTable::get(3, degree);
    MatC M(static_cast<int>(pts.size()), table.count());
    for (int r = 0; r < static_cast<int>(pts.size()); ++r) {
        for (int m = 0; m < table.count(); ++m) {
            const auto& e = table.exps[m];
            Cx v(1);
            for (int i = 0; i < 3; ++i)
                for (int k = 0; k < e[i]; ++k) v *= pts[r].v(i);
            M(r, m) = v;
        }
        M.row(r) /= M.row(r).norm();
    }
    return M;
}

}  // namespace

PencilOfConics build_pencil(const Quartic& C, const std::vector<BitangentRecord>& bt,
                            const TwoTorsionClass& cls, const ToleranceProfile& profile) {
    (void)C;
    auto [i, j] = cls.representative;
    const BitangentRecord& l1 = bt[i];
    const BitangentRecord& l2 = bt[j];
    std::array<ProjPoint, 4> base{l1.contacts[0], l1.contacts[1], l2.contacts[0], l2.contacts[1]};

    // no 3 of the 4 contact points collinear
    for (int a = 0; a < 4; ++a)
        for (int b = a + 1; b < 4; ++b)
            for (int c = b + 1; c < 4; ++c)
                if (std::abs(det3(base[a], base[b], base[c])) < 1e3 * profile.eps_point)
                    fail(ErrorCode::NonGeneric, "build_pencil",
                         "three contact points nearly collinear");

    MatC M = interpolation_rows({base.begin(), base.end()}, 2);
    NullspaceResult ns = nullspace(M, profile, "pencil_4pts", 2);

    PencilOfConics pencil;
    pencil.cert = ns.cert;
    pencil.base_points = base;
    for (int k = 0; k < 2; ++k) {
        HomogeneousForm f(3, 2);
        f.coeffs = ns.basis.col(k);
        pencil.basis[k] = f;
    }

    // the split member l1*l2 must lie in the span
    HomogeneousForm split = (l1.line * l2.line).normalized();
    VecC v = split.coeffs;
    VecC proj = VecC::Zero(6);
    for (int k = 0; k < 2; ++k)
        proj += pencil.basis[k].coeffs * (pencil.basis[k].coeffs.adjoint() * v)(0);
    if ((v - proj).norm() > profile.eps_residual)
        fail(ErrorCode::NonGeneric, "build_pencil", "split member escapes the pencil");
    return pencil;
}

FiberResult pencil_fiber(const Quartic& C, const PencilOfConics& pencil, Cx lambda0, Cx lambda1,
                         const ToleranceProfile& profile) {
    HomogeneousForm S = pencil.basis[0].scaled(lambda0) + pencil.basis[1].scaled(lambda1);
    double dg = std::abs(conic_matrix(S).determinant()) / std::pow(S.coeffs.norm(), 3);
    if (dg < 1e-6)
        fail(ErrorCode::NonGeneric, "pencil_fiber", "member is (near) degenerate");

    auto pts = intersect(S, C.form, profile);
    // remove the 4 base points once each
    std::vector<ProjPoint> moving;
    std::array<bool, 4> used{false, false, false, false};
    for (const auto& ip : pts) {
        int hit = -1;
        for (int b = 0; b < 4; ++b)
            if (!used[b] && ProjPoint::distance(ip.point, pencil.base_points[b]) < 1e-5) {
                hit = b;
                break;
            }
        if (hit >= 0) {
            used[hit] = true;
            for (int extra = 1; extra < ip.multiplicity; ++extra) moving.push_back(ip.point);
        } else {
            for (int extra = 0; extra < ip.multiplicity; ++extra) moving.push_back(ip.point);
        }
    }
    if (moving.size() != 4 || !(used[0] && used[1] && used[2] && used[3]))
        fail(ErrorCode::NonGeneric, "pencil_fiber",
             "base points not cleanly separated from the moving divisor");

    FiberResult res;
    std::copy_n(moving.begin(), 4, res.points.begin());
    for (int a = 0; a < 4; ++a)
        for (int b = a + 1; b < 4; ++b)
            if (ProjPoint::distance(res.points[a], res.points[b]) < 1e3 * profile.eps_point)
                res.branch = true;
    return res;
}

PlaneConfiguration extract_configuration(const Quartic& C, const std::vector<BitangentRecord>& bt,
                                         const TwoTorsionClass& cls,
                                         const ToleranceProfile& profile) {
    PlaneConfiguration config;

    // marked points: intersections of the 6 pairs
    for (int k = 0; k < 6; ++k) {
        auto [i, j] = cls.pairs[k];
        Eigen::Vector3cd x = cross3(bt[i].line.line_normal(), bt[j].line.line_normal());
        if (x.norm() < 1e-12)
            fail(ErrorCode::NonGeneric, "extract_configuration", "parallel pair lines");
        VecC v(3);
        v << x(0), x(1), x(2);
        config.q[k] = ProjPoint(std::move(v));
    }
    for (int a = 0; a < 6; ++a)
        for (int b = a + 1; b < 6; ++b)
            if (ProjPoint::distance(config.q[a], config.q[b]) < 1e3 * profile.eps_point)
                fail(ErrorCode::NonGeneric, "extract_configuration", "marked points collide");

    // conic through the six marked points (rank 5 certificate)
    std::vector<ProjPoint> qv(config.q.begin(), config.q.end());
    auto [Q, qcert] = fit_form_constrained(2, qv, {}, profile, "conic_Q_6pts");
    config.Q = Q;
    config.certificates.push_back(qcert);

    // sample pencil fibers; cross points of the three 2+2 splits lie on E
    PencilOfConics pencil = build_pencil(C, bt, cls, profile);
    config.certificates.push_back(pencil.cert);

    Rng rng(profile.seed ^ 0xf1be55edUL);
    std::vector<ProjPoint> cross_fit, cross_holdout;
    int fibers = 0, guard = 0;
    while (fibers < 7 && guard < 60) {
        ++guard;
        Cx l0(1.0, 0.0), l1 = rng.next_complex();
        FiberResult fib;
        try {
            fib = pencil_fiber(C, pencil, l0, l1, profile);
        } catch (const Error& e) {
            if (e.code() == ErrorCode::NonGeneric) continue;  // resample
            throw;
        }
        if (fib.branch) continue;
        const auto& p = fib.points;
        static const int splits[3][4] = {{0, 1, 2, 3}, {0, 2, 1, 3}, {0, 3, 1, 2}};
        bool ok = true;
        std::vector<ProjPoint> crosses;
        for (const auto& s : splits) {
            Eigen::Vector3cd la = cross3(as3(p[s[0]].v), as3(p[s[1]].v));
            Eigen::Vector3cd lb = cross3(as3(p[s[2]].v), as3(p[s[3]].v));
            Eigen::Vector3cd x = cross3(la, lb);
            if (x.norm() < 1e-10) {
                ok = false;
                break;
            }
            VecC v(3);
            v << x(0), x(1), x(2);
            crosses.emplace_back(std::move(v));
        }
        if (!ok) continue;
        auto& sink = (fibers < 5) ? cross_fit : cross_holdout;
        sink.insert(sink.end(), crosses.begin(), crosses.end());
        ++fibers;
    }
    if (fibers < 7)
        fail(ErrorCode::NonGeneric, "extract_configuration",
             "could not sample enough generic pencil fibers");

    std::vector<ProjPoint> epts = cross_fit;
    epts.insert(epts.end(), config.q.begin(), config.q.end());
    auto [E, ecert] = fit_form_constrained(3, epts, {}, profile, "cubic_E_21pts");
    config.E = E;
    config.certificates.push_back(ecert);

    // validations
    double worst_q = 0;
    for (const auto& p : config.q) {
        worst_q = std::max(worst_q, on_curve_residual(config.E, p));
        worst_q = std::max(worst_q, on_curve_residual(config.Q, p));
        double gnorm = config.E.gradient_at(as3(p.v)).norm();
        if (gnorm < 1e-6 * config.E.max_abs())
            fail(ErrorCode::NonGeneric, "extract_configuration", "E singular at a marked point");
    }
    config.q_incidence_residual = worst_q;
    double held = 0;
    for (const auto& p : cross_holdout) held = std::max(held, on_curve_residual(config.E, p));
    config.held_out_residual = held;

    // Q cap E must be exactly the six marked points, all simple
    auto qe = intersect(config.Q, config.E, profile);
    if (qe.size() != 6)
        fail(ErrorCode::NonGeneric, "extract_configuration", "Q cap E is not six simple points");
    std::array<bool, 6> matched{};
    for (const auto& ip : qe) {
        if (ip.multiplicity != 1)
            fail(ErrorCode::NonGeneric, "extract_configuration", "Q tangent to E");
        for (int k = 0; k < 6; ++k)
            if (!matched[k] && ProjPoint::distance(ip.point, config.q[k]) < 1e-6) {
                matched[k] = true;
                break;
            }
    }
    for (bool m : matched)
        if (!m)
            fail(ErrorCode::NonGeneric, "extract_configuration",
                 "Q cap E does not reproduce the marked points");
    return config;
}

HomogeneousForm embed_cone(const HomogeneousForm& f) {
    HomogeneousForm g(4, f.degree);
    const auto& t3 = f.table();
    const auto& t4 = g.table();
    for (int m = 0; m < t3.count(); ++m) {
        auto e = t3.exps[m];  // e[3] == 0 already
        g.coeffs(t4.index(e)) = f.coeffs(m);
    }
    return g;
}

SpaceCurveModel build_space_model(const PlaneConfiguration& config,
                                  const ToleranceProfile& profile) {
    (void)profile;
    SpaceCurveModel model;
    HomogeneousForm x3sq(4, 2);
    x3sq.coeffs(x3sq.table().index({0, 0, 0, 2})) = Cx(1);
    model.Q2 = embed_cone(config.Q.normalized()) + x3sq;
    model.Q3 = embed_cone(config.E.normalized());
    return model;
}

RamificationReport verify_tower_pattern(const PlaneConfiguration& config, const FlagSpec& flag,
                                        const ProjPoint& t, const std::array<ProjPoint, 4>& ram,
                                        const ToleranceProfile& profile) {
    flag.validate();
    const auto [a, b] = flag.distinguished;
    RamificationReport rep;

    // incidence sanity: t on E, ram on E with tangent through t
    if (on_curve_residual(config.E, t) > 1e3 * profile.eps_residual)
        fail(ErrorCode::NonGeneric, "verify_tower", "t is not on E");
    for (const auto& r : ram) {
        if (on_curve_residual(config.E, r) > 1e3 * profile.eps_residual)
            fail(ErrorCode::NonGeneric, "verify_tower", "ramification point off E");
        Eigen::Vector3cd g = config.E.gradient_at(as3(r.v));
        Cx inc = g(0) * t.v(0) + g(1) * t.v(1) + g(2) * t.v(2);
        if (std::abs(inc) > 1e-6 * g.norm())
            fail(ErrorCode::NonGeneric, "verify_tower", "tangent at ram point misses t");
    }
    for (int k = 0; k < 4; ++k) {
        if (ProjPoint::distance(ram[k], t) < 1e3 * profile.eps_point) rep.flex_center = true;
        for (int l = k + 1; l < 4; ++l)
            if (ProjPoint::distance(ram[k], ram[l]) < 1e3 * profile.eps_point)
                fail(ErrorCode::NonGeneric, "verify_tower", "ramification points collide");
    }
    // t must avoid the marked points
    for (const auto& qq : config.q)
        if (ProjPoint::distance(qq, t) < 1e3 * profile.eps_point)
            fail(ErrorCode::NonGeneric, "verify_tower", "t collides with a marked point");

    // the nine supporting lines
    std::vector<std::pair<TowerType, HomogeneousForm>> lines;
    HomogeneousForm Lab = line_through(config.q[a], config.q[b], profile);
    {
        // t lies on it by construction of the projection center
        double inc = std::abs(Lab.eval(as3(t.v)));
        if (inc > 1e-6)
            fail(ErrorCode::NonGeneric, "verify_tower", "t off the distinguished secant");
        // the cc/= line must not be tangent to E at either marked point
        for (int idx : {a, b}) {
            Eigen::Vector3cd g = config.E.gradient_at(as3(config.q[idx].v));
            if (cross3(g.normalized(), Lab.line_normal().normalized()).norm() <
                1e3 * profile.eps_point)
                fail(ErrorCode::NonGeneric, "verify_tower",
                     "distinguished secant tangent to E at a marked point");
        }
        lines.push_back({TowerType::BothBranchedEtale, Lab});
    }
    for (const auto& r : ram) {
        if (ProjPoint::distance(r, t) < 1e3 * profile.eps_point) {
            // flex center: the supporting line is the tangent at t itself
            Eigen::Vector3cd g = config.E.gradient_at(as3(t.v));
            lines.push_back({TowerType::BothBranchedRamified, HomogeneousForm::line(g).normalized()});
            continue;
        }
        lines.push_back({TowerType::BothBranchedRamified, line_through(t, r, profile)});
    }
    std::vector<int> others;
    for (int k = 0; k < 6; ++k)
        if (k != a && k != b) others.push_back(k);
    for (int k : others)
        lines.push_back({TowerType::OneBranchedEtale, line_through(t, config.q[k], profile)});

    // pairwise distinctness of all supporting lines
    for (size_t i = 0; i < lines.size(); ++i)
        for (size_t j = i + 1; j < lines.size(); ++j)
            if (form_distance(lines[i].second, lines[j].second) < 1e4 * profile.eps_point)
                fail(ErrorCode::NonGeneric, "verify_tower",
                     std::string("supporting lines collide: ") +
                         tower_type_label(lines[i].first) + " vs " +
                         tower_type_label(lines[j].first));

    // pencil coordinates of each line: basis of the dual pencil through t
    Eigen::Vector3cd u0, u1;
    {
        Eigen::Vector3cd tv = as3(t.v);
        Eigen::Vector3cd cand[3] = {cross3(tv, Eigen::Vector3cd(1, 0, 0)),
                                    cross3(tv, Eigen::Vector3cd(0, 1, 0)),
                                    cross3(tv, Eigen::Vector3cd(0, 0, 1))};
        int best = 0;
        for (int k = 1; k < 3; ++k)
            if (cand[k].norm() > cand[best].norm()) best = k;
        u0 = cand[best].normalized();
        u1 = cand[(best + 1) % 3] - u0 * (u0.adjoint() * cand[(best + 1) % 3])(0);
        if (u1.norm() < 1e-10)
            u1 = cand[(best + 2) % 3] - u0 * (u0.adjoint() * cand[(best + 2) % 3])(0);
        u1.normalize();
    }
    for (auto& [type, line] : lines) {
        Eigen::Vector3cd n = line.line_normal().normalized();
        TowerLine tl;
        tl.type = type;
        tl.line = line;
        tl.mu0 = u0.dot(n);
        tl.mu1 = u1.dot(n);
        rep.lines.push_back(tl);
        if (type == TowerType::BothBranchedEtale) ++rep.count_cc_e;
        if (type == TowerType::BothBranchedRamified) ++rep.count_cc_c;
        if (type == TowerType::OneBranchedEtale) ++rep.count_ce_e;
    }
    rep.distinct = true;
    if (rep.count_cc_e != 1 || rep.count_cc_c != 4 || rep.count_ce_e != 4)
        fail(ErrorCode::NonGeneric, "verify_tower", "ramification pattern is not (1,4,4)");
    return rep;
}

}  // namespace agm3
