#include "agm3/differentials.hpp"

namespace agm3 {

Eigen::Matrix3cd AffineChart::frame() const {
    Eigen::Matrix3cd M;
    M.row(0) = z1.line_normal();
    M.row(1) = z2.line_normal();
    M.row(2) = v_infty.line_normal();
    return M;
}

void AffineChart::validate(const ToleranceProfile& profile) const {
    (void)profile;
    Eigen::Matrix3cd M = frame();
    double d = std::abs(M.determinant());
    double scale = M.row(0).norm() * M.row(1).norm() * M.row(2).norm();
    if (d < 1e-10 * scale)
        fail(ErrorCode::ChartDegenerate, "affine_chart", "frame is (near) singular");
}

AffineChart AffineChart::standard() {
    AffineChart c;
    c.z1 = HomogeneousForm::line(Eigen::Vector3cd(1, 0, 0));
    c.z2 = HomogeneousForm::line(Eigen::Vector3cd(0, 1, 0));
    c.v_infty = HomogeneousForm::line(Eigen::Vector3cd(0, 0, 1));
    return c;
}

namespace {

/// (d k / d z2)(p) computed projectively: k is the dehomogenization of the
/// quartic in the chart; by the chain rule the derivative along the z2
/// functional is grad F . (frame^{-1} e2), up to the w-power that a shared
/// normalization removes.
Cx dk_dz2(const HomogeneousForm& quartic, const AffineChart& chart, const Eigen::Vector3cd& p_w1) {
    Eigen::Matrix3cd Minv = chart.frame().inverse();
    Eigen::Vector3cd dir = Minv.col(1);  // direction dual to z2
    Eigen::Vector3cd g = quartic.gradient_at(p_w1);
    return g(0) * dir(0) + g(1) * dir(1) + g(2) * dir(2);
}

/// representative of p scaled so v_infty(p) = 1
Eigen::Vector3cd chart_rep(const AffineChart& chart, const ProjPoint& p) {
    Eigen::Vector3cd x = as3(p.v);
    Cx w = chart.v_infty.eval(x);
    if (std::abs(w) < 1e-12)
        fail(ErrorCode::ChartDegenerate, "residue_form", "point on the line at infinity");
    return x / w;
}

}  // namespace

Cx ResidueForm::coefficient_at(const HomogeneousForm& quartic, const ProjPoint& p) const {
    Eigen::Vector3cd x = chart_rep(chart, p);
    Cx denom = dk_dz2(quartic, chart, x);
    if (std::abs(denom) < 1e-14)
        fail(ErrorCode::ChartDegenerate, "residue_form", "dk/dz2 vanishes at the point");
    return numerator.eval(x) / denom;
}

Cx ResidueForm::evaluate(const HomogeneousForm& quartic, const ProjPoint& p) const {
    // Everything is computed on ONE representative (the canonical one) so
    // that cross-chart comparisons see the same tangent vector at the same
    // point. Chasing the quotient rules through, all powers of w(p) cancel:
    //   value = l(p) * [z1(T) w(p) - z1(p) w(T)] / (grad F(p) . dir_z2)
    Eigen::Vector3cd pc = as3(p.v);
    Cx w = chart.v_infty.eval(pc);
    if (std::abs(w) < 1e-12)
        fail(ErrorCode::ChartDegenerate, "residue_form", "point on the line at infinity");
    Eigen::Vector3cd g = quartic.gradient_at(pc);
    Eigen::Vector3cd tangent = cross3(g, pc);
    double tn = tangent.norm();
    if (tn < 1e-14) fail(ErrorCode::NonGeneric, "residue_form", "singular point on the quartic");
    tangent /= tn;
    Cx bracket =
        chart.z1.eval(tangent) * w - chart.z1.eval(pc) * chart.v_infty.eval(tangent);
    Eigen::Matrix3cd Minv = chart.frame().inverse();
    Eigen::Vector3cd dir = Minv.col(1);
    Cx denom = g(0) * dir(0) + g(1) * dir(1) + g(2) * dir(2);
    if (std::abs(denom) < 1e-14)
        fail(ErrorCode::ChartDegenerate, "residue_form", "dk/dz2 vanishes at the point");
    return numerator.eval(pc) * bracket / denom;
}

std::array<ResidueForm, 3> residue_basis(const Quartic& C, const AffineChart& chart,
                                         const ToleranceProfile& profile) {
    chart.validate(profile);
    // guard against input corruption: dk/dz2 must not vanish identically
    Eigen::Matrix3cd Minv = chart.frame().inverse();
    Eigen::Vector3cd dir = Minv.col(1);
    auto grad = C.form.gradient();
    HomogeneousForm dk =
        grad[0].scaled(dir(0)) + grad[1].scaled(dir(1)) + grad[2].scaled(dir(2));
    if (dk.max_abs() < 1e-13 * C.form.max_abs())
        fail(ErrorCode::ChartDegenerate, "residue_basis", "dk/dz2 vanishes identically");

    std::array<ResidueForm, 3> basis;
    for (int i = 0; i < 3; ++i) {
        Eigen::Vector3cd e = Eigen::Vector3cd::Zero();
        e(i) = Cx(1);
        basis[i].numerator = HomogeneousForm::line(e);
        basis[i].chart = chart;
    }
    return basis;
}

ProjPoint CanonicalIso::apply(const ProjPoint& p) const {
    Eigen::Vector3cd x = matrix * as3(p.v);
    VecC v(3);
    v << x(0), x(1), x(2);
    return ProjPoint(std::move(v));
}

HomogeneousForm CanonicalIso::apply_line(const HomogeneousForm& line) const {
    Eigen::Vector3cd n = matrix.inverse().transpose() * line.line_normal();
    return HomogeneousForm::line(n).normalized();
}

double CanonicalIso::off_identity() const {
    // projective normalization: scale by the dominant diagonal entry
    int k = 0;
    for (int i = 1; i < 3; ++i)
        if (std::abs(matrix(i, i)) > std::abs(matrix(k, k))) k = i;
    if (std::abs(matrix(k, k)) < 1e-300) return 1.0;
    Eigen::Matrix3cd M = matrix / matrix(k, k);
    return (M - Eigen::Matrix3cd::Identity()).norm() / M.norm();
}

CanonicalIso canonical_iso(const StepOutput& step, const AffineChart& chart_in,
                           const AffineChart& chart_out) {
    (void)step;  // the identification is the identity of the shared plane
    CanonicalIso iso;
    iso.matrix = chart_out.frame() * chart_in.frame().inverse();
    return iso;
}

HomogeneousForm phi_Y_plane(const HomogeneousForm& line3) {
    // the plane through the vertex (0:0:0:1) and the line {n.x = 0, x3 = 0}
    // is the x3-free hyperplane with the same normal
    HomogeneousForm plane(4, 1);
    for (int i = 0; i < 3; ++i) plane.coeffs(i) = line3.coeffs(i);
    return plane;
}

OddSpaceReport odd_space_report(const SpaceCurveModel& model, const PlaneConfiguration& config,
                                const ToleranceProfile& profile) {
    (void)profile;
    OddSpaceReport rep;
    rep.plane_H = HomogeneousForm(4, 1);
    rep.plane_H.coeffs(3) = Cx(1);
    VecC vx(4);
    vx << Cx(0), Cx(0), Cx(0), Cx(1);
    rep.vertex = ProjPoint(std::move(vx));

    // lifted marked points (q_i : 0) on both quadric and cubic
    double worst = 0;
    for (const auto& q : config.q) {
        VecC lift(4);
        lift << q.v(0), q.v(1), q.v(2), Cx(0);
        double s2 = model.Q2.eval_scale(lift);
        double s3 = model.Q3.eval_scale(lift);
        worst = std::max(worst, std::abs(model.Q2.eval(lift)) / (s2 > 0 ? s2 : 1.0));
        worst = std::max(worst, std::abs(model.Q3.eval(lift)) / (s3 > 0 ? s3 : 1.0));
    }
    rep.lifted_point_residual = worst;

    // the vertex avoids Q2 whenever x3^2 has a healthy coefficient
    VecC vtx(4);
    vtx << Cx(0), Cx(0), Cx(0), Cx(1);
    rep.vertex_off_Q2 = std::abs(model.Q2.eval(vtx)) > 1e-6 * model.Q2.max_abs();
    rep.even_dim = 1;
    rep.odd_dim = 3;
    return rep;
}

}  // namespace agm3
