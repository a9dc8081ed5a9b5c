#ifndef AGM3_DIFFERENTIALS_HPP
#define AGM3_DIFFERENTIALS_HPP

#include "agm3/agm.hpp"

namespace agm3 {

/// Affine chart of P^2: a line at infinity plus two coordinate functionals.
/// The rows (z1, z2, V_infty) must form an invertible frame.
struct AffineChart {
    HomogeneousForm v_infty;  // degree 1
    HomogeneousForm z1, z2;   // degree 1 numerator functionals

    Eigen::Matrix3cd frame() const;  // rows z1, z2, v_infty
    void validate(const ToleranceProfile& profile) const;

    static AffineChart standard();  // z1 = x0, z2 = x1, infinity = x2
};

/// Poincare-residue representative l dz1 / (dk/dz2) of a holomorphic
/// differential on the quartic; the numerator is a linear form, the
/// denominator is symbolic (evaluated on demand).
struct ResidueForm {
    HomogeneousForm numerator;  // degree 1
    AffineChart chart;

    /// chart-coefficient value at a curve point: l(p) / (dk/dz2)(p), both in
    /// the chart's affine coordinates
    Cx coefficient_at(const HomogeneousForm& quartic, const ProjPoint& p) const;

    /// frame-independent evaluation against the canonical tangent vector of
    /// the curve at p: value * dz1(tangent)
    Cx evaluate(const HomogeneousForm& quartic, const ProjPoint& p) const;
};

/// Projective representative of the identification |K_C| = |K_C'|. In the
/// shared plane it is the identity; charts only change the frame in which it
/// is reported.
struct CanonicalIso {
    Eigen::Matrix3cd matrix;

    ProjPoint apply(const ProjPoint& p) const;
    HomogeneousForm apply_line(const HomogeneousForm& line) const;
    /// distance from the identity after projective normalization
    double off_identity() const;
};

/// The three coordinate residue forms x0, x1, x2 in the given chart;
/// numerators span the full 3-dimensional space of differentials.
std::array<ResidueForm, 3> residue_basis(const Quartic& C, const AffineChart& chart,
                                         const ToleranceProfile& profile);

/// The identification of the step's shared plane, reported from chart_in to
/// chart_out frames. Equal charts give the identity up to scale.
CanonicalIso canonical_iso(const StepOutput& step, const AffineChart& chart_in,
                           const AffineChart& chart_out);

/// Odd/even decomposition bookkeeping of the P^3 model: the even line is
/// dual to the plane {x3 = 0}, the odd 3-space is the hyperplanes through
/// the cone vertex (0:0:0:1).
struct OddSpaceReport {
    int even_dim = 1;
    int odd_dim = 3;
    HomogeneousForm plane_H;        // x3 (4 variables, degree 1)
    ProjPoint vertex;               // (0:0:0:1)
    double lifted_point_residual;   // worst residual of (q_i : 0) on Q2, Q3
    bool vertex_off_Q2 = true;
};

OddSpaceReport odd_space_report(const SpaceCurveModel& model, const PlaneConfiguration& config,
                                const ToleranceProfile& profile);

/// phi_Y on a line L in H: the plane in P^3 spanned by the vertex and L.
HomogeneousForm phi_Y_plane(const HomogeneousForm& line3);

}  // namespace agm3

#endif
