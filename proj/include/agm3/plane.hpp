#ifndef AGM3_PLANE_HPP
#define AGM3_PLANE_HPP

#include "agm3/resultant.hpp"

namespace agm3 {

struct IntersectionPoint {
    ProjPoint point;
    int multiplicity = 1;
};

/// Tangency datum for constrained interpolation: the fitted curve must pass
/// through `point` with tangent line `line` there. The point is required to
/// lie on the line (incidence then follows from the Euler relation).
struct TangencyConstraint {
    ProjPoint point;
    HomogeneousForm line;  // degree 1

    void validate(const ToleranceProfile& profile) const;
};

/// All intersection points of two plane curves with multiplicities summing
/// to deg F * deg G. Resultant elimination in a seeded rotated chart,
/// cross-checked against a second elimination order, then Newton-polished
/// (tangential points get a Jacobian-collinearity augmented Gauss-Newton).
std::vector<IntersectionPoint> intersect(const HomogeneousForm& F, const HomogeneousForm& G,
                                         const ToleranceProfile& profile);

/// Intersection of a curve with the line through A and B, as projective
/// parameters (s:t) on that line plus the located points.
std::vector<IntersectionPoint> intersect_with_line(const HomogeneousForm& F,
                                                   const Eigen::Vector3cd& A,
                                                   const Eigen::Vector3cd& B,
                                                   const ToleranceProfile& profile);

/// First polar of the cubic E at t: t0 d0E + t1 d1E + t2 d2E.
HomogeneousForm polar_conic(const HomogeneousForm& E, const ProjPoint& t,
                            const ToleranceProfile& profile);

/// Residual third point of E on the secant through p and q.
ProjPoint third_point(const HomogeneousForm& E, const ProjPoint& p, const ProjPoint& q,
                      const ToleranceProfile& profile);

/// Unique curve of degree d (2 or 3) through the given points with the given
/// tangencies: the 1-dimensional nullspace of the stacked linear system.
/// Over-determined consistent systems yield the rank certificate recording
/// the achieved gap. Throws AmbiguousRank when the nullity is not 1.
std::pair<HomogeneousForm, RankCertificate> fit_form_constrained(
    int degree, const std::vector<ProjPoint>& points,
    const std::vector<TangencyConstraint>& tangencies, const ToleranceProfile& profile,
    const std::string& label);

/// Line through two distinct points.
HomogeneousForm line_through(const ProjPoint& p, const ProjPoint& q,
                             const ToleranceProfile& profile);

/// |F(p)| relative to the natural evaluation scale; the standard
/// "is p on the curve" residual used everywhere.
double on_curve_residual(const HomogeneousForm& F, const ProjPoint& p);

/// Newton refinement of a transversal common point of two curves (affine
/// gauge through the initial point). Used as the seed polisher wherever a
/// point was located by elimination.
bool polish_point_on_two_curves(const HomogeneousForm& F, const HomogeneousForm& G,
                                Eigen::Vector3cd& x, int iters);

}  // namespace agm3

#endif
