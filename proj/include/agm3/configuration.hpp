#ifndef AGM3_CONFIGURATION_HPP
#define AGM3_CONFIGURATION_HPP

#include "agm3/quartic.hpp"

namespace agm3 {

/// Pencil of conics through the 4 contact points of the representative
/// bitangent pair. Its residual intersections with the quartic sweep the
/// degree-4 pencil attached to the 2-torsion class: because the class has
/// order two, the residual system is the same no matter which member pair
/// supplies the base divisor, so any representative yields the same fibers.
struct PencilOfConics {
    std::array<HomogeneousForm, 2> basis;  // orthonormal coefficient vectors
    std::array<ProjPoint, 4> base_points;
    RankCertificate cert;
};

/// The plane data the AGM step transforms: cubic E, conic Q and the six
/// marked points q_i = l_{i,1} cap l_{i,2}.
struct PlaneConfiguration {
    HomogeneousForm E;
    HomogeneousForm Q;
    std::array<ProjPoint, 6> q;
    std::vector<RankCertificate> certificates;
    double held_out_residual = 0.0;  // cross points not used in the E fit
    double q_incidence_residual = 0.0;
};

/// P^3 model: the double cover of the cubic branched at the six marked
/// points, canonically embedded as Q2 cap Q3 with Q2 = f_Q + x3^2 and Q3
/// the cone over f_E (vertex (0:0:0:1)). A smooth (2,3) complete
/// intersection has genus 4; the plane cubic below it has genus 1.
struct SpaceCurveModel {
    HomogeneousForm Q2;  // 4 variables, degree 2
    HomogeneousForm Q3;  // 4 variables, degree 3, x3-free
};

enum class TowerType {
    BothBranchedEtale,     // cc/=  : both points of the fiber branch in Y/E
    BothBranchedRamified,  // cc/c  : E -> P1 ramifies (tangent line from t)
    OneBranchedEtale,      // c=/=  : exactly one marked point on the fiber
};

const char* tower_type_label(TowerType t);

struct TowerLine {
    TowerType type;
    HomogeneousForm line;
    Cx mu0, mu1;  // coordinates of the line in the pencil through t
};

struct RamificationReport {
    int count_cc_e = 0;
    int count_cc_c = 0;
    int count_ce_e = 0;
    bool distinct = true;
    bool flex_center = false;  // t itself among the ramification points
    std::vector<TowerLine> lines;
};

struct FiberResult {
    std::array<ProjPoint, 4> points;
    bool branch = false;  // two moving points collided (branch fiber)
};

/// Conics through the representative pair's 4 contact points (nullity-2
/// interpolation), with the degenerate member l1*l2 verified inside the span.
PencilOfConics build_pencil(const Quartic& C, const std::vector<BitangentRecord>& bt,
                            const TwoTorsionClass& cls, const ToleranceProfile& profile);

/// Residual intersection of the member lambda0*b0 + lambda1*b1 with C after
/// removing the base points.
FiberResult pencil_fiber(const Quartic& C, const PencilOfConics& pencil, Cx lambda0, Cx lambda1,
                         const ToleranceProfile& profile);

/// Full extraction: marked points from the 6 pairs, conic through them, and
/// the cubic E interpolated through pencil-fiber cross points, with held-out
/// validation fibers.
PlaneConfiguration extract_configuration(const Quartic& C, const std::vector<BitangentRecord>& bt,
                                         const TwoTorsionClass& cls,
                                         const ToleranceProfile& profile);

SpaceCurveModel build_space_model(const PlaneConfiguration& config,
                                  const ToleranceProfile& profile);

/// Classify the nine supporting pencil lines through t and enforce the
/// generic pattern: counts (1, 4, 4), all lines distinct. Line collisions
/// throw NonGeneric with the colliding labels.
RamificationReport verify_tower_pattern(const PlaneConfiguration& config, const FlagSpec& flag,
                                        const ProjPoint& t, const std::array<ProjPoint, 4>& ram,
                                        const ToleranceProfile& profile);

/// lift a P^2 form to the x3-free form in P^3
HomogeneousForm embed_cone(const HomogeneousForm& f);

}  // namespace agm3

#endif
