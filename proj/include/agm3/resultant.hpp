#ifndef AGM3_RESULTANT_HPP
#define AGM3_RESULTANT_HPP

#include "agm3/aberth.hpp"
#include "agm3/form.hpp"

namespace agm3 {

/// Root of a binary form, canonically normalized as a P^1 point.
struct ProjRoot {
    Cx s, t;
    int mult = 1;
};

/// All projective roots of a binary form with clustered multiplicities.
/// A seeded unitary change of (s,t) moves every root away from infinity;
/// escalation happens inside roots_univariate.
std::vector<ProjRoot> binary_roots(const BinaryForm& f, const ToleranceProfile& profile, Rng& rng);

double projroot_distance(const ProjRoot& a, const ProjRoot& b);

/// Resultant of two trivariate forms eliminating x_var, as a binary form in
/// the remaining variables (lower index first). Computed from Sylvester
/// determinants sampled on the unit circle and interpolated by DFT.
/// `identically_zero` reports a shared component.
BinaryForm resultant_form(const HomogeneousForm& F, const HomogeneousForm& G, int var,
                          bool& identically_zero);

struct ResultantOutput {
    UniPoly<double> poly;  // dehomogenized in the chart below
    int var_kept;          // univariate variable
    int var_chart;         // variable set to 1
    int degree_bound;      // deg f * deg g
};

/// Public numkernel op: resultant in an affine chart of the remaining
/// variables. Throws CommonComponent when the resultant vanishes identically.
ResultantOutput resultant_eliminate(const HomogeneousForm& F, const HomogeneousForm& G, int var,
                                    const ToleranceProfile& profile);

}  // namespace agm3

#endif
