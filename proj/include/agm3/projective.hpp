#ifndef AGM3_PROJECTIVE_HPP
#define AGM3_PROJECTIVE_HPP

#include <Eigen/Dense>
#include <complex>

#include "agm3/linalg.hpp"
#include "agm3/rng.hpp"

namespace agm3 {

/// Point of P^2 or P^3, stored in canonical representative form:
/// unit Euclidean norm, coordinate of largest magnitude rotated to be real
/// and positive. Canonicalization makes equality testing and serialization
/// deterministic.
struct ProjPoint {
    VecC v;  // size 3 or 4

    ProjPoint() = default;
    explicit ProjPoint(VecC raw) : v(canonicalize(std::move(raw))) {}
    ProjPoint(Cx a, Cx b, Cx c) : ProjPoint((VecC(3) << a, b, c).finished()) {}

    int dim() const { return static_cast<int>(v.size()); }

    static VecC canonicalize(VecC raw);

    /// chordal distance: min over phases of || u - e^{i t} w ||, both unit
    static double distance(const ProjPoint& a, const ProjPoint& b);
};

/// Same canonical scaling for coefficient vectors of forms and lines.
VecC canonicalize_vector(VecC raw);
double projective_distance(const VecC& a, const VecC& b);

/// cross product: line through two P^2 points / point on two lines.
/// Written out because Eigen's cross() conjugates complex results, which is
/// the wrong (sesquilinear) product for projective incidence.
inline Eigen::Vector3cd cross3(const Eigen::Vector3cd& a, const Eigen::Vector3cd& b) {
    return Eigen::Vector3cd(a(1) * b(2) - a(2) * b(1), a(2) * b(0) - a(0) * b(2),
                            a(0) * b(1) - a(1) * b(0));
}

inline Eigen::Vector3cd as3(const VecC& v) { return Eigen::Vector3cd(v(0), v(1), v(2)); }

/// Seeded Haar-ish random unitary (QR of a random complex matrix);
/// used to rotate coordinates into general position.
Eigen::Matrix3cd random_unitary3(Rng& rng);
Eigen::Matrix2cd random_unitary2(Rng& rng);

}  // namespace agm3

#endif
