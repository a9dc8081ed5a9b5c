#include "agm3/projective.hpp"

#include "agm3/errors.hpp"

namespace agm3 {

VecC canonicalize_vector(VecC raw) {
    double n = raw.norm();
    if (!(n > 0)) fail(ErrorCode::ZeroForm, "canonicalize", "all coordinates zero");
    // idempotent: an already-canonical vector must come back bit-identical,
    // or serialization round trips drift by an ulp per pass
    if (std::abs(n - 1.0) > 4e-16) raw /= n;
    int imax = 0;
    double best = -1.0;
    for (int i = 0; i < raw.size(); ++i) {
        double a = std::abs(raw(i));
        if (a > best * (1.0 + 1e-12)) {
            best = a;
            imax = i;
        }
    }
    if (raw(imax).imag() != 0.0 || raw(imax).real() < 0.0) {
        Cx phase = raw(imax) / std::abs(raw(imax));
        raw *= std::conj(phase);
        // scrub the forced coordinate's imaginary dust so reruns are bit-stable
        raw(imax) = Cx(std::abs(raw(imax)), 0.0);
    }
    return raw;
}

VecC ProjPoint::canonicalize(VecC raw) { return canonicalize_vector(std::move(raw)); }

double projective_distance(const VecC& a, const VecC& b) {
    if (a.size() != b.size()) return 1.0;
    VecC u = a / a.norm(), w = b / b.norm();
    Cx ip = w.dot(u);  // <w, u>, conjugate-linear in w
    double c = std::abs(ip);
    if (c < 1e-300) return std::sqrt(2.0);
    // direct phase-aligned difference: sqrt(2 - 2|ip|) cancels catastrophically
    // near coincidence and would floor small distances to zero
    return (u - (ip / c) * w).norm();
}

double ProjPoint::distance(const ProjPoint& a, const ProjPoint& b) {
    return projective_distance(a.v, b.v);
}

Eigen::Matrix3cd random_unitary3(Rng& rng) {
    Eigen::Matrix3cd A;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) A(i, j) = rng.next_complex();
    Eigen::HouseholderQR<Eigen::Matrix3cd> qr(A);
    Eigen::Matrix3cd Q = qr.householderQ();
    return Q;
}

Eigen::Matrix2cd random_unitary2(Rng& rng) {
    Eigen::Matrix2cd A;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) A(i, j) = rng.next_complex();
    Eigen::HouseholderQR<Eigen::Matrix2cd> qr(A);
    return qr.householderQ();
}

}  // namespace agm3
