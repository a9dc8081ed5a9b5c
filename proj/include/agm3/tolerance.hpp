#ifndef AGM3_TOLERANCE_HPP
#define AGM3_TOLERANCE_HPP

#include <cstdint>

#include "agm3/errors.hpp"

namespace agm3 {

enum class Precision { Double, Extended };

inline const char* precision_name(Precision p) {
    return p == Precision::Double ? "double" : "extended";
}

/// Tolerance profile threaded through every operation. All epsilons are
/// relative and dimensionless; `seed` drives every random choice so that a
/// fixed (input, seed, precision) triple reproduces bit-identical output.
struct ToleranceProfile {
    double eps_point = 1e-9;     // geometric coincidence threshold
    double eps_rank = 1e-8;      // singular-value gap threshold
    double eps_residual = 1e-8;  // max acceptable constraint residual
    int max_newton_iters = 256;  // budget for all iterative refinements
    std::uint64_t seed = 0x9e3779b97f4a7c15ull;
    Precision precision = Precision::Double;

    void validate() const {
        auto bad = [](double e) { return !(e > 0.0 && e < 1.0); };
        if (bad(eps_point) || bad(eps_rank) || bad(eps_residual))
            fail(ErrorCode::UsageError, "tolerance", "epsilons must lie in (0,1)");
        if (max_newton_iters < 1)
            fail(ErrorCode::UsageError, "tolerance", "max_newton_iters must be positive");
    }

    /// Radius used when clustering nearby roots into multiple roots. Double
    /// roots computed in binary64 carry ~sqrt(eps) error, so the radius
    /// cannot be tighter than ~1e-6 regardless of eps_point.
    double cluster_radius() const {
        double r = 10.0 * eps_point;
        return r > 1e-6 ? r : 1e-6;
    }
};

}  // namespace agm3

#endif
