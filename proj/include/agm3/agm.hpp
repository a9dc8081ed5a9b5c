#ifndef AGM3_AGM_HPP
#define AGM3_AGM_HPP

#include "agm3/configuration.hpp"

namespace agm3 {

/// Output of one AGM step: the dual configuration (E', Q', marked points),
/// the projection center t, the ramification points it produced, the dual
/// flag (with ranked partition candidates), and every rank certificate.
struct StepOutput {
    HomogeneousForm E_prime;
    HomogeneousForm Q_prime;
    std::array<ProjPoint, 6> q_prime;  // [s1, s2, ram1..ram4]
    ProjPoint t;
    std::array<ProjPoint, 4> ram;
    FlagSpec dual_flag;  // distinguished {0,1}; partition = ranked-best candidate
    std::array<std::array<std::pair<int, int>, 2>, 3> partition_candidates;
    std::vector<RankCertificate> certificates;
    RamificationReport report_in;   // tower pattern of the input configuration
    RamificationReport report_out;  // pattern of the output (types exchanged)
    bool flex_center = false;

    PlaneConfiguration as_configuration() const;
};

/// t = third intersection of line(q_a, q_b) with E; projection from t is the
/// double cover identifying the distinguished pair.
ProjPoint projection_center(const PlaneConfiguration& config, std::pair<int, int> pair,
                            const ToleranceProfile& profile);

struct RamPoints {
    std::array<ProjPoint, 4> points;
    bool flex_center = false;
};

/// Contact points of the tangent lines from t: E cap polar(E, t) minus t
/// taken twice. Generic: 4 distinct points; flex case flagged.
RamPoints ramification_points(const HomogeneousForm& E, const ProjPoint& t,
                              const ToleranceProfile& profile);

/// The unique cubic through t and the four ramification points, tangent at
/// the four non-distinguished marked points to their lines through t.
/// 13 row-conditions on 10 coefficients, numerical rank 9.
std::pair<HomogeneousForm, RankCertificate> fit_E_prime(const PlaneConfiguration& config,
                                                        const FlagSpec& flag, const ProjPoint& t,
                                                        const std::array<ProjPoint, 4>& ram,
                                                        const ToleranceProfile& profile);

struct QPrimeResult {
    HomogeneousForm Q_prime;
    ProjPoint s1, s2;
    RankCertificate cert;
};

/// The unique conic through the four ramification points and the two
/// residual points of line(q_a, q_b) cap E' (t excluded): 6 conditions on 6
/// coefficients with numerical rank 5. Also validates
/// Q' cap E' = {s1, s2, ram} as sets.
QPrimeResult fit_Q_prime(const PlaneConfiguration& config, const FlagSpec& flag,
                         const HomogeneousForm& E_prime, const ProjPoint& t,
                         const std::array<ProjPoint, 4>& ram, const ToleranceProfile& profile);

/// Full step: orchestrates center, ramification, tower checks and both fits;
/// validates the output pattern with the cc/c and c=/= roles exchanged.
StepOutput agm_step(const PlaneConfiguration& config, const FlagSpec& flag,
                    const ToleranceProfile& profile);

struct RoundTrip {
    StepOutput forward;
    StepOutput back;  // computed with the best-ranked dual partition
    double e_distance = 0.0;
    double q_distance = 0.0;
    double point_distance = 0.0;  // max over matched marked points
    double t_distance = 0.0;
    std::array<double, 3> candidate_residuals{};
    int best_candidate = 0;
};

/// Apply the step, then apply it again with the dual flag and compare with
/// the original configuration. The three dual-partition candidates are
/// ranked by this residual (they tie: the plane recipe never consumes the
/// partition; ties break by canonical order).
RoundTrip roundtrip_check(const PlaneConfiguration& config, const FlagSpec& flag,
                          const ToleranceProfile& profile);

/// Negative control: run the return step with an explicitly chosen (wrong)
/// distinguished pair on the dual marked points.
RoundTrip roundtrip_with_pair(const PlaneConfiguration& config, const FlagSpec& flag,
                              std::pair<int, int> dual_pair, const ToleranceProfile& profile);

/// max distance between two marked-point sets under greedy matching
double marked_set_distance(const std::array<ProjPoint, 6>& a, const std::array<ProjPoint, 6>& b);

}  // namespace agm3

#endif
