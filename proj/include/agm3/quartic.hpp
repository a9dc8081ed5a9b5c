#ifndef AGM3_QUARTIC_HPP
#define AGM3_QUARTIC_HPP

#include <array>
#include <optional>

#include "agm3/plane.hpp"

namespace agm3 {

/// Smooth non-hyperelliptic genus-3 curve in its canonical plane model.
/// Smoothness is assumed and spot-checked at every special point we compute.
struct Quartic {
    HomogeneousForm form;  // degree 4, 3 variables, canonical normalization

    static Quartic from_form(const HomogeneousForm& f);
};

/// A bitangent line with its two contact points. `residual` is the
/// perfect-square defect of the quartic restricted to the line, relative to
/// the restriction's size.
struct BitangentRecord {
    HomogeneousForm line;  // degree 1, canonical
    std::array<ProjPoint, 2> contacts;
    double residual = 0.0;
};

/// All 28 bitangents, deterministically ordered by canonical line
/// coefficients. Throws CountMismatch if the count is not exactly 28 after
/// retries and precision escalation (singular or special quartic).
std::vector<BitangentRecord> bitangents(const Quartic& C, const ToleranceProfile& profile);

struct SyzygyResult {
    bool syzygetic = false;
    RankCertificate cert;
};

/// Classical syzygy test: do the 8 contact points of 4 distinct bitangents
/// lie on a conic (numerical rank <= 5 of the 8x6 interpolation matrix)?
SyzygyResult is_syzygetic(const BitangentRecord& a, const BitangentRecord& b,
                          const BitangentRecord& c, const BitangentRecord& d,
                          const ToleranceProfile& profile);

/// 2-torsion class represented extensionally by its Steiner complex:
/// the 6 unordered bitangent pairs of equal difference.
struct TwoTorsionClass {
    std::vector<std::pair<int, int>> pairs;  // 6 pairs, each i<j, sorted
    std::pair<int, int> representative;

    bool same_as(const TwoTorsionClass& o) const { return pairs == o.pairs; }
};

/// The Steiner complex through one bitangent pair: the 5 other pairs forming
/// syzygetic quadruples with it. Throws CountMismatch unless exactly 6.
TwoTorsionClass alpha_class(const std::vector<BitangentRecord>& bt, std::pair<int, int> pair,
                            const ToleranceProfile& profile);

/// Exhaustive classification of all 378 pairs into 63 classes of 6, plus the
/// Weil pairing and class addition resolved through shared bitangents.
struct ClassTable {
    std::vector<TwoTorsionClass> classes;        // 63, canonical order
    std::vector<std::vector<int>> class_of_pair;  // 28x28 (diagonal -1)

    int class_of(std::pair<int, int> p) const { return class_of_pair[p.first][p.second]; }
    /// class id of the sum a+b (std::nullopt encodes the zero class a == b)
    std::optional<int> sum(int a, int b, const std::vector<BitangentRecord>& bt) const;
};

ClassTable build_class_table(const std::vector<BitangentRecord>& bt,
                             const ToleranceProfile& profile);

/// Weil pairing value in F2. Representatives sharing a bitangent m are
/// chosen ({i,m} in a, {m,k} in b); e(a,b) = 0 iff the six contact points of
/// i, m, k lie on a conic. e(a,a) = 0 by the alternating property.
int weil_pairing(const std::vector<BitangentRecord>& bt, const TwoTorsionClass& a,
                 const TwoTorsionClass& b, const ToleranceProfile& profile);

/// Flag datum on the 6 marked points: a distinguished pair plus a partition
/// of the remaining four indices into two pairs. Indices are 0-based.
struct FlagSpec {
    std::pair<int, int> distinguished;
    std::array<std::pair<int, int>, 2> partition;

    void validate() const;
};

struct FlagEnumeration {
    std::vector<std::pair<int, int>> pairs;                          // 15
    std::vector<std::array<std::pair<int, int>, 3>> matchings;       // 15
    std::vector<FlagSpec> flags;                                     // 45
};

/// Pure combinatorics on 6 labels: 15 pairs, 15 perfect matchings, 45 flags.
FlagEnumeration enumerate_flags();

/// Map two explicit lines to bitangent indices (within eps_point), for CLI
/// alpha input given as line coefficients.
std::pair<int, int> match_bitangent_pair(const std::vector<BitangentRecord>& bt,
                                         const HomogeneousForm& l1, const HomogeneousForm& l2,
                                         const ToleranceProfile& profile);

}  // namespace agm3

#endif
