#include "agm3/quartic.hpp"

#include <algorithm>
#include <set>

namespace agm3 {

Quartic Quartic::from_form(const HomogeneousForm& f) {
    if (f.nvars != 3 || f.degree != 4)
        fail(ErrorCode::UsageError, "quartic", "expected a plane quartic form");
    if (f.max_abs() == 0.0) fail(ErrorCode::ZeroForm, "quartic", "zero form");
    return Quartic{f.normalized()};
}

namespace {

MatC conic_interp_matrix(const std::vector<ProjPoint>& pts) {
    const auto& table = MonomialTable::get(3, 2);
    MatC M(static_cast<int>(pts.size()), 6);
    for (int r = 0; r < static_cast<int>(pts.size()); ++r) {
        for (int m = 0; m < 6; ++m) {
            const auto& e = table.exps[m];
            Cx v(1);
            for (int i = 0; i < 3; ++i)
                for (int k = 0; k < e[i]; ++k) v *= pts[r].v(i);
            M(r, m) = v;
        }
        M.row(r) /= M.row(r).norm();
    }
    return M;
}

/// rank decision for "do these points lie on a conic"
SyzygyResult conic_rank_test(const std::vector<ProjPoint>& pts, const ToleranceProfile& profile,
                             const std::string& label) {
    MatC M = conic_interp_matrix(pts);
    auto ns = nullspace(M, profile, label);
    SyzygyResult res;
    res.cert = ns.cert;
    res.syzygetic = ns.cert.claimed_rank <= 5;
    return res;
}

}  // namespace

SyzygyResult is_syzygetic(const BitangentRecord& a, const BitangentRecord& b,
                          const BitangentRecord& c, const BitangentRecord& d,
                          const ToleranceProfile& profile) {
    std::vector<ProjPoint> pts;
    for (const BitangentRecord* r : {&a, &b, &c, &d}) {
        pts.push_back(r->contacts[0]);
        pts.push_back(r->contacts[1]);
    }
    for (size_t i = 0; i < pts.size(); ++i)
        for (size_t j = i + 1; j < pts.size(); ++j)
            if (ProjPoint::distance(pts[i], pts[j]) <= profile.eps_point)
                fail(ErrorCode::NonGeneric, "is_syzygetic", "coincident contact points");
    return conic_rank_test(pts, profile, "syzygy_8pts");
}

TwoTorsionClass alpha_class(const std::vector<BitangentRecord>& bt, std::pair<int, int> pair,
                            const ToleranceProfile& profile) {
    const int n = static_cast<int>(bt.size());
    auto [i, j] = pair;
    if (i == j || i < 0 || j < 0 || i >= n || j >= n)
        fail(ErrorCode::UsageError, "alpha_class", "bad bitangent pair");
    if (i > j) std::swap(i, j);

    std::vector<std::pair<int, int>> members{{i, j}};
    for (int k = 0; k < n; ++k) {
        if (k == i || k == j) continue;
        for (int l = k + 1; l < n; ++l) {
            if (l == i || l == j) continue;
            auto res = is_syzygetic(bt[i], bt[j], bt[k], bt[l], profile);
            if (res.syzygetic) members.push_back({k, l});
        }
    }
    if (members.size() != 6)
        fail(ErrorCode::CountMismatch, "alpha_class",
             "Steiner complex has " + std::to_string(members.size()) + " pairs, expected 6");
    // the 6 pairs carry the 12 effective odd theta characteristics: all
    // twelve bitangents must be distinct
    std::set<int> seen;
    for (const auto& [a, b] : members) {
        seen.insert(a);
        seen.insert(b);
    }
    if (seen.size() != 12)
        fail(ErrorCode::CountMismatch, "alpha_class",
             "Steiner complex does not carry 12 distinct bitangents");
    std::sort(members.begin(), members.end());
    TwoTorsionClass cls;
    cls.pairs = std::move(members);
    cls.representative = {i, j};
    return cls;
}

ClassTable build_class_table(const std::vector<BitangentRecord>& bt,
                             const ToleranceProfile& profile) {
    const int n = static_cast<int>(bt.size());
    ClassTable t;
    t.class_of_pair.assign(n, std::vector<int>(n, -1));
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            if (t.class_of_pair[i][j] >= 0) continue;
            TwoTorsionClass cls = alpha_class(bt, {i, j}, profile);
            int id = static_cast<int>(t.classes.size());
            for (const auto& [a, b] : cls.pairs) {
                if (t.class_of_pair[a][b] >= 0)
                    fail(ErrorCode::CountMismatch, "class_table",
                         "pair assigned to two Steiner complexes");
                t.class_of_pair[a][b] = id;
                t.class_of_pair[b][a] = id;
            }
            t.classes.push_back(std::move(cls));
        }
    if (t.classes.size() != 63)
        fail(ErrorCode::CountMismatch, "class_table",
             "expected 63 classes, found " + std::to_string(t.classes.size()));
    return t;
}

namespace {

/// shared bitangent between two Steiner complexes, with its partners
bool shared_representatives(const TwoTorsionClass& a, const TwoTorsionClass& b, int& i, int& m,
                            int& k) {
    for (const auto& [p, q] : a.pairs)
        for (const auto& [r, s] : b.pairs) {
            if (p == r) { m = p; i = q; k = s; return true; }
            if (p == s) { m = p; i = q; k = r; return true; }
            if (q == r) { m = q; i = p; k = s; return true; }
            if (q == s) { m = q; i = p; k = r; return true; }
        }
    return false;
}

}  // namespace

int weil_pairing(const std::vector<BitangentRecord>& bt, const TwoTorsionClass& a,
                 const TwoTorsionClass& b, const ToleranceProfile& profile) {
    if (a.same_as(b)) return 0;
    int i = -1, m = -1, k = -1;
    if (!shared_representatives(a, b, i, m, k))
        fail(ErrorCode::CountMismatch, "weil_pairing",
             "Steiner complexes share no bitangent (classification inconsistent)");
    std::vector<ProjPoint> pts;
    for (int idx : {i, m, k}) {
        pts.push_back(bt[idx].contacts[0]);
        pts.push_back(bt[idx].contacts[1]);
    }
    auto res = conic_rank_test(pts, profile, "weil_6pts");
    return res.syzygetic ? 0 : 1;
}

std::optional<int> ClassTable::sum(int a, int b, const std::vector<BitangentRecord>& bt) const {
    (void)bt;
    if (a == b) return std::nullopt;  // the zero class
    int i = -1, m = -1, k = -1;
    if (!shared_representatives(classes[a], classes[b], i, m, k))
        fail(ErrorCode::CountMismatch, "class_sum", "no shared bitangent");
    // (theta_i - theta_m) + (theta_m - theta_k) = theta_i - theta_k
    return class_of({std::min(i, k), std::max(i, k)});
}

void FlagSpec::validate() const {
    std::set<int> seen{distinguished.first, distinguished.second};
    for (const auto& [a, b] : partition) {
        seen.insert(a);
        seen.insert(b);
    }
    if (seen.size() != 6 || *seen.begin() < 0 || *seen.rbegin() > 5)
        fail(ErrorCode::UsageError, "flag",
             "flag must partition {1..6} into a distinguished pair and two pairs");
}

FlagEnumeration enumerate_flags() {
    FlagEnumeration e;
    for (int i = 0; i < 6; ++i)
        for (int j = i + 1; j < 6; ++j) e.pairs.push_back({i, j});
    // perfect matchings of {0..5}: 0 picks a partner (5 ways), then the
    // smallest remaining label picks one of 3
    for (int a = 1; a < 6; ++a) {
        std::vector<int> r1;
        for (int x = 1; x < 6; ++x)
            if (x != a) r1.push_back(x);
        int s = r1[0];
        for (int t = 1; t < 4; ++t) {
            std::vector<int> r2;
            for (int x : r1)
                if (x != s && x != r1[t]) r2.push_back(x);
            e.matchings.push_back({std::pair<int, int>{0, a}, {s, r1[t]}, {r2[0], r2[1]}});
        }
    }
    for (const auto& m : e.matchings)
        for (int d = 0; d < 3; ++d) {
            FlagSpec f;
            f.distinguished = m[d];
            int slot = 0;
            for (int o = 0; o < 3; ++o)
                if (o != d) f.partition[slot++] = m[o];
            e.flags.push_back(f);
        }
    return e;
}

std::pair<int, int> match_bitangent_pair(const std::vector<BitangentRecord>& bt,
                                         const HomogeneousForm& l1, const HomogeneousForm& l2,
                                         const ToleranceProfile& profile) {
    auto find = [&](const HomogeneousForm& l) {
        HomogeneousForm ln = l.normalized();
        for (size_t i = 0; i < bt.size(); ++i)
            if (form_distance(bt[i].line, ln) <= 1e4 * profile.eps_point)
                return static_cast<int>(i);
        fail(ErrorCode::UsageError, "alpha_input", "line is not a computed bitangent");
    };
    int i = find(l1), j = find(l2);
    if (i == j) fail(ErrorCode::UsageError, "alpha_input", "the two lines coincide");
    return {std::min(i, j), std::max(i, j)};
}

}  // namespace agm3
