#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "agm3/aberth.hpp"
#include "agm3/linalg.hpp"
#include "agm3/plane.hpp"
#include "agm3/resultant.hpp"
#include "agm3/rng.hpp"

using namespace agm3;

namespace {

const ToleranceProfile kProfile{};

UniPoly<double> poly_from(std::initializer_list<Cx> ascending) {
    return UniPoly<double>(std::vector<Cx>(ascending));
}

/// test-side oracle: univariate resultant via a plain numeric Sylvester
/// determinant, independent of the library's interpolation path
Cx sylvester_resultant(const std::vector<Cx>& f, const std::vector<Cx>& g) {
    int m = static_cast<int>(f.size()) - 1, n = static_cast<int>(g.size()) - 1;
    MatC S = MatC::Zero(m + n, m + n);
    for (int r = 0; r < n; ++r)
        for (int k = 0; k <= m; ++k) S(r, r + (m - k)) = f[k];
    for (int r = 0; r < m; ++r)
        for (int k = 0; k <= n; ++k) S(n + r, r + (n - k)) = g[k];
    return Eigen::PartialPivLU<MatC>(S).determinant();
}

}  // namespace

TEST_CASE("roots: exact factorizations") {
    // z^2 + 1 -> {i, -i}
    auto r = roots_univariate(poly_from({Cx(1), Cx(0), Cx(1)}), kProfile);
    REQUIRE(r.size() == 2);
    CHECK(r[0].multiplicity == 1);
    CHECK(r[1].multiplicity == 1);
    double d1 = std::min(std::abs(r[0].value - Cx(0, 1)), std::abs(r[0].value - Cx(0, -1)));
    double d2 = std::min(std::abs(r[1].value - Cx(0, 1)), std::abs(r[1].value - Cx(0, -1)));
    CHECK(d1 < 1e-12);
    CHECK(d2 < 1e-12);
    CHECK(std::abs(r[0].value - r[1].value) > 1.0);

    // (z - 1)^2 -> {(1, 2)}
    auto r2 = roots_univariate(poly_from({Cx(1), Cx(-2), Cx(1)}), kProfile);
    REQUIRE(r2.size() == 1);
    CHECK(r2[0].multiplicity == 2);
    CHECK(std::abs(r2[0].value - Cx(1)) < 1e-7);
}

TEST_CASE("roots: recovered from known random factors") {
    Rng rng(42);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<Cx> factors;
        UniPoly<double> p(std::vector<Cx>{Cx(1)});
        for (int k = 0; k < 5; ++k) {
            Cx root = rng.next_complex() * 2.0;
            factors.push_back(root);
            p = p * UniPoly<double>(std::vector<Cx>{-root, Cx(1)});
        }
        auto roots = roots_univariate(p, kProfile);
        REQUIRE(roots.size() == 5);
        for (const auto& f : factors) {
            double best = 1e9;
            for (const auto& r : roots) best = std::min(best, std::abs(r.value - f));
            CHECK(best < 1e-10);
        }
    }
}

TEST_CASE("roots: reconstruction residual across degrees 2..12") {
    Rng rng(7);
    for (int trial = 0; trial < 100; ++trial) {
        int deg = 2 + static_cast<int>(rng.next_u64() % 11);
        std::vector<Cx> c(deg + 1);
        for (auto& z : c) z = rng.next_complex();
        if (std::abs(c.back()) < 0.1) c.back() += Cx(1.0);
        UniPoly<double> p(c);
        auto roots = roots_univariate(p, kProfile);
        CHECK(reconstruction_residual(p, roots) <= kProfile.eps_residual);
        int total = 0;
        for (const auto& r : roots) total += r.multiplicity;
        CHECK(total == deg);
    }
}

TEST_CASE("roots: high-degree wide-dynamic-range input stays solvable") {
    // product of 40 roots spread over two rings; exercises the hull initializer
    Rng rng(99);
    UniPoly<double> p(std::vector<Cx>{Cx(1)});
    for (int k = 0; k < 40; ++k) {
        double radius = (k % 2 == 0) ? 0.3 : 3.0;
        Cx root = rng.next_phase() * radius;
        p = p * UniPoly<double>(std::vector<Cx>{-root, Cx(1)});
    }
    auto roots = roots_univariate(p, kProfile);
    int total = 0;
    for (const auto& r : roots) total += r.multiplicity;
    CHECK(total == 40);
    CHECK(reconstruction_residual(p, roots) < 1e-8);
}

TEST_CASE("nullspace: coordinate projection") {
    MatC M(2, 3);
    M << Cx(1), Cx(0), Cx(0), Cx(0), Cx(1), Cx(0);
    auto ns = nullspace(M, kProfile, "proj");
    REQUIRE(ns.basis.cols() == 1);
    CHECK(std::abs(ns.basis(2, 0)) > 1.0 - 1e-12);
    CHECK(ns.cert.claimed_rank == 2);
}

TEST_CASE("nullspace: rank-1 outer product has 2-dim kernel") {
    Rng rng(3);
    VecC u(3), v(3);
    for (int i = 0; i < 3; ++i) {
        u(i) = rng.next_complex();
        v(i) = rng.next_complex();
    }
    MatC M = u * v.transpose();
    auto ns = nullspace(M, kProfile, "outer");
    CHECK(ns.basis.cols() == 2);
    CHECK(ns.cert.claimed_rank == 1);
    CHECK(ns.cert.gap_ratio < kProfile.eps_rank);
    // basis orthonormal and annihilating
    CHECK((ns.basis.adjoint() * ns.basis - MatC::Identity(2, 2)).norm() < 1e-12);
    CHECK((M * ns.basis).norm() < 1e-12 * M.norm());
}

TEST_CASE("nullspace: conic through 5 circle points recovers x^2+y^2-z^2") {
    // closed-form oracle: the unit circle
    std::vector<ProjPoint> pts = {ProjPoint(Cx(1), Cx(0), Cx(1)), ProjPoint(Cx(0), Cx(1), Cx(1)),
                                  ProjPoint(Cx(-1), Cx(0), Cx(1)), ProjPoint(Cx(0), Cx(-1), Cx(1)),
                                  ProjPoint(Cx(0.6), Cx(0.8), Cx(1))};
    const auto& table = MonomialTable::get(3, 2);
    MatC M(5, 6);
    for (int r = 0; r < 5; ++r)
        for (int m = 0; m < 6; ++m) {
            const auto& e = table.exps[m];
            Cx val(1);
            for (int i = 0; i < 3; ++i)
                for (int k = 0; k < e[i]; ++k) val *= pts[r].v(i);
            M(r, m) = val;
        }
    auto ns = nullspace(M, kProfile, "circle", 1);
    HomogeneousForm conic(3, 2);
    conic.coeffs = ns.basis.col(0);
    HomogeneousForm target = HomogeneousForm::from_terms(
        3, 2, {{{{2, 0, 0, 0}}, Cx(1)}, {{{0, 2, 0, 0}}, Cx(1)}, {{{0, 0, 2, 0}}, Cx(-1)}});
    CHECK(form_distance(conic, target) < 1e-10);
}

TEST_CASE("nullspace: random full-rank matrices are rejected as rank-deficient") {
    Rng rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        MatC M(4, 4);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) M(i, j) = rng.next_complex();
        auto ns = nullspace(M, kProfile, "full");
        CHECK(ns.basis.cols() == 0);
        CHECK(ns.cert.claimed_rank == 4);
        CHECK(ns.cert.gap_ratio < kProfile.eps_rank);
    }
}

TEST_CASE("resultant: hand-computed conic vs line") {
    // Res_x(x^2+y^2-z^2, x-y) = 2y^2 - z^2; chart z=1 gives 2y^2-1
    HomogeneousForm conic = HomogeneousForm::from_terms(
        3, 2, {{{{2, 0, 0, 0}}, Cx(1)}, {{{0, 2, 0, 0}}, Cx(1)}, {{{0, 0, 2, 0}}, Cx(-1)}});
    HomogeneousForm line =
        HomogeneousForm::from_terms(3, 1, {{{{1, 0, 0, 0}}, Cx(1)}, {{{0, 1, 0, 0}}, Cx(-1)}});
    auto out = resultant_eliminate(conic, line, 0, kProfile);
    REQUIRE(out.poly.degree() == 2);
    Cx scale = out.poly.c[2] / Cx(2);
    CHECK(std::abs(out.poly.c[2] / scale - Cx(2)) < 1e-10);
    CHECK(std::abs(out.poly.c[1]) < 1e-10 * std::abs(scale));
    CHECK(std::abs(out.poly.c[0] / scale - Cx(-1)) < 1e-10);
}

TEST_CASE("resultant: line against quartic has Bezout degree 4") {
    Rng rng(17);
    HomogeneousForm quartic(3, 4);
    for (int i = 0; i < quartic.coeffs.size(); ++i) quartic.coeffs(i) = rng.next_complex();
    HomogeneousForm line(3, 1);
    for (int i = 0; i < 3; ++i) line.coeffs(i) = rng.next_complex();
    auto out = resultant_eliminate(quartic, line, 1, kProfile);
    CHECK(out.poly.degree() == 4);
}

TEST_CASE("resultant: specialization oracle on 10 random slices") {
    Rng rng(23);
    HomogeneousForm F(3, 3), G(3, 2);
    for (int i = 0; i < F.coeffs.size(); ++i) F.coeffs(i) = rng.next_complex();
    for (int i = 0; i < G.coeffs.size(); ++i) G.coeffs(i) = rng.next_complex();

    bool zero = false;
    BinaryForm R = resultant_form(F, G, 0, zero);
    REQUIRE(!zero);
    REQUIRE(R.degree == 6);

    auto fc = F.coefficients_in(0);
    auto gc = G.coefficients_in(0);
    for (int trial = 0; trial < 10; ++trial) {
        Cx y0 = rng.next_complex();
        std::vector<Cx> f_spec(fc.size()), g_spec(gc.size());
        for (size_t k = 0; k < fc.size(); ++k) f_spec[k] = fc[k].eval(y0, Cx(1));
        for (size_t k = 0; k < gc.size(); ++k) g_spec[k] = gc[k].eval(y0, Cx(1));
        Cx direct = sylvester_resultant(f_spec, g_spec);
        Cx viaform = R.eval(y0, Cx(1));
        CHECK(std::abs(direct - viaform) < 1e-8 * (1.0 + std::abs(direct)));
    }
}

TEST_CASE("resultant: common factor detected") {
    Rng rng(31);
    HomogeneousForm common(3, 1), a(3, 1), b(3, 1);
    for (int i = 0; i < 3; ++i) {
        common.coeffs(i) = rng.next_complex();
        a.coeffs(i) = rng.next_complex();
        b.coeffs(i) = rng.next_complex();
    }
    HomogeneousForm F = common * a, G = common * b;
    CHECK_THROWS_AS(resultant_eliminate(F, G, 0, kProfile), Error);
}

TEST_CASE("rank certificate: sliding spectrum with no decisive gap is ambiguous") {
    MatC M = MatC::Zero(3, 3);
    M(0, 0) = Cx(1);
    M(1, 1) = Cx(1e-4);
    M(2, 2) = Cx(1e-9);  // below the cut, but the gap above it is only 1e-5
    CHECK_THROWS_AS(nullspace(M, kProfile, "sliding"), Error);
    try {
        nullspace(M, kProfile, "sliding");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::AmbiguousRank);
    }
}

TEST_CASE("rank certificate: decisive spectrum is accepted with tiny gap") {
    MatC M = MatC::Zero(3, 3);
    M(0, 0) = Cx(1);
    M(1, 1) = Cx(0.3);
    M(2, 2) = Cx(1e-13);
    auto ns = nullspace(M, kProfile, "decisive");
    CHECK(ns.cert.claimed_rank == 2);
    CHECK(ns.cert.gap_ratio < kProfile.eps_rank);
    CHECK(ns.basis.cols() == 1);
}
