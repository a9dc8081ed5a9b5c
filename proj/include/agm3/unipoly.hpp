#ifndef AGM3_UNIPOLY_HPP
#define AGM3_UNIPOLY_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "agm3/errors.hpp"

namespace agm3 {

/// Dense univariate polynomial, coefficients ascending (c[0] + c[1] x + ...).
/// Template over the real base type so the same code runs in binary64 and in
/// extended precision during escalation.
template <typename T = double>
struct UniPoly {
    using C = std::complex<T>;
    std::vector<C> c;

    UniPoly() = default;
    explicit UniPoly(std::vector<C> coeffs) : c(std::move(coeffs)) {}

    int degree() const { return static_cast<int>(c.size()) - 1; }
    bool is_zero() const { return c.empty(); }

    T max_abs() const {
        T m = 0;
        for (const auto& z : c) m = std::max(m, std::abs(z));
        return m;
    }

    /// Drop leading coefficients that are negligible relative to the largest.
    /// `rel` defaults well below every working tolerance; exact zeros always go.
    void trim(T rel = T(1e-13)) {
        T cut = max_abs() * rel;
        while (!c.empty() && std::abs(c.back()) <= cut) c.pop_back();
    }

    C eval(const C& x) const {
        if (c.empty()) return C(0);
        C v = c.back();
        for (int k = static_cast<int>(c.size()) - 2; k >= 0; --k) v = v * x + c[k];
        return v;
    }

    /// Horner evaluation of p and p' in one pass.
    void eval_with_derivative(const C& x, C& p, C& dp) const {
        p = C(0);
        dp = C(0);
        for (int k = static_cast<int>(c.size()) - 1; k >= 0; --k) {
            dp = dp * x + p;
            p = p * x + c[k];
        }
    }

    /// Running error bound companion: sum |c_k| |x|^k (used as the natural
    /// scale of eval(x) when testing "is this value numerically zero").
    T eval_scale(const C& x) const {
        T ax = std::abs(x), s = 0, pw = 1;
        for (const auto& z : c) {
            s += std::abs(z) * pw;
            pw *= ax;
        }
        return s;
    }

    UniPoly derivative() const {
        UniPoly d;
        if (c.size() <= 1) return d;
        d.c.resize(c.size() - 1);
        for (size_t k = 1; k < c.size(); ++k) d.c[k - 1] = c[k] * T(k);
        return d;
    }

    UniPoly operator*(const UniPoly& o) const {
        if (c.empty() || o.c.empty()) return UniPoly{};
        UniPoly r;
        r.c.assign(c.size() + o.c.size() - 1, C(0));
        for (size_t i = 0; i < c.size(); ++i)
            for (size_t j = 0; j < o.c.size(); ++j) r.c[i + j] += c[i] * o.c[j];
        return r;
    }

    UniPoly& operator*=(const C& s) {
        for (auto& z : c) z *= s;
        return *this;
    }
};

/// Convert coefficient precision (escalation up, rounding down).
template <typename To, typename From>
UniPoly<To> convert_poly(const UniPoly<From>& p) {
    UniPoly<To> q;
    q.c.reserve(p.c.size());
    for (const auto& z : p.c)
        q.c.emplace_back(static_cast<To>(z.real()), static_cast<To>(z.imag()));
    return q;
}

/// Monic product of (x - r_i)^{m_i}; used by the reconstruction check.
template <typename T>
UniPoly<T> poly_from_roots(const std::vector<std::pair<std::complex<T>, int>>& roots) {
    UniPoly<T> p(std::vector<std::complex<T>>{std::complex<T>(1)});
    for (const auto& [r, m] : roots) {
        UniPoly<T> lin(std::vector<std::complex<T>>{-r, std::complex<T>(1)});
        for (int k = 0; k < m; ++k) p = p * lin;
    }
    return p;
}

}  // namespace agm3

#endif
