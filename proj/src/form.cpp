#include "agm3/form.hpp"

#include <functional>
#include <map>
#include <mutex>

#include "agm3/errors.hpp"

namespace agm3 {

namespace {

int pack_exps(int nvars, int degree, const std::array<int, 4>& e) {
    // drop e[0]; it is implied by the total degree
    int base = degree + 1;
    if (nvars == 3) return e[1] * base + e[2];
    return (e[1] * base + e[2]) * base + e[3];
}

}  // namespace

int MonomialTable::index(const std::array<int, 4>& e) const {
    int key = pack_exps(nvars, degree, e);
    if (key < 0 || key >= static_cast<int>(lookup.size())) return -1;
    return lookup[key];
}

const MonomialTable& MonomialTable::get(int nvars, int degree) {
    static std::map<std::pair<int, int>, MonomialTable> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(nvars, degree);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;

    MonomialTable t;
    t.nvars = nvars;
    t.degree = degree;
    int base = degree + 1;
    t.lookup.assign(nvars == 3 ? base * base : base * base * base, -1);
    if (nvars == 3) {
        for (int e0 = degree; e0 >= 0; --e0)
            for (int e1 = degree - e0; e1 >= 0; --e1) {
                int e2 = degree - e0 - e1;
                t.exps.push_back({e0, e1, e2, 0});
            }
    } else if (nvars == 4) {
        for (int e0 = degree; e0 >= 0; --e0)
            for (int e1 = degree - e0; e1 >= 0; --e1)
                for (int e2 = degree - e0 - e1; e2 >= 0; --e2) {
                    int e3 = degree - e0 - e1 - e2;
                    t.exps.push_back({e0, e1, e2, e3});
                }
    } else {
        fail(ErrorCode::UsageError, "monomials", "nvars must be 3 or 4");
    }
    for (int i = 0; i < static_cast<int>(t.exps.size()); ++i)
        t.lookup[pack_exps(nvars, degree, t.exps[i])] = i;
    auto [pos, ok] = cache.emplace(key, std::move(t));
    (void)ok;
    return pos->second;
}

Cx BinaryForm::eval(Cx s, Cx t) const {
    // c[k] * s^{d-k} t^k
    Cx acc(0), tp(1);
    std::vector<Cx> spow(degree + 1);
    spow[0] = Cx(1);
    for (int k = 1; k <= degree; ++k) spow[k] = spow[k - 1] * s;
    for (int k = 0; k <= degree; ++k) {
        acc += c[k] * spow[degree - k] * tp;
        tp *= t;
    }
    return acc;
}

double BinaryForm::max_abs() const {
    double m = 0;
    for (const auto& z : c) m = std::max(m, std::abs(z));
    return m;
}

BinaryForm BinaryForm::derivative_s() const {
    if (degree == 0) return BinaryForm(0);
    BinaryForm d(degree - 1);
    for (int k = 0; k <= degree - 1; ++k) d.c[k] = c[k] * static_cast<double>(degree - k);
    return d;
}

HomogeneousForm HomogeneousForm::from_terms(
    int nvars, int degree, const std::vector<std::pair<std::array<int, 4>, Cx>>& terms) {
    HomogeneousForm f(nvars, degree);
    const auto& t = f.table();
    for (const auto& [e, v] : terms) {
        int sum = e[0] + e[1] + e[2] + e[3];
        if (sum != degree)
            fail(ErrorCode::UsageError, "form", "term degree mismatch");
        int idx = t.index(e);
        if (idx < 0) fail(ErrorCode::UsageError, "form", "bad exponents");
        f.coeffs(idx) += v;
    }
    return f;
}

HomogeneousForm HomogeneousForm::line(const Eigen::Vector3cd& n) {
    HomogeneousForm f(3, 1);
    f.coeffs(0) = n(0);
    f.coeffs(1) = n(1);
    f.coeffs(2) = n(2);
    return f;
}

Eigen::Vector3cd HomogeneousForm::line_normal() const {
    if (degree != 1 || nvars != 3) fail(ErrorCode::UsageError, "form", "not a plane line");
    return Eigen::Vector3cd(coeffs(0), coeffs(1), coeffs(2));
}

Cx HomogeneousForm::eval(const VecC& x) const {
    const auto& t = table();
    // power tables per coordinate
    std::array<std::vector<Cx>, 4> pw;
    for (int i = 0; i < nvars; ++i) {
        pw[i].resize(degree + 1);
        pw[i][0] = Cx(1);
        for (int k = 1; k <= degree; ++k) pw[i][k] = pw[i][k - 1] * x(i);
    }
    Cx acc(0);
    for (int m = 0; m < t.count(); ++m) {
        const auto& e = t.exps[m];
        Cx term = coeffs(m);
        for (int i = 0; i < nvars; ++i) term *= pw[i][e[i]];
        acc += term;
    }
    return acc;
}

Cx HomogeneousForm::eval(const Eigen::Vector3cd& x) const {
    VecC v(3);
    v << x(0), x(1), x(2);
    return eval(v);
}

double HomogeneousForm::eval_scale(const VecC& x) const {
    const auto& t = table();
    std::array<std::vector<double>, 4> pw;
    for (int i = 0; i < nvars; ++i) {
        pw[i].resize(degree + 1);
        pw[i][0] = 1.0;
        for (int k = 1; k <= degree; ++k) pw[i][k] = pw[i][k - 1] * std::abs(x(i));
    }
    double acc = 0;
    for (int m = 0; m < t.count(); ++m) {
        const auto& e = t.exps[m];
        double term = std::abs(coeffs(m));
        for (int i = 0; i < nvars; ++i) term *= pw[i][e[i]];
        acc += term;
    }
    return acc;
}

HomogeneousForm HomogeneousForm::partial(int var) const {
    if (degree == 0) return HomogeneousForm(nvars, 0);
    HomogeneousForm d(nvars, degree - 1);
    const auto& t = table();
    const auto& td = d.table();
    for (int m = 0; m < t.count(); ++m) {
        const auto& e = t.exps[m];
        if (e[var] == 0) continue;
        auto e2 = e;
        e2[var] -= 1;
        d.coeffs(td.index(e2)) += coeffs(m) * static_cast<double>(e[var]);
    }
    return d;
}

std::vector<HomogeneousForm> HomogeneousForm::gradient() const {
    std::vector<HomogeneousForm> g;
    g.reserve(nvars);
    for (int i = 0; i < nvars; ++i) g.push_back(partial(i));
    return g;
}

Eigen::Vector3cd HomogeneousForm::gradient_at(const Eigen::Vector3cd& x) const {
    Eigen::Vector3cd g;
    for (int i = 0; i < 3; ++i) g(i) = partial(i).eval(x);
    return g;
}

HomogeneousForm HomogeneousForm::operator+(const HomogeneousForm& o) const {
    if (nvars != o.nvars || degree != o.degree)
        fail(ErrorCode::UsageError, "form", "degree mismatch in +");
    HomogeneousForm f = *this;
    f.coeffs += o.coeffs;
    return f;
}

HomogeneousForm HomogeneousForm::operator-(const HomogeneousForm& o) const {
    if (nvars != o.nvars || degree != o.degree)
        fail(ErrorCode::UsageError, "form", "degree mismatch in -");
    HomogeneousForm f = *this;
    f.coeffs -= o.coeffs;
    return f;
}

HomogeneousForm HomogeneousForm::operator*(const HomogeneousForm& o) const {
    if (nvars != o.nvars) fail(ErrorCode::UsageError, "form", "nvars mismatch in *");
    HomogeneousForm r(nvars, degree + o.degree);
    const auto& ta = table();
    const auto& tb = o.table();
    const auto& tr = r.table();
    for (int i = 0; i < ta.count(); ++i) {
        if (coeffs(i) == Cx(0)) continue;
        const auto& ea = ta.exps[i];
        for (int j = 0; j < tb.count(); ++j) {
            if (o.coeffs(j) == Cx(0)) continue;
            const auto& eb = tb.exps[j];
            std::array<int, 4> e{ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2], ea[3] + eb[3]};
            r.coeffs(tr.index(e)) += coeffs(i) * o.coeffs(j);
        }
    }
    return r;
}

bool HomogeneousForm::is_zero(double rel) const {
    (void)rel;
    return max_abs() == 0.0;
}

HomogeneousForm HomogeneousForm::normalized() const {
    HomogeneousForm f = *this;
    f.coeffs = canonicalize_vector(f.coeffs);
    return f;
}

HomogeneousForm HomogeneousForm::compose_linear(const Eigen::Matrix3cd& M) const {
    if (nvars != 3) fail(ErrorCode::UsageError, "form", "compose_linear is P2 only");
    // substitute x_i -> (M x)_i = sum_j M(i,j) x_j
    std::vector<HomogeneousForm> rows;
    rows.reserve(3);
    for (int i = 0; i < 3; ++i)
        rows.push_back(HomogeneousForm::line(Eigen::Vector3cd(M(i, 0), M(i, 1), M(i, 2))));
    return compose(rows);
}

HomogeneousForm HomogeneousForm::compose(const std::vector<HomogeneousForm>& q) const {
    if (static_cast<int>(q.size()) != nvars)
        fail(ErrorCode::UsageError, "form", "compose arity mismatch");
    const int inner = q[0].degree;
    for (const auto& qi : q)
        if (qi.degree != inner || qi.nvars != q[0].nvars)
            fail(ErrorCode::UsageError, "form", "compose: mixed degrees");

    // cache of q0^a * q1^b * q2^c (* q3^d), built by peeling one factor
    std::map<std::array<int, 4>, HomogeneousForm> cache;
    HomogeneousForm one(q[0].nvars, 0);
    one.coeffs(0) = Cx(1);
    cache[{0, 0, 0, 0}] = one;
    std::function<const HomogeneousForm&(std::array<int, 4>)> power =
        [&](std::array<int, 4> e) -> const HomogeneousForm& {
        auto it = cache.find(e);
        if (it != cache.end()) return it->second;
        for (int i = 0; i < nvars; ++i) {
            if (e[i] > 0) {
                auto e2 = e;
                e2[i] -= 1;
                HomogeneousForm val = power(e2) * q[i];
                return cache.emplace(e, std::move(val)).first->second;
            }
        }
        return cache.at({0, 0, 0, 0});
    };

    HomogeneousForm acc(q[0].nvars, degree * inner);
    const auto& t = table();
    for (int m = 0; m < t.count(); ++m) {
        if (coeffs(m) == Cx(0)) continue;
        acc = acc + power(t.exps[m]).scaled(coeffs(m));
    }
    return acc;
}

BinaryForm HomogeneousForm::restrict_line(const Eigen::Vector3cd& A,
                                          const Eigen::Vector3cd& B) const {
    if (nvars != 3) fail(ErrorCode::UsageError, "form", "restrict_line is P2 only");
    BinaryForm r(degree);
    const auto& t = table();
    // (A_i s + B_i t)^e via iterated convolution, small degrees only
    std::array<std::vector<std::vector<Cx>>, 3> binpow;
    for (int i = 0; i < 3; ++i) {
        binpow[i].resize(degree + 1);
        binpow[i][0] = {Cx(1)};
        for (int e = 1; e <= degree; ++e) {
            const auto& prev = binpow[i][e - 1];
            std::vector<Cx> cur(e + 1, Cx(0));
            for (int k = 0; k < e; ++k) {
                cur[k] += prev[k] * A(i);      // multiply by A s
                cur[k + 1] += prev[k] * B(i);  // multiply by B t
            }
            binpow[i][e] = std::move(cur);
        }
    }
    for (int m = 0; m < t.count(); ++m) {
        if (coeffs(m) == Cx(0)) continue;
        const auto& e = t.exps[m];
        // convolution of the three binary expansions
        std::vector<Cx> conv = binpow[0][e[0]];
        for (int i = 1; i < 3; ++i) {
            const auto& f = binpow[i][e[i]];
            std::vector<Cx> nxt(conv.size() + f.size() - 1, Cx(0));
            for (size_t a = 0; a < conv.size(); ++a)
                for (size_t b = 0; b < f.size(); ++b) nxt[a + b] += conv[a] * f[b];
            conv = std::move(nxt);
        }
        for (int k = 0; k <= degree; ++k) r.c[k] += coeffs(m) * conv[k];
    }
    return r;
}

std::vector<BinaryForm> HomogeneousForm::coefficients_in(int var) const {
    if (nvars != 3) fail(ErrorCode::UsageError, "form", "coefficients_in is P2 only");
    int b = (var == 2) ? 1 : 2;  // slot variable; its partner is implied
    std::vector<BinaryForm> out(degree + 1);
    for (int k = 0; k <= degree; ++k) out[k] = BinaryForm(degree - k);
    const auto& t = table();
    for (int m = 0; m < t.count(); ++m) {
        const auto& e = t.exps[m];
        int k = e[var];
        // binary form in (x_a, x_b): exponent of x_b selects the slot
        out[k].c[e[b]] += coeffs(m);
    }
    return out;
}

double form_distance(const HomogeneousForm& a, const HomogeneousForm& b) {
    if (a.nvars != b.nvars || a.degree != b.degree) return 2.0;
    return projective_distance(a.coeffs, b.coeffs);
}

}  // namespace agm3
