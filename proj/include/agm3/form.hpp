#ifndef AGM3_FORM_HPP
#define AGM3_FORM_HPP

#include <array>
#include <vector>

#include "agm3/projective.hpp"
#include "agm3/unipoly.hpp"

namespace agm3 {

/// Monomial bookkeeping for dense homogeneous forms: exponent tuples of a
/// fixed total degree in 3 or 4 variables, ordered lexicographically
/// descending (x0^d first). Tables are built once per (nvars, degree).
struct MonomialTable {
    int nvars = 3;
    int degree = 0;
    std::vector<std::array<int, 4>> exps;  // unused slots zero
    std::vector<int> lookup;               // dense map from packed exponents

    int index(const std::array<int, 4>& e) const;
    int count() const { return static_cast<int>(exps.size()); }

    static const MonomialTable& get(int nvars, int degree);
};

/// Binary form of degree d in (s, t); c[k] multiplies s^{d-k} t^k.
struct BinaryForm {
    int degree = 0;
    std::vector<Cx> c;

    BinaryForm() = default;
    explicit BinaryForm(int d) : degree(d), c(d + 1, Cx(0)) {}

    Cx eval(Cx s, Cx t) const;
    double max_abs() const;
    BinaryForm derivative_s() const;
};

/// Dense homogeneous form of fixed degree in 3 or 4 variables over C. The
/// universal carrier for the quartic, cubics, conics, lines and the P^3
/// quadric/cubic models.
struct HomogeneousForm {
    int nvars = 3;
    int degree = 0;
    VecC coeffs;  // indexed per MonomialTable

    HomogeneousForm() = default;
    HomogeneousForm(int nv, int deg)
        : nvars(nv), degree(deg), coeffs(VecC::Zero(MonomialTable::get(nv, deg).count())) {}

    const MonomialTable& table() const { return MonomialTable::get(nvars, degree); }

    static HomogeneousForm from_terms(
        int nvars, int degree,
        const std::vector<std::pair<std::array<int, 4>, Cx>>& terms);

    /// linear form with given normal vector: n0 x0 + n1 x1 + n2 x2
    static HomogeneousForm line(const Eigen::Vector3cd& n);
    Eigen::Vector3cd line_normal() const;  // requires degree 1, nvars 3

    Cx eval(const VecC& x) const;
    Cx eval(const Eigen::Vector3cd& x) const;
    double eval_scale(const VecC& x) const;  // sum |c| |x|^e, zero-test scale

    HomogeneousForm partial(int var) const;
    std::vector<HomogeneousForm> gradient() const;
    Eigen::Vector3cd gradient_at(const Eigen::Vector3cd& x) const;

    HomogeneousForm operator+(const HomogeneousForm& o) const;
    HomogeneousForm operator-(const HomogeneousForm& o) const;
    HomogeneousForm operator*(const HomogeneousForm& o) const;
    HomogeneousForm& operator*=(Cx s) {
        coeffs *= s;
        return *this;
    }
    HomogeneousForm scaled(Cx s) const {
        HomogeneousForm f = *this;
        f.coeffs *= s;
        return f;
    }

    double max_abs() const { return coeffs.size() ? coeffs.cwiseAbs().maxCoeff() : 0.0; }
    bool is_zero(double rel = 1e-13) const;

    /// canonical representative: unit norm, dominant coefficient positive real
    HomogeneousForm normalized() const;

    /// f(M x): substitution by a linear change of coordinates
    HomogeneousForm compose_linear(const Eigen::Matrix3cd& M) const;

    /// f(q0, q1, q2) for polynomial maps q_i (all of one degree)
    HomogeneousForm compose(const std::vector<HomogeneousForm>& q) const;

    /// restriction to the line s*A + t*B (nvars 3)
    BinaryForm restrict_line(const Eigen::Vector3cd& A, const Eigen::Vector3cd& B) const;

    /// coefficients with respect to x_var: result[k] is the form in the
    /// remaining variables multiplying x_var^k (returned as BinaryForm in the
    /// two other variables, in increasing index order)
    std::vector<BinaryForm> coefficients_in(int var) const;
};

double form_distance(const HomogeneousForm& a, const HomogeneousForm& b);

}  // namespace agm3

#endif
