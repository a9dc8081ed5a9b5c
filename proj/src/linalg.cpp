#include "agm3/linalg.hpp"

#include <Eigen/SVD>

namespace agm3 {

namespace {

using MatL = Eigen::Matrix<std::complex<long double>, Eigen::Dynamic, Eigen::Dynamic>;

struct Spectrum {
    std::vector<double> sigma;  // descending
    MatC V;                     // full right singular vectors
};

Spectrum svd_double(const MatC& M) {
    Eigen::JacobiSVD<MatC> svd(M, Eigen::ComputeFullV);
    Spectrum s;
    s.sigma.assign(svd.singularValues().data(),
                   svd.singularValues().data() + svd.singularValues().size());
    s.V = svd.matrixV();
    return s;
}

Spectrum svd_extended(const MatC& M) {
    MatL ML(M.rows(), M.cols());
    for (Eigen::Index i = 0; i < M.rows(); ++i)
        for (Eigen::Index j = 0; j < M.cols(); ++j)
            ML(i, j) = std::complex<long double>(M(i, j).real(), M(i, j).imag());
    Eigen::JacobiSVD<MatL> svd(ML, Eigen::ComputeFullV);
    Spectrum s;
    s.sigma.resize(svd.singularValues().size());
    for (Eigen::Index k = 0; k < svd.singularValues().size(); ++k)
        s.sigma[k] = static_cast<double>(svd.singularValues()(k));
    s.V.resize(M.cols(), M.cols());
    for (Eigen::Index i = 0; i < M.cols(); ++i)
        for (Eigen::Index j = 0; j < M.cols(); ++j)
            s.V(i, j) = Cx(static_cast<double>(svd.matrixV()(i, j).real()),
                           static_cast<double>(svd.matrixV()(i, j).imag()));
    return s;
}

/// Apply the rank rule; returns false when the spectrum is ambiguous.
bool decide_rank(const Spectrum& s, double eps_rank, RankCertificate& cert) {
    const int k = static_cast<int>(s.sigma.size());
    cert.singular_values = s.sigma;
    double s1 = k > 0 ? s.sigma[0] : 0.0;
    if (s1 <= 0.0) {
        cert.claimed_rank = 0;
        cert.gap_ratio = 0.0;
        return true;  // zero matrix: everything is nullspace
    }
    int r = 0;
    while (r < k && s.sigma[r] > eps_rank * s1) ++r;
    cert.claimed_rank = r;
    if (r == k) {
        cert.gap_ratio = 0.0;  // nothing below the gap
        return true;
    }
    // r >= 1 here: sigma[0] > eps_rank * sigma[0] always holds
    cert.gap_ratio = s.sigma[r] / s.sigma[r - 1];
    return cert.gap_ratio < eps_rank;
}

}  // namespace

NullspaceResult nullspace(const MatC& M, const ToleranceProfile& profile, std::string label,
                          std::optional<int> expected_nullity) {
    if (M.size() == 0) fail(ErrorCode::UsageError, "nullspace", "empty matrix");
    const int n = static_cast<int>(M.cols());
    const int kmax = static_cast<int>(std::min(M.rows(), M.cols()));

    Spectrum s = (profile.precision == Precision::Extended) ? svd_extended(M) : svd_double(M);
    RankCertificate cert;
    cert.label = std::move(label);
    bool decisive = decide_rank(s, profile.eps_rank, cert);
    if (!decisive && profile.precision == Precision::Double) {
        s = svd_extended(M);
        decisive = decide_rank(s, profile.eps_rank, cert);
    }
    if (!decisive)
        fail(ErrorCode::AmbiguousRank, "nullspace",
             cert.label + ": no singular-value gap at eps_rank");

    int nullity = (n - kmax) + (kmax - cert.claimed_rank);
    if (expected_nullity && *expected_nullity != nullity)
        fail(ErrorCode::AmbiguousRank, "nullspace",
             cert.label + ": nullity " + std::to_string(nullity) + ", expected " +
                 std::to_string(*expected_nullity));

    NullspaceResult res;
    res.cert = std::move(cert);
    res.basis = s.V.rightCols(nullity);
    return res;
}

}  // namespace agm3
