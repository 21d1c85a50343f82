#include "esir/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "esir/error.hpp"

namespace esir::metrics {

TruthSpec::TruthSpec(Matrix b_true, SymMatrix sigma) : b_(std::move(b_true)), sigma_(std::move(sigma)) {
    if (b_.cols() != sigma_.dim()) {
        throw Error(ErrorCode::InvalidArgument, "truth basis and sigma dimensions differ");
    }
    linalg::row_space_projector(b_);  // full row rank
    linalg::cholesky(sigma_);         // positive definite
}

double r_squared(const RowVector& b, const TruthSpec& truth) {
    const Matrix& s = truth.sigma().matrix();
    if (b.size() != s.rows()) throw Error(ErrorCode::InvalidArgument, "direction has wrong length");
    const double bsb = b * s * b.transpose();
    if (!(bsb > 1e-14)) throw Error(ErrorCode::DegenerateDirection, "b Sigma b^T is not positive");
    const Vector cross = truth.b_true() * s * b.transpose();  // B S b^T
    const Matrix gram = truth.b_true() * s * truth.b_true().transpose();
    const double num = cross.dot(gram.llt().solve(cross));
    return std::clamp(num / bsb, 0.0, 1.0);
}

Vector r_squared_per_direction(const sdr::SdrFit& fit, const TruthSpec& truth) {
    Vector out(fit.directions.rows());
    for (Eigen::Index k = 0; k < fit.directions.rows(); ++k) out(k) = r_squared(fit.directions.row(k), truth);
    return out;
}

double avg_r_squared(const sdr::SdrFit& fit, const TruthSpec& truth) {
    if (fit.directions.rows() != truth.k()) {
        throw Error(ErrorCode::InvalidArgument, "fit and truth have different K");
    }
    return r_squared_per_direction(fit, truth).mean();
}

OlsReport ols_fit(const Matrix& design, const Vector& response) {
    const Eigen::Index n = design.rows();
    const Eigen::Index q = design.cols();
    if (response.size() != n) throw Error(ErrorCode::InvalidArgument, "design and response lengths differ");
    if (n <= q + 1) {
        std::ostringstream msg;
        msg << "n = " << n << " must exceed q + 1 = " << q + 1;
        throw Error(ErrorCode::TooFewPoints, msg.str());
    }
    Matrix a(n, q + 1);
    a.col(0).setOnes();
    a.rightCols(q) = design;

    Eigen::ColPivHouseholderQR<Matrix> qr(a);
    qr.setThreshold(1e-10);
    if (qr.rank() < q + 1) throw Error(ErrorCode::RankDeficientDesign, "design is not of full column rank");

    OlsReport rep;
    rep.coefficients = qr.solve(response);
    const Vector resid = response - a * rep.coefficients;
    const double ssr = resid.squaredNorm();
    const double sst = (response.array() - response.mean()).matrix().squaredNorm();
    if (!(sst > 0.0)) throw Error(ErrorCode::DegenerateSample, "response is constant");

    const double dn = static_cast<double>(n);
    const double dq = static_cast<double>(q);
    rep.r2 = std::max(0.0, 1.0 - ssr / sst);
    if (ssr <= 1e-24 * sst) rep.r2 = 1.0;
    rep.adjusted_r2 = 1.0 - (1.0 - rep.r2) * (dn - 1.0) / (dn - dq - 1.0);
    rep.f_statistic = rep.r2 >= 1.0 ? std::numeric_limits<double>::infinity()
                                    : (rep.r2 / dq) / ((1.0 - rep.r2) / (dn - dq - 1.0));
    rep.dof_numerator = static_cast<int>(q);
    rep.dof_denominator = static_cast<int>(n - q - 1);
    rep.n_used = static_cast<int>(n);
    return rep;
}

KsResult ks_normality(const Vector& sample) {
    const Eigen::Index n = sample.size();
    if (n < 20) throw Error(ErrorCode::TooFewPoints, "KS screening needs n >= 20");
    const double mean = sample.mean();
    const double sd = std::sqrt((sample.array() - mean).square().sum() / static_cast<double>(n - 1));
    if (!(sd >= 1e-14)) throw Error(ErrorCode::DegenerateSample, "sample standard deviation is zero");

    std::vector<double> z(sample.data(), sample.data() + n);
    for (double& v : z) v = (v - mean) / sd;
    std::sort(z.begin(), z.end());

    const double dn = static_cast<double>(n);
    double d = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double cdf = 0.5 * std::erfc(-z[static_cast<std::size_t>(i)] / std::sqrt(2.0));
        d = std::max({d, (static_cast<double>(i) + 1.0) / dn - cdf, cdf - static_cast<double>(i) / dn});
    }
    KsResult r;
    r.statistic = d;
    r.critical_value = 1.358 / std::sqrt(dn);
    r.reject_at_05 = d > r.critical_value;
    return r;
}

double excess_kurtosis(const Vector& sample) {
    if (sample.size() < 2) throw Error(ErrorCode::TooFewPoints, "kurtosis needs n >= 2");
    const auto centered = sample.array() - sample.mean();
    const double m2 = centered.square().mean();
    if (!(m2 > 0.0)) throw Error(ErrorCode::DegenerateSample, "sample variance is zero");
    return centered.square().square().mean() / (m2 * m2) - 3.0;
}

}  // namespace esir::metrics
