#pragma once

#include "esir/linalg.hpp"
#include "esir/sdr.hpp"

namespace esir::metrics {

using linalg::Matrix;
using linalg::RowVector;
using linalg::SymMatrix;
using linalg::Vector;

/// True central-subspace basis (rows) and the population scatter used as the
/// inner product in R^2.
class TruthSpec {
public:
    TruthSpec(Matrix b_true, SymMatrix sigma);

    const Matrix& b_true() const noexcept { return b_; }
    const SymMatrix& sigma() const noexcept { return sigma_; }
    Eigen::Index k() const noexcept { return b_.rows(); }

private:
    Matrix b_;
    SymMatrix sigma_;
};

/// Squared multiple correlation between direction b and span(B) under the
/// Sigma inner product:
///   b S B^T (B S B^T)^{-1} B S b^T / (b S b^T).
double r_squared(const RowVector& b, const TruthSpec& truth);

/// R^2 of each fitted row, in order.
Vector r_squared_per_direction(const sdr::SdrFit& fit, const TruthSpec& truth);

double avg_r_squared(const sdr::SdrFit& fit, const TruthSpec& truth);

struct OlsReport {
    Vector coefficients;  // intercept first
    double r2 = 0.0;
    double adjusted_r2 = 0.0;
    double f_statistic = 0.0;  // +inf for an exact fit
    int dof_numerator = 0;
    int dof_denominator = 0;
    int n_used = 0;
};

/// Least squares of response on [1, design]. Requires n > q + 1 and a design
/// of full column rank (pivot tolerance 1e-10).
OlsReport ols_fit(const Matrix& design, const Vector& response);

struct KsResult {
    double statistic = 0.0;
    double critical_value = 0.0;
    bool reject_at_05 = false;
};

/// One-sample KS distance between the standardized sample and N(0, 1),
/// rejected at the asymptotic 5% level 1.358 / sqrt(n). Requires n >= 20.
KsResult ks_normality(const Vector& sample);

/// Sample excess kurtosis m4 / m2^2 - 3.
double excess_kurtosis(const Vector& sample);

}  // namespace esir::metrics
