#pragma once

#include <cstddef>

#include "esir/linalg.hpp"
#include "esir/rng.hpp"

namespace esir::kendall {

using linalg::Matrix;
using linalg::SymMatrix;
using linalg::Vector;

/// How kendall_tau treats pairs whose difference is numerically zero.
enum class ZeroDistancePolicy { Skip, Error };

/// Multivariate Kendall's tau matrix: symmetric, PSD, unit trace.
class TauMatrix {
public:
    /// Validates trace = 1 (1e-10) and lambda_min >= -1e-10.
    TauMatrix(SymMatrix m, std::size_t pairs_used);

    const SymMatrix& sym() const noexcept { return m_; }
    const Matrix& matrix() const noexcept { return m_.matrix(); }
    std::size_t pairs_used() const noexcept { return pairs_; }

private:
    SymMatrix m_;
    std::size_t pairs_;
};

inline constexpr double kTraceTolerance = 1e-10;
inline constexpr double kPsdTolerance = 1e-10;

/// Rows per work block in the pairwise sum. Fixed so the reduction order
/// does not depend on the thread count.
inline constexpr Eigen::Index kPairBlockRows = 64;

/// Average over all unordered pairs i' < i of
///   (x_i - x_i')(x_i - x_i')^T / ||x_i - x_i'||^2.
/// A pair is degenerate when ||x_i - x_i'|| < 1e-12 (1 + ||x_i||); Skip drops
/// such pairs and averages over the rest, Error throws DuplicatePoints.
TauMatrix kendall_tau(const Matrix& x, ZeroDistancePolicy policy = ZeroDistancePolicy::Skip);

/// Monte Carlo value of the population tau eigenvalues for an elliptical law
/// with scatter eigenvalues `sigma_eigenvalues`:
///   E[ lambda_j Q_j^2 / sum_k lambda_k Q_k^2 ],  Q ~ N(0, I_p).
Vector population_tau_eigenvalues_mc(const Vector& sigma_eigenvalues, long mc_draws, Rng& rng);

/// Diagnostic in [0, 1]: max over well-separated eigenpairs of Sigma (gap to
/// each neighbour > 0.05 lambda_max) of 1 - |<v_j(M_hat), v_j(Sigma)>|.
/// Returns 0 when no eigenvalue is separated.
double tau_vs_covariance_alignment(const Matrix& x, const SymMatrix& sigma);

}  // namespace esir::kendall
