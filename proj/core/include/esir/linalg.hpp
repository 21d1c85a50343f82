#pragma once

#include <Eigen/Dense>

namespace esir::linalg {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

/// Relative tolerance used when checking |a_ij - a_ji| <= tol * max(1, |a_ij|).
inline constexpr double kSymmetryTolerance = 1e-12;

/// A square matrix known to be symmetric. Construction validates the
/// symmetry tolerance and throws NotSymmetric otherwise.
class SymMatrix {
public:
    explicit SymMatrix(Matrix entries);

    static SymMatrix identity(Eigen::Index dim);
    static SymMatrix diagonal(const Vector& diag);
    /// Copies the upper triangle onto the lower one; no check performed.
    static SymMatrix symmetrize(const Matrix& upper);

    Eigen::Index dim() const noexcept { return m_.rows(); }
    const Matrix& matrix() const noexcept { return m_; }
    double operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }
    double trace() const { return m_.trace(); }

private:
    struct Unchecked {};
    SymMatrix(Matrix entries, Unchecked) : m_(std::move(entries)) {}

    Matrix m_;
};

bool is_symmetric(const Matrix& a, double tol = kSymmetryTolerance);

struct EigenDecomp {
    Vector eigenvalues;   // descending
    Matrix eigenvectors;  // column j pairs with eigenvalues(j)
};

/// Cyclic Jacobi eigensolver. Eigenvalues are sorted descending and each
/// eigenvector is signed so that its largest-magnitude entry is positive
/// (ties go to the lowest index).
EigenDecomp sym_eig(const SymMatrix& a);

inline constexpr int kJacobiMaxSweeps = 100;

/// Symmetric inverse square root V diag(lambda^-1/2) V^T.
/// Throws NearSingular when lambda_min <= rel_floor * lambda_max.
SymMatrix inv_sqrt_sym(const SymMatrix& a, double rel_floor = 1e-10);

/// Symmetric square root of a PSD matrix.
SymMatrix sqrt_sym(const SymMatrix& a);

double spectral_norm(const SymMatrix& a);

/// Lower-triangular L with L L^T = a. Throws NotPositiveDefinite naming the
/// first pivot that is <= 1e-12.
Matrix cholesky(const SymMatrix& a);

/// Orthogonal projector onto the row space of a K x p basis.
SymMatrix row_space_projector(const Matrix& basis);

/// ||P_1 - P_2||_2 for the projectors onto the row spaces of two bases.
double projection_distance(const Matrix& v1, const Matrix& v2);

}  // namespace esir::linalg
