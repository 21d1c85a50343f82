#include "esir/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

#include "esir/error.hpp"

namespace esir {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::NotSymmetric: return "NotSymmetric";
        case ErrorCode::NoConvergence: return "NoConvergence";
        case ErrorCode::NearSingular: return "NearSingular";
        case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
        case ErrorCode::RankDeficient: return "RankDeficient";
        case ErrorCode::DuplicatePoints: return "DuplicatePoints";
        case ErrorCode::AllPairsDegenerate: return "AllPairsDegenerate";
        case ErrorCode::TooFewPoints: return "TooFewPoints";
        case ErrorCode::KTooLarge: return "KTooLarge";
        case ErrorCode::DegenerateDirection: return "DegenerateDirection";
        case ErrorCode::RankDeficientDesign: return "RankDeficientDesign";
        case ErrorCode::DegenerateSample: return "DegenerateSample";
        case ErrorCode::TooManyFailures: return "TooManyFailures";
        case ErrorCode::MissingCell: return "MissingCell";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

bool Error::is_numerical() const noexcept {
    switch (code_) {
        case ErrorCode::NoConvergence:
        case ErrorCode::NearSingular:
        case ErrorCode::NotPositiveDefinite:
        case ErrorCode::RankDeficient:
        case ErrorCode::AllPairsDegenerate:
        case ErrorCode::DuplicatePoints:
        case ErrorCode::DegenerateDirection:
        case ErrorCode::RankDeficientDesign:
        case ErrorCode::DegenerateSample:
        case ErrorCode::TooManyFailures:
            return true;
        default:
            return false;
    }
}

}  // namespace esir

namespace esir::linalg {

bool is_symmetric(const Matrix& a, double tol) {
    if (a.rows() != a.cols()) return false;
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = i + 1; j < a.cols(); ++j) {
            const double scale = std::max({1.0, std::abs(a(i, j)), std::abs(a(j, i))});
            if (!(std::abs(a(i, j) - a(j, i)) <= tol * scale)) return false;
        }
    }
    return true;
}

SymMatrix::SymMatrix(Matrix entries) : m_(std::move(entries)) {
    if (m_.rows() < 1 || m_.rows() != m_.cols()) {
        throw Error(ErrorCode::NotSymmetric, "matrix must be square with dim >= 1");
    }
    if (!m_.allFinite()) throw Error(ErrorCode::NotSymmetric, "matrix has non-finite entries");
    if (!is_symmetric(m_)) throw Error(ErrorCode::NotSymmetric, "asymmetry exceeds tolerance");
}

SymMatrix SymMatrix::identity(Eigen::Index dim) {
    if (dim < 1) throw Error(ErrorCode::InvalidArgument, "dim must be >= 1");
    return SymMatrix(Matrix::Identity(dim, dim), Unchecked{});
}

SymMatrix SymMatrix::diagonal(const Vector& diag) {
    if (diag.size() < 1) throw Error(ErrorCode::InvalidArgument, "dim must be >= 1");
    return SymMatrix(Matrix(diag.asDiagonal()), Unchecked{});
}

SymMatrix SymMatrix::symmetrize(const Matrix& upper) {
    if (upper.rows() < 1 || upper.rows() != upper.cols()) {
        throw Error(ErrorCode::NotSymmetric, "matrix must be square with dim >= 1");
    }
    Matrix m = upper.triangularView<Eigen::Upper>();
    m.triangularView<Eigen::StrictlyLower>() = m.transpose();
    return SymMatrix(std::move(m), Unchecked{});
}

namespace {

double off_diagonal_norm(const Matrix& a) {
    double s = 0.0;
    for (Eigen::Index j = 0; j < a.cols(); ++j)
        for (Eigen::Index i = 0; i < a.rows(); ++i)
            if (i != j) s += a(i, j) * a(i, j);
    return std::sqrt(s);
}

void fix_sign(Eigen::Ref<Vector> v) {
    const double largest = v.cwiseAbs().maxCoeff();
    if (largest == 0.0) return;
    // Near-ties resolve to the lowest index so (1,-1)/sqrt2 is stable.
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (std::abs(v(i)) >= largest * (1.0 - 1e-10)) {
            if (v(i) < 0.0) v = -v;
            return;
        }
    }
}

}  // namespace

EigenDecomp sym_eig(const SymMatrix& sym) {
    Matrix a = sym.matrix();
    const Eigen::Index n = a.rows();
    Matrix v = Matrix::Identity(n, n);

    const double scale = a.norm();
    const double tol = 1e-12 * (scale > 0.0 ? scale : 1.0);

    int sweep = 0;
    while (off_diagonal_norm(a) > tol) {
        if (++sweep > kJacobiMaxSweeps) {
            std::ostringstream msg;
            msg << "Jacobi did not converge in " << kJacobiMaxSweeps << " sweeps";
            throw Error(ErrorCode::NoConvergence, msg.str());
        }
        for (Eigen::Index p = 0; p < n - 1; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;

                for (Eigen::Index k = 0; k < n; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;

                for (Eigen::Index k = 0; k < n; ++k) {
                    const double vkp = v(k, p);
                    const double vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index i, Eigen::Index j) { return a(i, i) > a(j, j); });

    EigenDecomp out{Vector(n), Matrix(n, n)};
    for (Eigen::Index j = 0; j < n; ++j) {
        const auto src = order[static_cast<std::size_t>(j)];
        out.eigenvalues(j) = a(src, src);
        out.eigenvectors.col(j) = v.col(src);
        fix_sign(out.eigenvectors.col(j));
    }
    return out;
}

SymMatrix inv_sqrt_sym(const SymMatrix& a, double rel_floor) {
    const EigenDecomp ed = sym_eig(a);
    const double lmax = ed.eigenvalues(0);
    const double lmin = ed.eigenvalues(ed.eigenvalues.size() - 1);
    if (!(lmax > 0.0) || !(lmin > rel_floor * lmax)) {
        std::ostringstream msg;
        msg << "lambda_min/lambda_max = " << (lmax != 0.0 ? lmin / lmax : 0.0)
            << " does not exceed floor " << rel_floor;
        throw Error(ErrorCode::NearSingular, msg.str());
    }
    const Vector d = ed.eigenvalues.cwiseSqrt().cwiseInverse();
    return SymMatrix::symmetrize(ed.eigenvectors * d.asDiagonal() * ed.eigenvectors.transpose());
}

SymMatrix sqrt_sym(const SymMatrix& a) {
    const EigenDecomp ed = sym_eig(a);
    const Vector d = ed.eigenvalues.cwiseMax(0.0).cwiseSqrt();
    return SymMatrix::symmetrize(ed.eigenvectors * d.asDiagonal() * ed.eigenvectors.transpose());
}

double spectral_norm(const SymMatrix& a) {
    return sym_eig(a).eigenvalues.cwiseAbs().maxCoeff();
}

Matrix cholesky(const SymMatrix& sym) {
    const Matrix& a = sym.matrix();
    const Eigen::Index n = a.rows();
    Matrix l = Matrix::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        double pivot = a(j, j);
        for (Eigen::Index k = 0; k < j; ++k) pivot -= l(j, k) * l(j, k);
        if (!(pivot > 1e-12)) {
            std::ostringstream msg;
            msg << "pivot " << j << " = " << pivot;
            throw Error(ErrorCode::NotPositiveDefinite, msg.str());
        }
        l(j, j) = std::sqrt(pivot);
        for (Eigen::Index i = j + 1; i < n; ++i) {
            double s = a(i, j);
            for (Eigen::Index k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            l(i, j) = s / l(j, j);
        }
    }
    return l;
}

SymMatrix row_space_projector(const Matrix& basis) {
    if (basis.rows() < 1 || basis.cols() < 1) {
        throw Error(ErrorCode::RankDeficient, "empty basis");
    }
    if (basis.rows() > basis.cols()) {
        throw Error(ErrorCode::RankDeficient, "more rows than columns");
    }
    const SymMatrix gram = SymMatrix::symmetrize(basis * basis.transpose());
    const EigenDecomp ed = sym_eig(gram);
    const double lmax = ed.eigenvalues(0);
    const double lmin = ed.eigenvalues(ed.eigenvalues.size() - 1);
    if (!(lmax > 0.0) || !(lmin > 1e-12 * lmax)) {
        throw Error(ErrorCode::RankDeficient, "basis rows are linearly dependent");
    }
    const Matrix gram_inv =
        ed.eigenvectors * ed.eigenvalues.cwiseInverse().asDiagonal() * ed.eigenvectors.transpose();
    return SymMatrix::symmetrize(basis.transpose() * gram_inv * basis);
}

double projection_distance(const Matrix& v1, const Matrix& v2) {
    if (v1.cols() != v2.cols()) {
        throw Error(ErrorCode::InvalidArgument, "bases live in different ambient dimensions");
    }
    const SymMatrix p1 = row_space_projector(v1);
    const SymMatrix p2 = row_space_projector(v2);
    return spectral_norm(SymMatrix::symmetrize(p1.matrix() - p2.matrix()));
}

}  // namespace esir::linalg
