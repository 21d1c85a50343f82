#include <cmath>

#include <gtest/gtest.h>

#include "esir/error.hpp"
#include "esir/linalg.hpp"
#include "support/generators.hpp"

using namespace esir;
using namespace esir::linalg;

namespace {

Matrix mat2(double a, double b, double c, double d) {
    Matrix m(2, 2);
    m << a, b, c, d;
    return m;
}

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "expected esir::Error";
    return ErrorCode::InvalidArgument;
}

}  // namespace

TEST(SymMatrix, RejectsAsymmetricInput) {
    EXPECT_EQ(code_of([] { SymMatrix(mat2(1, 2, 2.1, 1)); }), ErrorCode::NotSymmetric);
    EXPECT_EQ(code_of([] { SymMatrix(Matrix(2, 3)); }), ErrorCode::NotSymmetric);
    EXPECT_NO_THROW(SymMatrix(mat2(1, 2, 2 + 1e-13, 1)));
}

TEST(SymEig, IdentityIsItsOwnDecomposition) {
    const auto ed = sym_eig(SymMatrix::identity(3));
    EXPECT_EQ(ed.eigenvalues, Vector::Ones(3));
    EXPECT_EQ(ed.eigenvectors, Matrix::Identity(3, 3));
}

TEST(SymEig, DiagonalSortsDescending) {
    Vector d(2);
    d << 4, 9;
    const auto ed = sym_eig(SymMatrix::diagonal(d));
    EXPECT_DOUBLE_EQ(ed.eigenvalues(0), 9.0);
    EXPECT_DOUBLE_EQ(ed.eigenvalues(1), 4.0);
    EXPECT_EQ(ed.eigenvectors, mat2(0, 1, 1, 0));
}

TEST(SymEig, TwoByTwoHandSolution) {
    // det([[2-l,1],[1,2-l]]) = (2-l)^2 - 1 -> l = 3, 1.
    const auto ed = sym_eig(SymMatrix(mat2(2, 1, 1, 2)));
    EXPECT_NEAR(ed.eigenvalues(0), 3.0, 1e-14);
    EXPECT_NEAR(ed.eigenvalues(1), 1.0, 1e-14);
    const double r = 1.0 / std::sqrt(2.0);
    EXPECT_NEAR(ed.eigenvectors(0, 0), r, 1e-14);
    EXPECT_NEAR(ed.eigenvectors(1, 0), r, 1e-14);
    // Largest-|entry| tie resolves to index 0, which must be positive.
    EXPECT_NEAR(ed.eigenvectors(0, 1), r, 1e-14);
    EXPECT_NEAR(ed.eigenvectors(1, 1), -r, 1e-14);
}

TEST(SymEig, RandomMatricesMatchInvariantsAndReferenceSolver) {
    std::mt19937_64 gen(11);
    for (int trial = 0; trial < 200; ++trial) {
        const int p = testgen::uniform_int(gen, 1, 8);
        const Matrix a = testgen::random_symmetric(gen, p);
        const auto ed = sym_eig(SymMatrix(a));
        const Matrix& v = ed.eigenvectors;

        EXPECT_LE(max_abs(v.transpose() * v - Matrix::Identity(p, p)), 1e-8);
        EXPECT_LE(max_abs(v * ed.eigenvalues.asDiagonal() * v.transpose() - a), 1e-8 * (1 + max_abs(a)));
        for (int j = 1; j < p; ++j) EXPECT_GE(ed.eigenvalues(j - 1), ed.eigenvalues(j));
        for (int j = 0; j < p; ++j) {
            Eigen::Index idx = 0;
            v.col(j).cwiseAbs().maxCoeff(&idx);
            EXPECT_GT(v(idx, j), 0.0);
        }

        Eigen::SelfAdjointEigenSolver<Matrix> ref(a);
        const Vector ref_desc = ref.eigenvalues().reverse();
        EXPECT_LE((ref_desc - ed.eigenvalues).cwiseAbs().maxCoeff(), 1e-10 * (1 + max_abs(a)));
    }
}

TEST(SymEig, DeterministicForIdenticalInput) {
    std::mt19937_64 gen(3);
    const SymMatrix a(testgen::random_symmetric(gen, 6));
    const auto e1 = sym_eig(a);
    const auto e2 = sym_eig(a);
    EXPECT_EQ(e1.eigenvalues, e2.eigenvalues);
    EXPECT_EQ(e1.eigenvectors, e2.eigenvectors);
}

TEST(InvSqrtSym, DiagonalAndIdentity) {
    Vector d(2);
    d << 4, 9;
    const auto b = inv_sqrt_sym(SymMatrix::diagonal(d));
    EXPECT_NEAR(b(0, 0), 0.5, 1e-15);
    EXPECT_NEAR(b(1, 1), 1.0 / 3.0, 1e-15);
    EXPECT_NEAR(b(0, 1), 0.0, 1e-15);
    EXPECT_LE(max_abs(inv_sqrt_sym(SymMatrix::identity(4)).matrix() - Matrix::Identity(4, 4)), 1e-15);
}

TEST(InvSqrtSym, TwoByTwoEigenReconstruction) {
    // V diag(1/sqrt3, 1) V^T with V = [(1,1), (1,-1)]/sqrt2.
    const double s = 1.0 / std::sqrt(3.0);
    const Matrix expected = 0.5 * mat2(s + 1, s - 1, s - 1, s + 1);
    const Matrix a = mat2(2, 1, 1, 2);
    const auto b = inv_sqrt_sym(SymMatrix(a));
    EXPECT_LE(max_abs(b.matrix() - expected), 1e-14);
    EXPECT_LE(max_abs(b.matrix() * a * b.matrix() - Matrix::Identity(2, 2)), 1e-6);
}

TEST(InvSqrtSym, SquareTimesInputIsIdentity) {
    std::mt19937_64 gen(5);
    for (int trial = 0; trial < 100; ++trial) {
        const int p = testgen::uniform_int(gen, 1, 8);
        const Matrix a = testgen::random_spd(gen, p);
        const Matrix b = inv_sqrt_sym(SymMatrix(a)).matrix();
        EXPECT_LE(max_abs(b * a * b - Matrix::Identity(p, p)), 1e-6);
        EXPECT_LE(max_abs(b * b * a - Matrix::Identity(p, p)), 1e-6);
        EXPECT_GT(sym_eig(SymMatrix::symmetrize(b)).eigenvalues.minCoeff(), 0.0);
    }
}

TEST(InvSqrtSym, NearSingularReportsRatio) {
    Vector d(2);
    d << 1.0, 1e-12;
    try {
        inv_sqrt_sym(SymMatrix::diagonal(d));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NearSingular);
        EXPECT_NE(std::string(e.what()).find("1e-12"), std::string::npos);
    }
    EXPECT_NO_THROW(inv_sqrt_sym(SymMatrix::diagonal(d), 1e-13));
}

TEST(SpectralNorm, Examples) {
    Vector d(2);
    d << -3, 2;
    EXPECT_DOUBLE_EQ(spectral_norm(SymMatrix::diagonal(d)), 3.0);
    EXPECT_DOUBLE_EQ(spectral_norm(SymMatrix(Matrix::Zero(3, 3))), 0.0);
    EXPECT_NEAR(spectral_norm(SymMatrix(mat2(2, 1, 1, 2))), 3.0, 1e-14);
}

TEST(SpectralNorm, EqualsLargestAbsoluteEigenvalue) {
    std::mt19937_64 gen(8);
    for (int trial = 0; trial < 50; ++trial) {
        const SymMatrix a(testgen::random_symmetric(gen, testgen::uniform_int(gen, 1, 8)));
        EXPECT_EQ(spectral_norm(a), sym_eig(a).eigenvalues.cwiseAbs().maxCoeff());
    }
}

TEST(Cholesky, Examples) {
    EXPECT_EQ(cholesky(SymMatrix::identity(3)), Matrix::Identity(3, 3));
    Vector d(2);
    d << 4, 9;
    EXPECT_EQ(cholesky(SymMatrix::diagonal(d)), mat2(2, 0, 0, 3));
    EXPECT_LE(max_abs(cholesky(SymMatrix(mat2(4, 2, 2, 5))) - mat2(2, 0, 1, 2)), 1e-15);
}

TEST(Cholesky, ReconstructsRandomSpd) {
    std::mt19937_64 gen(21);
    for (int trial = 0; trial < 50; ++trial) {
        const Matrix a = testgen::random_spd(gen, testgen::uniform_int(gen, 1, 8));
        const Matrix l = cholesky(SymMatrix(a));
        EXPECT_TRUE(l.isLowerTriangular());
        EXPECT_LE(max_abs(l * l.transpose() - a), 1e-8);
    }
}

TEST(Cholesky, NamesFailingPivot) {
    try {
        cholesky(SymMatrix(mat2(1, 2, 2, 1)));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NotPositiveDefinite);
        EXPECT_NE(std::string(e.what()).find("pivot 1"), std::string::npos);
    }
}

TEST(ProjectionDistance, Examples) {
    Matrix e1(1, 2), e2(1, 2), diag(1, 2);
    e1 << 1, 0;
    e2 << 0, 1;
    diag << 1, 1;
    EXPECT_NEAR(projection_distance(e1, e1), 0.0, 1e-15);
    EXPECT_NEAR(projection_distance(e1, e2), 1.0, 1e-15);
    // P1 - P2 = [[1/2, -1/2], [-1/2, -1/2]], eigenvalues +-1/sqrt2.
    EXPECT_NEAR(projection_distance(e1, diag / std::sqrt(2.0)), std::sqrt(0.5), 1e-14);
}

TEST(ProjectionDistance, SymmetricAndBasisInvariant) {
    std::mt19937_64 gen(2);
    for (int trial = 0; trial < 50; ++trial) {
        const int p = testgen::uniform_int(gen, 2, 8);
        const int k = testgen::uniform_int(gen, 1, p - 1);
        const Matrix v1 = testgen::random_matrix(gen, k, p);
        const Matrix v2 = testgen::random_matrix(gen, k, p);
        const Matrix r = testgen::random_matrix(gen, k, k) + 3.0 * Matrix::Identity(k, k);
        const double d = projection_distance(v1, v2);
        EXPECT_GE(d, 0.0);
        EXPECT_LE(d, 1.0 + 1e-12);
        EXPECT_NEAR(d, projection_distance(v2, v1), 1e-12);
        EXPECT_NEAR(d, projection_distance(r * v1, v2), 1e-8);
    }
}

TEST(ProjectionDistance, RankDeficientBasis) {
    Matrix v(2, 3);
    v << 1, 2, 3, 2, 4, 6;
    Matrix w(2, 3);
    w << 1, 0, 0, 0, 1, 0;
    EXPECT_EQ(code_of([&] { projection_distance(v, w); }), ErrorCode::RankDeficient);
}
