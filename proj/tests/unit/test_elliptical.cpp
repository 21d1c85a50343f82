#include <algorithm>
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "esir/elliptical.hpp"
#include "esir/error.hpp"

using namespace esir;
using namespace esir::elliptical;

namespace {

double median(std::vector<double> v) {
    std::nth_element(v.begin(), v.begin() + static_cast<long>(v.size() / 2), v.end());
    return v[v.size() / 2];
}

double mean_xi_squared(const GeneratorKind& kind, int p, int draws, std::uint64_t seed) {
    Rng rng(seed);
    double s = 0.0;
    for (int i = 0; i < draws; ++i) {
        const double xi = sample_generating_variable(kind, p, rng);
        s += xi * xi;
    }
    return s / draws;
}

}  // namespace

TEST(UnitSphere, NormIsOne) {
    Rng rng(1);
    for (int p = 1; p <= 12; ++p)
        for (int i = 0; i < 100; ++i) EXPECT_NEAR(sample_unit_sphere(p, rng).norm(), 1.0, 1e-12);
}

TEST(UnitSphere, ZeroSphereIsFairCoin) {
    Rng rng(2);
    int positive = 0;
    const int draws = 10000;
    for (int i = 0; i < draws; ++i) {
        const double u = sample_unit_sphere(1, rng)(0);
        ASSERT_TRUE(u == 1.0 || u == -1.0);
        positive += u > 0;
    }
    EXPECT_NEAR(positive / static_cast<double>(draws), 0.5, 0.03);
}

TEST(UnitSphere, CoordinateMeansVanish) {
    Rng rng(3);
    Vector acc = Vector::Zero(2);
    const int draws = 100000;
    for (int i = 0; i < draws; ++i) acc += sample_unit_sphere(2, rng);
    acc /= draws;
    EXPECT_LE(acc.cwiseAbs().maxCoeff(), 0.02);
}

TEST(GeneratingVariable, NormalSecondMomentIsP) {
    const int draws = 100000;
    for (int p : {1, 3, 10}) {
        const double tol = 5.0 * std::sqrt(2.0 * p / draws);
        EXPECT_NEAR(mean_xi_squared(Normal{}, p, draws, 10 + p), p, tol) << "p=" << p;
    }
}

TEST(GeneratingVariable, LaplaceAndScaledStudentTHaveSecondMomentP) {
    // Var(xi^2) is larger than chi-square here; 10 SE-equivalents of slack.
    const int draws = 200000;
    const int p = 4;
    EXPECT_NEAR(mean_xi_squared(Laplace{}, p, draws, 5), p, 10.0 * std::sqrt(6.0 * p * p / draws));
    EXPECT_NEAR(mean_xi_squared(StudentT{6.0}, p, draws, 6), p, 0.15);
}

TEST(GeneratingVariable, LogisticScaleMatchesClosedFormAtP2) {
    // p = 2: E(Q) = int q g / int g = ln 2 / (1/2), so scale = 1/sqrt(ln 2).
    EXPECT_NEAR(logistic_scale(2), 1.0 / std::sqrt(std::log(2.0)), 1e-9);
}

TEST(GeneratingVariable, LogisticSecondMomentIsP) {
    for (int p : {1, 5, 10}) {
        EXPECT_NEAR(mean_xi_squared(Logistic{}, p, 100000, 40 + p), p, 0.04 * p) << "p=" << p;
    }
}

TEST(GeneratingVariable, CauchyRadiusHasUnitMedianInOneDimension) {
    Rng rng(4);
    std::vector<double> xs(100000);
    for (double& x : xs) x = sample_generating_variable(Cauchy{}, 1, rng);
    EXPECT_NEAR(median(xs), 1.0, 0.03);
}

TEST(GeneratingVariable, FRatioIsNonNegative) {
    Rng rng(5);
    for (int i = 0; i < 10000; ++i) EXPECT_GE(sample_generating_variable(FRatio{10, 1}, 10, rng), 0.0);
}

TEST(GeneratingVariable, RejectsBadDegreesOfFreedom) {
    Rng rng(1);
    EXPECT_THROW(validate(GeneratorKind{StudentT{0.0}}), Error);
    EXPECT_THROW(validate(GeneratorKind{FRatio{1.0, -2.0}}), Error);
}

TEST(ParseGenerator, KnownNames) {
    EXPECT_EQ(name(parse_generator("normal", 3)), "normal");
    EXPECT_EQ(name(parse_generator("T3", 3)), "t3");
    EXPECT_EQ(name(parse_generator("t2.5", 3)), "t2.5");
    EXPECT_EQ(name(parse_generator("cauchy", 3)), "cauchy");
    EXPECT_EQ(name(parse_generator("ec1", 7)), "F(7,1)");
    EXPECT_EQ(name(parse_generator("F(10,1)", 7)), "F(10,1)");
    EXPECT_THROW(parse_generator("weibull", 3), Error);
    EXPECT_THROW(parse_generator("t", 3), Error);
    EXPECT_THROW(parse_generator("t-1", 3), Error);
}

TEST(SampleElliptical, NormalCovarianceMatchesScatter) {
    const EllipticalSpec spec(Vector::Zero(2), SymMatrix::identity(2), Normal{});
    Rng rng(6);
    const Matrix x = sample_elliptical(spec, 100000, rng);
    const Matrix c = x.rowwise() - x.colwise().mean();
    const Matrix cov = c.transpose() * c / (x.rows() - 1.0);
    EXPECT_LE((cov - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff(), 0.03);
}

TEST(SampleElliptical, SingleRowShape) {
    const EllipticalSpec spec(Vector::Zero(4), SymMatrix::identity(4), Laplace{});
    Rng rng(7);
    const Matrix x = sample_elliptical(spec, 1, rng);
    EXPECT_EQ(x.rows(), 1);
    EXPECT_EQ(x.cols(), 4);
}

TEST(SampleElliptical, CauchyIsCentredAndSignBalanced) {
    const EllipticalSpec spec(Vector::Zero(3), SymMatrix::identity(3), Cauchy{});
    Rng rng(8);
    const Matrix x = sample_elliptical(spec, 100000, rng);
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        std::vector<double> col(x.col(j).data(), x.col(j).data() + x.rows());
        EXPECT_NEAR(median(col), 0.0, 0.02);
    }
    const double positive = (x.array() > 0.0).cast<double>().mean();
    EXPECT_GE(positive, 0.49);
    EXPECT_LE(positive, 0.51);
}

TEST(SampleElliptical, LocationShiftsSample) {
    Vector mu(2);
    mu << 5.0, -3.0;
    const EllipticalSpec spec(mu, SymMatrix::identity(2), Normal{});
    Rng rng(9);
    const Matrix x = sample_elliptical(spec, 20000, rng);
    EXPECT_NEAR(x.col(0).mean(), 5.0, 0.05);
    EXPECT_NEAR(x.col(1).mean(), -3.0, 0.05);
}

TEST(SampleElliptical, SeedDeterminism) {
    Matrix s(3, 3);
    s << 2, 0.5, 0, 0.5, 1, 0.2, 0, 0.2, 3;
    const EllipticalSpec spec(Vector::Zero(3), SymMatrix(s), StudentT{3});
    Rng a(42), b(42), c(43);
    const Matrix xa = sample_elliptical(spec, 500, a);
    EXPECT_EQ(xa, sample_elliptical(spec, 500, b));
    EXPECT_NE(xa, sample_elliptical(spec, 500, c));
}

TEST(EllipticalSpecCtor, PropagatesNotPositiveDefinite) {
    Matrix s(2, 2);
    s << 1, 2, 2, 1;
    try {
        EllipticalSpec(Vector::Zero(2), SymMatrix(s), Normal{});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NotPositiveDefinite);
    }
    EXPECT_THROW(EllipticalSpec(Vector::Zero(3), SymMatrix::identity(2), Normal{}), Error);
}

TEST(DatasetValidation, RejectsBadShapes) {
    Dataset d{Matrix::Zero(1, 2), Vector::Zero(1)};
    EXPECT_THROW(validate(d), Error);
    d = Dataset{Matrix::Zero(3, 2), Vector::Zero(2)};
    EXPECT_THROW(validate(d), Error);
    d = Dataset{Matrix::Zero(3, 2), Vector::Zero(3)};
    d.x(1, 1) = std::nan("");
    EXPECT_THROW(validate(d), Error);
}
