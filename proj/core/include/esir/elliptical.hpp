#pragma once

#include <cstdint>
#include <string>
#include <variant>

#include "esir/linalg.hpp"
#include "esir/rng.hpp"

namespace esir::elliptical {

using linalg::Matrix;
using linalg::SymMatrix;
using linalg::Vector;

// Generating-variable families. Cauchy is StudentT with one degree of freedom.
struct Normal {};
struct StudentT { double nu; };
struct Cauchy {};
struct Laplace {};
struct Logistic {};
struct FRatio { double d1; double d2; };

using GeneratorKind = std::variant<Normal, StudentT, Cauchy, Laplace, Logistic, FRatio>;

/// Throws InvalidArgument on non-positive degrees of freedom.
void validate(const GeneratorKind& kind);

/// Short label: normal, t3, t2.5, cauchy, laplace, logistic, F(10,1).
std::string name(const GeneratorKind& kind);

/// Accepts normal | laplace | logistic | cauchy | t<nu> | ec1 | F<d1>,<d2>.
/// "ec1" means F(p, 1), so the covariate dimension is needed.
GeneratorKind parse_generator(const std::string& text, int p);

/// Law of mu + xi * A * U with A = cholesky(sigma).
class EllipticalSpec {
public:
    EllipticalSpec(Vector mu, SymMatrix sigma, GeneratorKind generator);

    const Vector& mu() const noexcept { return mu_; }
    const SymMatrix& sigma() const noexcept { return sigma_; }
    const Matrix& factor() const noexcept { return factor_; }
    const GeneratorKind& generator() const noexcept { return generator_; }
    Eigen::Index dim() const noexcept { return mu_.size(); }

private:
    Vector mu_;
    SymMatrix sigma_;
    Matrix factor_;
    GeneratorKind generator_;
};

/// Covariates (rows are observations) and response.
struct Dataset {
    Matrix x;
    Vector y;
};

/// Throws InvalidArgument unless n >= 2, shapes agree, and all entries are finite.
void validate(const Dataset& d);

Vector sample_unit_sphere(int p, Rng& rng);

double sample_generating_variable(const GeneratorKind& kind, int p, Rng& rng);

/// n x p sample; for each row the radial draw precedes the direction draw.
Matrix sample_elliptical(const EllipticalSpec& spec, int n, Rng& rng);

/// Scale c such that xi = c * sqrt(Q) has E(xi^2) = p, where Q has density
/// proportional to q^{p/2-1} e^{-q} / (1 + e^{-q})^2. Cached per p.
double logistic_scale(int p);

}  // namespace esir::elliptical
