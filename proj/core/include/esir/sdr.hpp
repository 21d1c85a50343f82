#pragma once

#include <string>
#include <vector>

#include "esir/elliptical.hpp"
#include "esir/kendall.hpp"
#include "esir/linalg.hpp"

namespace esir::sdr {

using elliptical::Dataset;
using kendall::TauMatrix;
using linalg::Matrix;
using linalg::Vector;

enum class Method { SIR, ESIR };

std::string to_string(Method m);
/// "sir" or "esir", case-insensitive.
Method parse_method(const std::string& text);

/// Equal-count slices over the response order statistics. Slices 0..H-2
/// hold floor(n/H) points each; the last slice also takes the n mod H
/// remainder. Ties in y keep original index order.
struct SliceAssignment {
    std::vector<Eigen::Index> order;       // sorts y ascending
    std::vector<Eigen::Index> boundaries;  // H + 1 offsets into `order`
    int h_count = 0;

    Eigen::Index slice_size(int h) const { return boundaries[h + 1] - boundaries[h]; }
};

/// Throws TooFewPoints unless n >= 2h.
SliceAssignment slice_by_response(const Vector& y, int h);

/// H x p matrix whose row h is the mean of x rows in slice h.
Matrix slice_means(const Matrix& x, const SliceAssignment& a);

/// Kendall's tau over the H slice-mean rows (degenerate pairs skipped).
TauMatrix slice_kendall_tau(const Matrix& means);

struct SdrFit {
    Method method = Method::ESIR;
    Matrix directions;               // K x p, rows are beta_k
    Matrix standardized_directions;  // K x p, rows are eta_k (orthonormal)
    Vector eigenvalues;              // length K, descending
    int h_used = 0;
    int k = 0;
};

/// Whitened (the fitting path) or raw centred covariates when forming the
/// slice-mean tau matrix.
enum class Standardization { Whitened, Raw };

/// Slice-mean Kendall's tau matrix of the ESIR pipeline, before the eigen step.
TauMatrix esir_slice_matrix(const Dataset& d, int h,
                            Standardization mode = Standardization::Whitened);

/// Elliptical SIR: whiten by the inverse square root of the sample Kendall's
/// tau matrix, slice, take the tau matrix of the slice means, and map its
/// top-k eigenvectors back through the same whitening matrix.
SdrFit esir_fit(const Dataset& d, int h, int k);

/// Classic SIR with sample-covariance whitening and equally weighted
/// slice-mean second moments.
SdrFit sir_fit(const Dataset& d, int h, int k);

SdrFit fit(Method method, const Dataset& d, int h, int k);

}  // namespace esir::sdr
