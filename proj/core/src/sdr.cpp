#include "esir/sdr.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <sstream>

#include "esir/error.hpp"

namespace esir::sdr {

using linalg::SymMatrix;

std::string to_string(Method m) { return m == Method::SIR ? "SIR" : "ESIR"; }

Method parse_method(const std::string& text) {
    std::string s;
    for (char c : text) s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (s == "sir") return Method::SIR;
    if (s == "esir") return Method::ESIR;
    throw Error(ErrorCode::InvalidArgument, "unknown method '" + text + "'");
}

SliceAssignment slice_by_response(const Vector& y, int h) {
    const Eigen::Index n = y.size();
    if (h < 1) throw Error(ErrorCode::InvalidArgument, "number of slices must be >= 1");
    if (n < 2 * static_cast<Eigen::Index>(h)) {
        std::ostringstream msg;
        msg << "n = " << n << " is below 2H = " << 2 * h;
        throw Error(ErrorCode::TooFewPoints, msg.str());
    }
    SliceAssignment a;
    a.h_count = h;
    a.order.resize(static_cast<std::size_t>(n));
    std::iota(a.order.begin(), a.order.end(), Eigen::Index{0});
    std::stable_sort(a.order.begin(), a.order.end(),
                     [&](Eigen::Index i, Eigen::Index j) { return y(i) < y(j); });
    const Eigen::Index l = n / h;
    a.boundaries.resize(static_cast<std::size_t>(h) + 1);
    for (int s = 0; s < h; ++s) a.boundaries[static_cast<std::size_t>(s)] = s * l;
    a.boundaries.back() = n;
    return a;
}

Matrix slice_means(const Matrix& x, const SliceAssignment& a) {
    if (static_cast<std::size_t>(x.rows()) != a.order.size()) {
        throw Error(ErrorCode::InvalidArgument, "slice assignment does not match row count");
    }
    Matrix means = Matrix::Zero(a.h_count, x.cols());
    for (int s = 0; s < a.h_count; ++s) {
        const auto begin = a.boundaries[static_cast<std::size_t>(s)];
        const auto end = a.boundaries[static_cast<std::size_t>(s) + 1];
        for (auto r = begin; r < end; ++r) means.row(s) += x.row(a.order[static_cast<std::size_t>(r)]);
        means.row(s) /= static_cast<double>(end - begin);
    }
    return means;
}

TauMatrix slice_kendall_tau(const Matrix& means) {
    if (means.rows() < 2) throw Error(ErrorCode::TooFewPoints, "need at least 2 slice means");
    return kendall::kendall_tau(means, kendall::ZeroDistancePolicy::Skip);
}

namespace {

void check_shape(const Dataset& d, int h, int k) {
    elliptical::validate(d);
    const auto p = d.x.cols();
    if (h < 2) throw Error(ErrorCode::InvalidArgument, "number of slices must be >= 2");
    if (k < 1) throw Error(ErrorCode::InvalidArgument, "K must be >= 1");
    if (k > std::min<Eigen::Index>(p, h - 1)) {
        std::ostringstream msg;
        msg << "K = " << k << " exceeds min(p, H - 1) = " << std::min<Eigen::Index>(p, h - 1);
        throw Error(ErrorCode::KTooLarge, msg.str());
    }
    if (d.x.rows() < 2 * static_cast<Eigen::Index>(h)) {
        std::ostringstream msg;
        msg << "n = " << d.x.rows() << " is below 2H = " << 2 * h;
        throw Error(ErrorCode::TooFewPoints, msg.str());
    }
}

Matrix centered(const Matrix& x) { return x.rowwise() - x.colwise().mean(); }

SdrFit finish(Method method, const SymMatrix& target, const SymMatrix& whitener, int h, int k) {
    const auto ed = linalg::sym_eig(target);
    SdrFit fit;
    fit.method = method;
    fit.h_used = h;
    fit.k = k;
    fit.standardized_directions = ed.eigenvectors.leftCols(k).transpose();
    fit.eigenvalues = ed.eigenvalues.head(k);
    fit.directions = fit.standardized_directions * whitener.matrix();
    return fit;
}

}  // namespace

TauMatrix esir_slice_matrix(const Dataset& d, int h, Standardization mode) {
    elliptical::validate(d);
    Matrix z = centered(d.x);
    if (mode == Standardization::Whitened) {
        const auto tau = kendall::kendall_tau(d.x, kendall::ZeroDistancePolicy::Skip);
        z = z * linalg::inv_sqrt_sym(tau.sym()).matrix();
    }
    return slice_kendall_tau(slice_means(z, slice_by_response(d.y, h)));
}

SdrFit esir_fit(const Dataset& d, int h, int k) {
    check_shape(d, h, k);
    const auto tau = kendall::kendall_tau(d.x, kendall::ZeroDistancePolicy::Skip);
    const SymMatrix whitener = linalg::inv_sqrt_sym(tau.sym());
    const Matrix z = centered(d.x) * whitener.matrix();
    const auto slice_tau = slice_kendall_tau(slice_means(z, slice_by_response(d.y, h)));
    return finish(Method::ESIR, slice_tau.sym(), whitener, h, k);
}

SdrFit sir_fit(const Dataset& d, int h, int k) {
    check_shape(d, h, k);
    const Matrix c = centered(d.x);
    const auto cov = SymMatrix::symmetrize(c.transpose() * c / static_cast<double>(d.x.rows() - 1));
    const SymMatrix whitener = linalg::inv_sqrt_sym(cov);
    const Matrix means = slice_means(c * whitener.matrix(), slice_by_response(d.y, h));
    const auto second_moment = SymMatrix::symmetrize(means.transpose() * means / static_cast<double>(h));
    return finish(Method::SIR, second_moment, whitener, h, k);
}

SdrFit fit(Method method, const Dataset& d, int h, int k) {
    return method == Method::SIR ? sir_fit(d, h, k) : esir_fit(d, h, k);
}

}  // namespace esir::sdr
