#include "esir/kendall.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include "esir/error.hpp"
#include "esir/parallel.hpp"

namespace esir::kendall {

namespace {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct BlockSum {
    std::vector<double> upper;  // packed upper triangle, row by row
    std::size_t pairs = 0;
    std::size_t degenerate = 0;
};

BlockSum& operator+=(BlockSum& a, const BlockSum& b) {
    for (std::size_t k = 0; k < a.upper.size(); ++k) a.upper[k] += b.upper[k];
    a.pairs += b.pairs;
    a.degenerate += b.degenerate;
    return a;
}

BlockSum accumulate_block(const RowMajor& x, const Vector& row_norms, Eigen::Index begin,
                          Eigen::Index end, ZeroDistancePolicy policy) {
    const Eigen::Index p = x.cols();
    BlockSum sum;
    sum.upper.assign(static_cast<std::size_t>(p * (p + 1) / 2), 0.0);
    std::vector<double> diff(static_cast<std::size_t>(p));

    for (Eigen::Index i = begin; i < end; ++i) {
        const double* xi = x.data() + i * p;
        const double threshold = 1e-12 * (1.0 + row_norms(i));
        for (Eigen::Index j = 0; j < i; ++j) {
            const double* xj = x.data() + j * p;
            double dist2 = 0.0;
            for (Eigen::Index a = 0; a < p; ++a) {
                const double d = xi[a] - xj[a];
                diff[static_cast<std::size_t>(a)] = d;
                dist2 += d * d;
            }
            if (std::sqrt(dist2) < threshold) {
                if (policy == ZeroDistancePolicy::Error) {
                    std::ostringstream msg;
                    msg << "rows " << j << " and " << i << " coincide";
                    throw Error(ErrorCode::DuplicatePoints, msg.str());
                }
                ++sum.degenerate;
                continue;
            }
            const double inv = 1.0 / dist2;
            std::size_t k = 0;
            for (Eigen::Index a = 0; a < p; ++a) {
                const double da = diff[static_cast<std::size_t>(a)] * inv;
                for (Eigen::Index b = a; b < p; ++b) sum.upper[k++] += da * diff[static_cast<std::size_t>(b)];
            }
            ++sum.pairs;
        }
    }
    return sum;
}

// Pairwise tree over block results in index order.
BlockSum reduce_tree(std::vector<BlockSum>& blocks) {
    for (std::size_t stride = 1; stride < blocks.size(); stride *= 2) {
        for (std::size_t i = 0; i + stride < blocks.size(); i += 2 * stride) {
            blocks[i] += blocks[i + stride];
        }
    }
    return std::move(blocks.front());
}

}  // namespace

TauMatrix::TauMatrix(SymMatrix m, std::size_t pairs_used) : m_(std::move(m)), pairs_(pairs_used) {
    const double tr = m_.trace();
    if (std::abs(tr - 1.0) > kTraceTolerance) {
        std::ostringstream msg;
        msg << "trace " << tr << " differs from 1";
        throw Error(ErrorCode::InvalidArgument, msg.str());
    }
    const auto ed = linalg::sym_eig(m_);
    if (ed.eigenvalues(ed.eigenvalues.size() - 1) < -kPsdTolerance) {
        throw Error(ErrorCode::InvalidArgument, "tau matrix is not positive semidefinite");
    }
}

TauMatrix kendall_tau(const Matrix& x, ZeroDistancePolicy policy) {
    const Eigen::Index n = x.rows();
    const Eigen::Index p = x.cols();
    if (n < 2) throw Error(ErrorCode::TooFewPoints, "kendall_tau needs at least 2 rows");
    if (p < 1) throw Error(ErrorCode::InvalidArgument, "kendall_tau needs at least 1 column");

    const RowMajor rows = x;
    const Vector row_norms = x.rowwise().norm();

    const auto block_count = static_cast<std::size_t>((n + kPairBlockRows - 1) / kPairBlockRows);
    std::vector<BlockSum> blocks(block_count);
    parallel_for(block_count, [&](std::size_t b) {
        const Eigen::Index begin = static_cast<Eigen::Index>(b) * kPairBlockRows;
        const Eigen::Index end = std::min(n, begin + kPairBlockRows);
        blocks[b] = accumulate_block(rows, row_norms, begin, end, policy);
    });
    const BlockSum total = reduce_tree(blocks);

    if (total.pairs == 0) {
        throw Error(ErrorCode::AllPairsDegenerate, "every pair of rows coincides");
    }

    Matrix upper = Matrix::Zero(p, p);
    std::size_t k = 0;
    const double scale = 1.0 / static_cast<double>(total.pairs);
    for (Eigen::Index a = 0; a < p; ++a)
        for (Eigen::Index b = a; b < p; ++b) upper(a, b) = total.upper[k++] * scale;
    return TauMatrix(SymMatrix::symmetrize(upper), total.pairs);
}

Vector population_tau_eigenvalues_mc(const Vector& sigma_eigenvalues, long mc_draws, Rng& rng) {
    const Eigen::Index p = sigma_eigenvalues.size();
    if (p < 1) throw Error(ErrorCode::InvalidArgument, "need at least one eigenvalue");
    if ((sigma_eigenvalues.array() <= 0.0).any()) {
        throw Error(ErrorCode::InvalidArgument, "scatter eigenvalues must be positive");
    }
    if (mc_draws < 10000) throw Error(ErrorCode::InvalidArgument, "mc_draws must be >= 1e4");
    if (p == 1) return Vector::Ones(1);

    Vector acc = Vector::Zero(p);
    Vector term(p);
    for (long draw = 0; draw < mc_draws; ++draw) {
        for (Eigen::Index j = 0; j < p; ++j) {
            const double q = rng.normal();
            term(j) = sigma_eigenvalues(j) * q * q;
        }
        acc += term / term.sum();
    }
    return acc / static_cast<double>(mc_draws);
}

double tau_vs_covariance_alignment(const Matrix& x, const SymMatrix& sigma) {
    const Eigen::Index p = x.cols();
    if (sigma.dim() != p) throw Error(ErrorCode::InvalidArgument, "sigma dimension differs from x");
    if (x.rows() < p + 1) throw Error(ErrorCode::TooFewPoints, "alignment needs n >= p + 1");
    if (p == 1) return 0.0;

    const auto sample = linalg::sym_eig(kendall_tau(x).sym());
    const auto population = linalg::sym_eig(sigma);
    const Vector& lam = population.eigenvalues;
    const double min_gap = 0.05 * lam(0);

    double worst = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) {
        const bool above = j == 0 || lam(j - 1) - lam(j) > min_gap;
        const bool below = j == p - 1 || lam(j) - lam(j + 1) > min_gap;
        if (!above || !below) continue;
        const double cosine = std::abs(sample.eigenvectors.col(j).dot(population.eigenvectors.col(j)));
        worst = std::max(worst, 1.0 - std::min(1.0, cosine));
    }
    return worst;
}

}  // namespace esir::kendall
