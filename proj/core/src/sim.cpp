#include "esir/sim.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <iomanip>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <tuple>

#include <json.hpp>

#include "esir/error.hpp"
#include "esir/parallel.hpp"

namespace esir::sim {

std::string to_string(ModelId id) {
    switch (id) {
        case ModelId::A1: return "A1";
        case ModelId::A2: return "A2";
        case ModelId::A3: return "A3";
        case ModelId::B1: return "B1";
        case ModelId::B2: return "B2";
        case ModelId::B3: return "B3";
        case ModelId::B4: return "B4";
    }
    return "?";
}

ModelId parse_model(const std::string& text) {
    std::string s;
    for (char c : text) s.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
    for (auto id : {ModelId::A1, ModelId::A2, ModelId::A3, ModelId::B1, ModelId::B2, ModelId::B3, ModelId::B4}) {
        if (to_string(id) == s) return id;
    }
    throw Error(ErrorCode::InvalidArgument, "unknown model '" + text + "'");
}

int model_k(ModelId id) {
    switch (id) {
        case ModelId::A1:
        case ModelId::A2:
        case ModelId::A3: return 1;
        default: return 2;
    }
}

int model_dimension(ModelId id, int requested_p) {
    switch (id) {
        case ModelId::B2:
        case ModelId::B3: return 5;
        case ModelId::B4:
            if (requested_p < 4) throw Error(ErrorCode::InvalidArgument, "model B4 needs p >= 4");
            return requested_p;
        case ModelId::B1:
            if (requested_p < 2) throw Error(ErrorCode::InvalidArgument, "model B1 needs p >= 2");
            return requested_p;
        default:
            if (requested_p < 1) throw Error(ErrorCode::InvalidArgument, "p must be >= 1");
            return requested_p;
    }
}

namespace {

SymMatrix ar_scatter(int dim, double rho) {
    Matrix m(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) m(i, j) = std::pow(rho, std::abs(i - j));
    return SymMatrix(m);
}

}  // namespace

ModelSpec make_model(ModelId id, int requested_p, GeneratorKind generator) {
    elliptical::validate(generator);
    ModelSpec m;
    m.id = id;
    m.p = model_dimension(id, requested_p);
    m.generator = generator;
    const int p = m.p;
    m.b_true = Matrix::Zero(model_k(id), p);

    switch (id) {
        case ModelId::A1:
        case ModelId::A2:
        case ModelId::A3:
            m.b_true(0, 0) = 1.0;
            m.sigma = m.sample_sigma = SymMatrix::identity(p);
            break;
        case ModelId::B1:
            m.b_true(0, 0) = 1.0;
            m.b_true(1, 1) = 1.0;
            m.sigma = m.sample_sigma = SymMatrix::identity(p);
            break;
        case ModelId::B2:
        case ModelId::B3: {
            m.b_true(0, 0) = 1.0;
            m.b_true(1, 1) = 1.0;
            m.b_true(1, 2) = 1.0;
            Vector d(5);
            d << 2, 2, 2, 4, 2;
            m.sigma = m.sample_sigma = SymMatrix::diagonal(d);
            break;
        }
        case ModelId::B4: {
            m.b_true.row(0).head(4) << 0.5, 0.5, 0.5, 0.5;
            m.b_true.row(1).head(4) << 0.5, -0.5, 0.5, -0.5;
            m.sample_sigma = ar_scatter(p - 1, 0.5);
            // X1 = |X2 + X3| + zeta is uncorrelated with X2..Xp; under a Gaussian
            // draw its variance is 1 + Var(X2 + X3)(1 - 2/pi) with Var(X2 + X3) = 3.
            Matrix s = Matrix::Zero(p, p);
            s(0, 0) = 1.0 + 3.0 * (1.0 - 2.0 / std::numbers::pi);
            s.bottomRightCorner(p - 1, p - 1) = m.sample_sigma.matrix();
            m.sigma = SymMatrix(s);
            break;
        }
    }
    return m;
}

ModelSpec make_model(ModelId id, int requested_p, const std::string& distribution) {
    const int p = model_dimension(id, requested_p);
    // ec1 is F(dim, 1) in the dimension actually sampled.
    const int draw_dim = id == ModelId::B4 ? p - 1 : p;
    return make_model(id, p, elliptical::parse_generator(distribution, draw_dim));
}

double model_response(const ModelSpec& model, const RowVector& x, double eps) {
    const double s = model.sigma_noise;
    const double b1x = model.b_true.row(0).dot(x);
    const double b2x = model.b_true.rows() > 1 ? model.b_true.row(1).dot(x) : 0.0;
    switch (model.id) {
        case ModelId::A1: return 1.0 / (0.5 + (b1x + 1.5) * (b1x + 1.5)) + s * eps;
        case ModelId::A2: return 0.5 + (b1x + 1.5) * (b1x + 1.5) + s * eps;
        case ModelId::A3: return (b1x + 2.0) * s * eps;
        case ModelId::B1: return b1x / (0.5 + (b2x + 1.5) * (b2x + 1.5)) + s * eps;
        case ModelId::B2: return 4.0 + b1x + (b2x + 2.0) * s * eps;
        case ModelId::B3: return (4.0 + b1x) * (b2x + 2.0) + s * eps;
        case ModelId::B4: return b1x * b1x + std::abs(b2x) + s * eps;
    }
    return 0.0;
}

Dataset gen_dataset(const ModelSpec& model, int n, Rng& rng) {
    if (n < 1) throw Error(ErrorCode::InvalidArgument, "n must be >= 1");
    Dataset d;
    if (model.id == ModelId::B4) {
        const elliptical::EllipticalSpec spec(Vector::Zero(model.p - 1), model.sample_sigma, model.generator);
        const Matrix tail = elliptical::sample_elliptical(spec, n, rng);
        d.x.resize(n, model.p);
        d.x.rightCols(model.p - 1) = tail;
        for (int i = 0; i < n; ++i) d.x(i, 0) = std::abs(tail(i, 0) + tail(i, 1)) + rng.normal();
    } else {
        const elliptical::EllipticalSpec spec(Vector::Zero(model.p), model.sample_sigma, model.generator);
        d.x = elliptical::sample_elliptical(spec, n, rng);
    }
    d.y.resize(n);
    for (int i = 0; i < n; ++i) d.y(i) = model_response(model, d.x.row(i), rng.normal());
    return d;
}

ReplicateSummary run_cell(const CellConfig& config) {
    if (config.reps < 1) throw Error(ErrorCode::InvalidArgument, "reps must be >= 1");
    const ModelSpec model = make_model(config.model, config.p, config.distribution);
    const int k = config.k == 0 ? model_k(config.model) : config.k;
    const auto truth = model.truth();

    std::vector<std::optional<Vector>> results(static_cast<std::size_t>(config.reps));
    parallel_for(results.size(), [&](std::size_t r) {
        Rng rng(config.base_seed + r);
        const Dataset d = gen_dataset(model, config.n, rng);
        try {
            const auto f = sdr::fit(config.method, d, config.h, k);
            results[r] = metrics::r_squared_per_direction(f, truth);
        } catch (const Error& e) {
            if (!e.is_numerical()) throw;
        }
    });

    ReplicateSummary s;
    s.config = config;
    s.config.p = model.p;
    s.config.k = k;
    for (auto& r : results) {
        if (r) s.replicate_r2.push_back(std::move(*r));
    }
    s.rep_count = static_cast<int>(s.replicate_r2.size());
    s.excluded = config.reps - s.rep_count;
    if (s.excluded * 10 > config.reps || s.rep_count == 0) {
        std::ostringstream msg;
        msg << s.excluded << " of " << config.reps << " replicates failed";
        throw Error(ErrorCode::TooManyFailures, msg.str());
    }

    s.r2_mean = Vector::Zero(k);
    for (const auto& v : s.replicate_r2) s.r2_mean += v;
    s.r2_mean /= static_cast<double>(s.rep_count);
    s.r2_sd = Vector::Zero(k);
    if (s.rep_count > 1) {
        for (const auto& v : s.replicate_r2) s.r2_sd += (v - s.r2_mean).cwiseAbs2();
        s.r2_sd = (s.r2_sd / static_cast<double>(s.rep_count - 1)).cwiseSqrt();
    }
    s.avg_r2 = s.r2_mean.mean();
    return s;
}

std::string to_json_record(const ReplicateSummary& cell) {
    const auto& c = cell.config;
    nlohmann::json j;
    j["model"] = to_string(c.model);
    j["dist"] = c.distribution;
    j["n"] = c.n;
    j["p"] = c.p;
    j["h"] = c.h;
    j["k"] = c.k;
    j["method"] = sdr::to_string(c.method);
    j["seed"] = c.base_seed;
    j["rep_count"] = cell.rep_count;
    j["excluded"] = cell.excluded;
    j["r2_mean"] = std::vector<double>(cell.r2_mean.data(), cell.r2_mean.data() + cell.r2_mean.size());
    j["r2_sd"] = std::vector<double>(cell.r2_sd.data(), cell.r2_sd.data() + cell.r2_sd.size());
    j["avg_r2"] = cell.avg_r2;
    return j.dump();
}

namespace {

using CellKey = std::tuple<int, std::string, int, int, int, int>;  // model, dist, n, p, h, method

CellKey key_of(const CellConfig& c) {
    return {static_cast<int>(c.model), c.distribution, c.n, c.p, c.h, static_cast<int>(c.method)};
}

template <class T>
void add_unique(std::vector<T>& v, const T& x) {
    if (std::find(v.begin(), v.end(), x) == v.end()) v.push_back(x);
}

std::string fixed2(double v) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(2) << v;
    return os.str();
}

std::string pad(const std::string& s, std::size_t width) {
    return s.size() >= width ? s + " " : s + std::string(width - s.size(), ' ');
}

struct Axes {
    std::vector<ModelId> models;
    std::vector<std::string> dists;
    std::vector<int> ns, ps, hs;
    std::vector<sdr::Method> methods;
};

Axes collect_axes(const std::vector<ReplicateSummary>& cells) {
    Axes a;
    for (const auto& cell : cells) {
        const auto& c = cell.config;
        add_unique(a.models, c.model);
        add_unique(a.dists, c.distribution);
        add_unique(a.ns, c.n);
        add_unique(a.ps, c.p);
        add_unique(a.hs, c.h);
        add_unique(a.methods, c.method);
    }
    std::sort(a.models.begin(), a.models.end());
    std::sort(a.ns.begin(), a.ns.end());
    std::sort(a.ps.begin(), a.ps.end());
    std::sort(a.hs.begin(), a.hs.end());
    std::sort(a.methods.begin(), a.methods.end());
    return a;
}

}  // namespace

TableOutput emit_table(const std::vector<ReplicateSummary>& cells, TableLayout layout) {
    if (cells.empty()) throw Error(ErrorCode::MissingCell, "no cells to tabulate");

    std::map<CellKey, const ReplicateSummary*> index;
    for (const auto& cell : cells) index[key_of(cell.config)] = &cell;
    const Axes ax = collect_axes(cells);

    // Model, dimension-per-model and n/H are part of the grid only where the
    // layout shows them; Table 1 and Tables 3/4 let p follow the model.
    auto lookup = [&](ModelId m, const std::string& dist, int n, std::optional<int> p, int h,
                      sdr::Method method) -> const ReplicateSummary& {
        for (const auto& [key, cell] : index) {
            const auto& c = cell->config;
            if (c.model == m && c.distribution == dist && c.n == n && c.h == h && c.method == method &&
                (!p || c.p == *p))
                return *cell;
        }
        std::ostringstream msg;
        msg << "no cell for model " << to_string(m) << ", dist " << dist << ", n " << n;
        if (p) msg << ", p " << *p;
        msg << ", H " << h << ", method " << sdr::to_string(method);
        throw Error(ErrorCode::MissingCell, msg.str());
    };

    TableOutput out;
    std::ostringstream text;

    if (layout == TableLayout::Table1 || layout == TableLayout::Table3_4) {
        if (ax.ns.size() != 1 || ax.hs.size() != 1) {
            throw Error(ErrorCode::MissingCell, "Table 1 / Tables 3-4 layouts need a single n and H");
        }
        const int n = ax.ns.front();
        const int h = ax.hs.front();
        const bool two_dirs = layout == TableLayout::Table3_4;
        const std::size_t w = 13;

        text << pad("Distr of X", 14);
        for (const auto& d : ax.dists) text << pad(d, two_dirs ? 3 * w : w);
        text << "\n" << pad("", 14);
        for (std::size_t i = 0; i < ax.dists.size(); ++i) {
            if (two_dirs)
                text << pad("R2(b1)", w) << pad("R2(b2)", w) << pad("R2", w);
            else
                text << pad("R2(b1)", w);
        }
        text << "\n";
        for (auto m : ax.models) {
            text << "Model (" << to_string(m) << ")\n";
            for (auto method : ax.methods) {
                text << pad(sdr::to_string(method), 14);
                for (const auto& d : ax.dists) {
                    const auto& c = lookup(m, d, n, std::nullopt, h, method);
                    out.json_records.push_back(to_json_record(c));
                    const Eigen::Index dirs = two_dirs ? c.r2_mean.size() : 1;
                    for (Eigen::Index j = 0; j < dirs; ++j)
                        text << pad(fixed2(c.r2_mean(j)) + " (" + fixed2(c.r2_sd(j)) + ")", w);
                    if (two_dirs) {
                        for (Eigen::Index j = dirs; j < 2; ++j) text << pad("-", w);
                        text << pad(fixed2(c.avg_r2), w);
                    }
                }
                text << "\n";
            }
        }
    } else {
        if (ax.models.size() != 1 || ax.dists.size() != 1) {
            throw Error(ErrorCode::MissingCell, "Table 2 layout needs a single model and distribution");
        }
        const ModelId m = ax.models.front();
        const std::string& dist = ax.dists.front();
        text << "Model (" << to_string(m) << "), " << dist << "\n";
        text << pad("H", 18);
        for (int h : ax.hs)
            for (std::size_t i = 0; i < ax.ps.size(); ++i) text << pad(i == 0 ? std::to_string(h) : "", 6);
        text << "\n" << pad("p", 18);
        for (std::size_t i = 0; i < ax.hs.size(); ++i)
            for (int p : ax.ps) text << pad(std::to_string(p), 6);
        text << "\n";
        for (int n : ax.ns) {
            text << "n=" << n << "\n";
            for (auto method : ax.methods) {
                int dirs = 0;
                for (int h : ax.hs)
                    for (int p : ax.ps)
                        dirs = std::max(dirs, static_cast<int>(lookup(m, dist, n, p, h, method).r2_mean.size()));
                for (int j = 0; j < dirs; ++j) {
                    text << pad(j == 0 ? sdr::to_string(method) : "", 6) << pad("R2(b" + std::to_string(j + 1) + ")", 12);
                    for (int h : ax.hs) {
                        for (int p : ax.ps) {
                            const auto& c = lookup(m, dist, n, p, h, method);
                            if (j == 0) out.json_records.push_back(to_json_record(c));
                            text << pad(j < c.r2_mean.size() ? fixed2(c.r2_mean(j)) : "-", 6);
                        }
                    }
                    text << "\n";
                }
            }
        }
    }
    out.text = text.str();
    return out;
}

ConvergenceResult convergence_experiment(const ConvergenceConfig& config) {
    if (config.n_grid.empty()) throw Error(ErrorCode::InvalidArgument, "n_grid is empty");
    if (!std::is_sorted(config.n_grid.begin(), config.n_grid.end()))
        throw Error(ErrorCode::InvalidArgument, "n_grid must be ascending");
    if (config.reps < 1) throw Error(ErrorCode::InvalidArgument, "reps must be >= 1");
    const int max_n = config.n_grid.back();
    if (static_cast<long>(config.oracle_n) < 10L * max_n) {
        throw Error(ErrorCode::InvalidArgument, "oracle_n must be at least 10 * max(n_grid)");
    }
    const ModelSpec model = make_model(config.model, config.p, config.distribution);

    ConvergenceResult result;
    result.oracle_h = static_cast<int>(std::floor(std::sqrt(static_cast<double>(config.oracle_n))));
    {
        Rng rng(config.base_seed + static_cast<std::uint64_t>(config.reps));
        const Dataset big = gen_dataset(model, config.oracle_n, rng);
        result.oracle = sdr::esir_slice_matrix(big, result.oracle_h, config.mode).matrix();
    }

    for (int n : config.n_grid) {
        const int h = config.h_rule(n);
        std::vector<double> errors(static_cast<std::size_t>(config.reps));
        parallel_for(errors.size(), [&](std::size_t r) {
            Rng rng(config.base_seed + r);
            const Dataset d = gen_dataset(model, n, rng);
            const auto m = sdr::esir_slice_matrix(d, h, config.mode);
            errors[r] = linalg::spectral_norm(SymMatrix::symmetrize(m.matrix() - result.oracle));
        });
        ConvergencePoint pt;
        pt.n = n;
        pt.h = h;
        double sum = 0.0;
        for (double e : errors) sum += e;
        pt.mean_error = sum / config.reps;
        if (config.reps > 1) {
            double ss = 0.0;
            for (double e : errors) ss += (e - pt.mean_error) * (e - pt.mean_error);
            pt.standard_error = std::sqrt(ss / (config.reps - 1)) / std::sqrt(static_cast<double>(config.reps));
        }
        result.points.push_back(pt);
    }
    return result;
}

bool non_increasing_within_se(const std::vector<ConvergencePoint>& points) {
    for (std::size_t i = 1; i < points.size(); ++i) {
        const double se = std::max(points[i].standard_error, points[i - 1].standard_error);
        if (points[i].mean_error > points[i - 1].mean_error + se) return false;
    }
    return true;
}

}  // namespace esir::sim
