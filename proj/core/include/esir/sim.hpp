#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "esir/elliptical.hpp"
#include "esir/metrics.hpp"
#include "esir/sdr.hpp"

namespace esir::sim {

using elliptical::Dataset;
using elliptical::GeneratorKind;
using linalg::Matrix;
using linalg::RowVector;
using linalg::SymMatrix;
using linalg::Vector;

enum class ModelId { A1, A2, A3, B1, B2, B3, B4 };

std::string to_string(ModelId id);
ModelId parse_model(const std::string& text);

/// Number of true directions: 1 for the A models, 2 for the B models.
int model_k(ModelId id);

/// Dimension the model actually uses: B2 and B3 are fixed at p = 5, B4
/// needs p >= 4, the others accept any p >= 1 (>= 2 for B1).
int model_dimension(ModelId id, int requested_p);

struct ModelSpec {
    ModelId id = ModelId::A1;
    int p = 10;
    GeneratorKind generator = elliptical::Normal{};
    SymMatrix sigma = SymMatrix::identity(1);        // population scatter used by R^2
    SymMatrix sample_sigma = SymMatrix::identity(1);  // scatter of the elliptical draw
    Matrix b_true;
    double sigma_noise = 0.5;

    metrics::TruthSpec truth() const { return metrics::TruthSpec(b_true, sigma); }
};

/// Builds the model with its fixed structure. `requested_p` passes through
/// model_dimension.
ModelSpec make_model(ModelId id, int requested_p, GeneratorKind generator);

/// Same, with the distribution given by name (see elliptical::parse_generator;
/// "ec1" resolves against the model's dimension).
ModelSpec make_model(ModelId id, int requested_p, const std::string& distribution);

/// Noise-free part plus noise placement of each model, evaluated at one row.
double model_response(const ModelSpec& model, const RowVector& x, double eps);

/// Draws n covariate rows, then (B4 only) the n zeta values, then n noise draws.
Dataset gen_dataset(const ModelSpec& model, int n, Rng& rng);

struct CellConfig {
    ModelId model = ModelId::A1;
    std::string distribution = "normal";
    int n = 400;
    int p = 10;
    int h = 10;
    int k = 0;  // 0 = model_k(model)
    int reps = 100;
    sdr::Method method = sdr::Method::ESIR;
    std::uint64_t base_seed = 1;
};

/// One table cell: R^2 of each fitted direction summarised over replicates.
struct ReplicateSummary {
    CellConfig config;   // p and k as actually used
    int rep_count = 0;   // replicates that produced a fit
    int excluded = 0;    // replicates whose fit raised a numerical error
    Vector r2_mean;
    Vector r2_sd;        // denominator count - 1; 0 when count == 1
    double avg_r2 = 0.0;
    std::vector<Vector> replicate_r2;  // per surviving replicate, in replicate order
};

/// Runs `reps` replicates with seeds base_seed + r. Throws TooManyFailures if
/// more than 10% of replicates fail.
ReplicateSummary run_cell(const CellConfig& config);

enum class TableLayout { Table1, Table2, Table3_4 };

struct TableOutput {
    std::string text;
    std::vector<std::string> json_records;  // one JSON object per cell
};

/// JSON object for one cell: model, dist, n, p, h, k, method, seed,
/// rep_count, excluded, r2_mean, r2_sd, avg_r2.
std::string to_json_record(const ReplicateSummary& cell);

/// Formats cells on the layout's grid. Throws MissingCell when `cells` is
/// empty or does not cover every grid position implied by its own values.
TableOutput emit_table(const std::vector<ReplicateSummary>& cells, TableLayout layout);

struct ConvergenceConfig {
    ModelId model = ModelId::A2;
    std::string distribution = "normal";
    int p = 10;
    std::vector<int> n_grid{200, 800, 3200};
    std::function<int(int)> h_rule = [](int) { return 10; };
    int oracle_n = 1'000'000;
    int reps = 50;
    std::uint64_t base_seed = 1;
    sdr::Standardization mode = sdr::Standardization::Raw;
};

struct ConvergencePoint {
    int n = 0;
    int h = 0;
    double mean_error = 0.0;
    double standard_error = 0.0;
};

struct ConvergenceResult {
    Matrix oracle;
    int oracle_h = 0;
    std::vector<ConvergencePoint> points;
};

/// Mean over replicates of ||M_hat_m(n) - oracle||_2 for each n. The oracle is
/// the slice-mean tau matrix of one dataset of size oracle_n with
/// floor(sqrt(oracle_n)) slices, drawn with seed base_seed + reps. Replicate r
/// uses seed base_seed + r at every n.
ConvergenceResult convergence_experiment(const ConvergenceConfig& config);

/// True when no step rises by more than the larger standard error of its two points.
bool non_increasing_within_se(const std::vector<ConvergencePoint>& points);

}  // namespace esir::sim
