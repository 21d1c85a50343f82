#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "esir/linalg.hpp"
#include "esir/metrics.hpp"
#include "esir/sdr.hpp"

namespace esir::cli {

enum class Command { Fit, Simulate, Tables, Converge, Diagnose };
enum class OutputFormat { Json, Csv, Text };

struct RunConfig {
    Command command = Command::Fit;
    std::string input_path;
    std::string response_column;
    std::vector<std::string> covariates;  // empty: every other numeric column
    std::optional<long> head;
    int h = 10;
    int k = 0;  // 0: 1 for fit, the model's K for simulate
    std::string method = "esir";
    int n = 400;
    int p = 10;
    int reps = 100;
    std::uint64_t seed = 1;
    std::string model = "A1";
    std::string distribution = "normal";
    std::string output_path;
    OutputFormat output_format = OutputFormat::Json;
    bool ols_quad = false;
    bool all_tables = false;  // --paper
    std::vector<int> tables;
    std::vector<int> n_grid{200, 800, 3200};
    int oracle_n = 1'000'000;
};

struct FitReport {
    sdr::Method method = sdr::Method::ESIR;
    int h = 0;
    int k = 0;
    std::string response;
    std::vector<std::string> covariates;
    linalg::Matrix directions;   // K x p
    linalg::Vector eigenvalues;  // K
    linalg::Matrix projections;  // n x K, row i is (beta_k . x_i)
    std::optional<metrics::OlsReport> ols;
};

nlohmann::json to_json(const FitReport& r);
FitReport fit_report_from_json(const nlohmann::json& j);

/// Fits the CSV named in `config` (also used by `run`).
FitReport cmd_fit(const RunConfig& config);

/// Parses argv-style arguments (without the program name) and runs the
/// subcommand. Returns the process exit code: 0 success, 2 input or
/// validation error, 3 numerical failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace esir::cli
