#include "commands.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <memory>
#include <sstream>

#include <CLI11.hpp>

#include "csv.hpp"
#include "esir/error.hpp"
#include "esir/sim.hpp"

namespace esir::cli {

using nlohmann::json;

namespace {

json matrix_json(const linalg::Matrix& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json r = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) r.push_back(m(i, j));
        rows.push_back(std::move(r));
    }
    return rows;
}

linalg::Matrix matrix_from_json(const json& j, Eigen::Index cols_if_empty) {
    const auto rows = static_cast<Eigen::Index>(j.size());
    const Eigen::Index cols = rows == 0 ? cols_if_empty : static_cast<Eigen::Index>(j[0].size());
    linalg::Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = j[i][c].get<double>();
    return m;
}

json vector_json(const linalg::Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

linalg::Vector vector_from_json(const json& j) {
    const auto v = j.get<std::vector<double>>();
    return Eigen::Map<const linalg::Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

// Writes to --output when given, otherwise to `out`.
class Sink {
public:
    Sink(const std::string& path, std::ostream& out) {
        if (path.empty()) {
            os_ = &out;
        } else {
            file_ = std::make_unique<std::ofstream>(path);
            if (!*file_) throw InputError("cannot open output file '" + path + "'");
            os_ = file_.get();
        }
    }
    std::ostream& stream() { return *os_; }

private:
    std::unique_ptr<std::ofstream> file_;
    std::ostream* os_ = nullptr;
};

std::string fmt(double v, int precision = 6) {
    std::ostringstream s;
    s << std::setprecision(precision) << v;
    return s.str();
}

void write_fit(const FitReport& r, OutputFormat format, std::ostream& os) {
    switch (format) {
        case OutputFormat::Json:
            os << to_json(r).dump(2) << "\n";
            return;
        case OutputFormat::Csv:
            for (int k = 0; k < r.k; ++k) os << (k ? "," : "") << "f" << k + 1;
            os << "\n" << std::setprecision(17);
            for (Eigen::Index i = 0; i < r.projections.rows(); ++i) {
                for (Eigen::Index k = 0; k < r.projections.cols(); ++k) os << (k ? "," : "") << r.projections(i, k);
                os << "\n";
            }
            return;
        case OutputFormat::Text:
            os << sdr::to_string(r.method) << " fit of '" << r.response << "' on " << r.covariates.size()
               << " covariates, n = " << r.projections.rows() << ", H = " << r.h << ", K = " << r.k << "\n";
            for (int k = 0; k < r.k; ++k) {
                os << "direction " << k + 1 << " (eigenvalue " << fmt(r.eigenvalues(k)) << ")\n";
                for (std::size_t j = 0; j < r.covariates.size(); ++j)
                    os << "  " << std::left << std::setw(16) << r.covariates[j] << std::right
                       << fmt(r.directions(k, static_cast<Eigen::Index>(j))) << "\n";
            }
            if (r.ols) {
                os << "quadratic OLS on (f1, f2, f1^2, f2^2, f1*f2): R2 = " << fmt(r.ols->r2)
                   << ", adjusted R2 = " << fmt(r.ols->adjusted_r2) << ", F = " << fmt(r.ols->f_statistic)
                   << " on (" << r.ols->dof_numerator << ", " << r.ols->dof_denominator << ") df\n";
            }
            return;
    }
}

std::vector<int> used_covariates(const CsvTable& t, const RunConfig& c, std::optional<int> response) {
    std::vector<int> cols;
    if (!c.covariates.empty()) {
        for (const auto& name : c.covariates) {
            const int col = resolve_column(t, name);
            if (response && col == *response) throw InputError("covariate '" + name + "' is the response column");
            cols.push_back(col);
        }
        return cols;
    }
    for (int j = 0; j < static_cast<int>(t.header.size()); ++j)
        if ((!response || j != *response) && column_is_numeric(t, j)) cols.push_back(j);
    if (cols.empty()) throw InputError("no numeric covariate columns");
    return cols;
}

std::vector<sdr::Method> methods_of(const std::string& text) {
    std::string s = text;
    for (auto& ch : s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    if (s == "both") return {sdr::Method::SIR, sdr::Method::ESIR};
    return {sdr::parse_method(s)};
}

std::string cell_line(const sim::ReplicateSummary& s) {
    const auto& c = s.config;
    std::ostringstream os;
    os << sim::to_string(c.model) << " " << c.distribution << " n=" << c.n << " p=" << c.p << " H=" << c.h << " "
       << sdr::to_string(c.method) << ":";
    os << std::fixed << std::setprecision(3);
    for (Eigen::Index j = 0; j < s.r2_mean.size(); ++j)
        os << " R2(b" << j + 1 << ")=" << s.r2_mean(j) << " (" << s.r2_sd(j) << ")";
    if (s.r2_mean.size() > 1) os << " R2=" << s.avg_r2;
    os << " reps=" << s.rep_count << " excluded=" << s.excluded;
    return os.str();
}

void write_cells_csv(const std::vector<sim::ReplicateSummary>& cells, std::ostream& os) {
    Eigen::Index kmax = 0;
    for (const auto& c : cells) kmax = std::max(kmax, c.r2_mean.size());
    os << "model,dist,n,p,h,k,method,seed,rep_count,excluded,avg_r2";
    for (Eigen::Index j = 0; j < kmax; ++j) os << ",r2_mean_" << j + 1 << ",r2_sd_" << j + 1;
    os << "\n" << std::setprecision(17);
    for (const auto& s : cells) {
        const auto& c = s.config;
        os << sim::to_string(c.model) << "," << c.distribution << "," << c.n << "," << c.p << "," << c.h << ","
           << c.k << "," << sdr::to_string(c.method) << "," << c.base_seed << "," << s.rep_count << ","
           << s.excluded << "," << s.avg_r2;
        for (Eigen::Index j = 0; j < kmax; ++j) {
            if (j < s.r2_mean.size())
                os << "," << s.r2_mean(j) << "," << s.r2_sd(j);
            else
                os << ",,";
        }
        os << "\n";
    }
}

int cmd_simulate(const RunConfig& c, std::ostream& out) {
    std::vector<sim::ReplicateSummary> cells;
    for (auto method : methods_of(c.method)) {
        sim::CellConfig cell;
        cell.model = sim::parse_model(c.model);
        cell.distribution = c.distribution;
        cell.n = c.n;
        cell.p = c.p;
        cell.h = c.h;
        cell.k = c.k;
        cell.reps = c.reps;
        cell.method = method;
        cell.base_seed = c.seed;
        cells.push_back(sim::run_cell(cell));
    }
    Sink sink(c.output_path, out);
    auto& os = sink.stream();
    switch (c.output_format) {
        case OutputFormat::Json:
            for (const auto& s : cells) os << sim::to_json_record(s) << "\n";
            break;
        case OutputFormat::Csv:
            write_cells_csv(cells, os);
            break;
        case OutputFormat::Text:
            for (const auto& s : cells) os << cell_line(s) << "\n";
            break;
    }
    return 0;
}

struct TableGrid {
    int number;
    sim::TableLayout layout;
    std::vector<sim::ModelId> models;
    std::vector<std::string> dists;
    std::vector<int> ns, ps, hs;
};

std::vector<TableGrid> standard_grids() {
    using M = sim::ModelId;
    return {
        {1, sim::TableLayout::Table1, {M::A1, M::A2, M::A3}, {"normal", "laplace", "logistic", "t3", "t2", "cauchy"},
         {400}, {10}, {10}},
        {2, sim::TableLayout::Table2, {M::B1}, {"cauchy"}, {120, 200, 400}, {5, 10, 30}, {5, 10, 20, 40}},
        {3, sim::TableLayout::Table3_4, {M::B1, M::B2, M::B3, M::B4}, {"normal", "logistic", "ec1"}, {400}, {10},
         {10}},
        {4, sim::TableLayout::Table3_4, {M::B1, M::B2, M::B3, M::B4}, {"t3", "t2", "cauchy"}, {400}, {10}, {10}},
    };
}

int cmd_tables(const RunConfig& c, std::ostream& out) {
    std::vector<int> wanted = c.tables;
    if (c.all_tables) wanted = {1, 2, 3, 4};
    if (wanted.empty()) throw InputError("tables: pass --paper or at least one --table");
    if (c.reps < 1) throw InputError("--reps must be >= 1");

    std::ostringstream text;
    std::vector<std::string> records;
    for (const auto& grid : standard_grids()) {
        if (std::find(wanted.begin(), wanted.end(), grid.number) == wanted.end()) continue;
        std::vector<sim::ReplicateSummary> cells;
        for (auto m : grid.models)
            for (const auto& d : grid.dists)
                for (int n : grid.ns)
                    for (int p : grid.ps)
                        for (int h : grid.hs)
                            for (auto method : {sdr::Method::SIR, sdr::Method::ESIR}) {
                                sim::CellConfig cell;
                                cell.model = m;
                                cell.distribution = d;
                                cell.n = n;
                                cell.p = p;
                                cell.h = h;
                                cell.reps = c.reps;
                                cell.method = method;
                                cell.base_seed = c.seed;
                                cells.push_back(sim::run_cell(cell));
                            }
        const auto table = sim::emit_table(cells, grid.layout);
        text << "Table " << grid.number << "\n" << table.text << "\n";
        records.insert(records.end(), table.json_records.begin(), table.json_records.end());
    }

    Sink sink(c.output_path, out);
    if (c.output_format == OutputFormat::Json && c.output_path.empty()) {
        for (const auto& r : records) out << r << "\n";
        return 0;
    }
    sink.stream() << text.str();
    if (!c.output_path.empty()) {
        std::ofstream js(c.output_path + ".jsonl");
        if (!js) throw InputError("cannot open output file '" + c.output_path + ".jsonl'");
        for (const auto& r : records) js << r << "\n";
    }
    return 0;
}

int cmd_converge(const RunConfig& c, std::ostream& out) {
    if (c.n_grid.empty()) throw InputError("--n-grid must list at least one sample size");
    sim::ConvergenceConfig cc;
    cc.model = sim::parse_model(c.model);
    cc.distribution = c.distribution;
    cc.p = c.p;
    cc.n_grid = c.n_grid;
    const int h = c.h;
    cc.h_rule = [h](int) { return h; };
    cc.oracle_n = c.oracle_n;
    cc.reps = c.reps;
    cc.base_seed = c.seed;
    const auto res = sim::convergence_experiment(cc);

    Sink sink(c.output_path, out);
    auto& os = sink.stream();
    const bool ok = sim::non_increasing_within_se(res.points);
    if (c.output_format == OutputFormat::Json) {
        json j;
        j["model"] = c.model;
        j["dist"] = c.distribution;
        j["p"] = c.p;
        j["reps"] = c.reps;
        j["seed"] = c.seed;
        j["oracle_n"] = c.oracle_n;
        j["oracle_h"] = res.oracle_h;
        j["points"] = json::array();
        for (const auto& pt : res.points)
            j["points"].push_back(
                {{"n", pt.n}, {"h", pt.h}, {"mean_error", pt.mean_error}, {"standard_error", pt.standard_error}});
        j["non_increasing_within_se"] = ok;
        os << j.dump(2) << "\n";
    } else if (c.output_format == OutputFormat::Csv) {
        os << "n,h,mean_error,standard_error\n" << std::setprecision(17);
        for (const auto& pt : res.points) os << pt.n << "," << pt.h << "," << pt.mean_error << "," << pt.standard_error << "\n";
    } else {
        os << "oracle: n = " << c.oracle_n << ", H = " << res.oracle_h << "\n";
        for (const auto& pt : res.points)
            os << "n = " << std::setw(7) << pt.n << "  H = " << std::setw(3) << pt.h << "  error = " << fmt(pt.mean_error)
               << " (se " << fmt(pt.standard_error) << ")\n";
        os << (ok ? "non-increasing within one standard error\n" : "NOT non-increasing within one standard error\n");
    }
    return 0;
}

int cmd_diagnose(const RunConfig& c, std::ostream& out) {
    const CsvTable t = read_csv_file(c.input_path, c.head);
    std::optional<int> response;
    if (!c.response_column.empty()) response = resolve_column(t, c.response_column);
    const auto cols = used_covariates(t, c, response);
    const linalg::Matrix x = numeric_columns(t, cols);
    if (x.rows() < 20) {
        throw InputError("diagnose needs at least 20 rows, found " + std::to_string(x.rows()));
    }

    json report = json::array();
    std::ostringstream text;
    text << std::left << std::setw(16) << "column" << std::right << std::setw(12) << "KS" << std::setw(12)
         << "critical" << std::setw(10) << "reject" << std::setw(14) << "ex.kurtosis" << "\n";
    for (std::size_t j = 0; j < cols.size(); ++j) {
        const linalg::Vector col = x.col(static_cast<Eigen::Index>(j));
        const auto ks = metrics::ks_normality(col);
        const double kurt = metrics::excess_kurtosis(col);
        report.push_back({{"column", t.header[cols[j]]},
                          {"n", x.rows()},
                          {"ks_statistic", ks.statistic},
                          {"critical_value", ks.critical_value},
                          {"reject_normality_05", ks.reject_at_05},
                          {"excess_kurtosis", kurt}});
        text << std::left << std::setw(16) << t.header[cols[j]] << std::right << std::setw(12) << fmt(ks.statistic, 4)
             << std::setw(12) << fmt(ks.critical_value, 4) << std::setw(10) << (ks.reject_at_05 ? "yes" : "no")
             << std::setw(14) << fmt(kurt, 4) << "\n";
    }

    Sink sink(c.output_path, out);
    auto& os = sink.stream();
    if (c.output_format == OutputFormat::Json) {
        os << report.dump(2) << "\n";
    } else if (c.output_format == OutputFormat::Csv) {
        os << "column,n,ks_statistic,critical_value,reject_normality_05,excess_kurtosis\n" << std::setprecision(17);
        for (const auto& r : report)
            os << r["column"].get<std::string>() << "," << r["n"].get<long>() << "," << r["ks_statistic"].get<double>()
               << "," << r["critical_value"].get<double>() << "," << (r["reject_normality_05"].get<bool>() ? 1 : 0)
               << "," << r["excess_kurtosis"].get<double>() << "\n";
    } else {
        os << text.str();
    }
    return 0;
}

}  // namespace

json to_json(const FitReport& r) {
    json j;
    j["method"] = sdr::to_string(r.method);
    j["h"] = r.h;
    j["k"] = r.k;
    j["n"] = r.projections.rows();
    j["p"] = r.directions.cols();
    j["response"] = r.response;
    j["covariates"] = r.covariates;
    j["directions"] = matrix_json(r.directions);
    j["eigenvalues"] = vector_json(r.eigenvalues);
    j["projections"] = matrix_json(r.projections);
    if (r.ols) {
        json o;
        o["design"] = {"f1", "f2", "f1^2", "f2^2", "f1*f2"};
        o["coefficients"] = vector_json(r.ols->coefficients);
        o["r2"] = r.ols->r2;
        o["adjusted_r2"] = r.ols->adjusted_r2;
        // JSON has no infinity; an exact fit is written as null.
        o["f_statistic"] = std::isfinite(r.ols->f_statistic) ? json(r.ols->f_statistic) : json(nullptr);
        o["dof_numerator"] = r.ols->dof_numerator;
        o["dof_denominator"] = r.ols->dof_denominator;
        o["n_used"] = r.ols->n_used;
        j["ols"] = std::move(o);
    }
    return j;
}

FitReport fit_report_from_json(const json& j) {
    FitReport r;
    r.method = sdr::parse_method(j.at("method").get<std::string>());
    r.h = j.at("h").get<int>();
    r.k = j.at("k").get<int>();
    r.response = j.at("response").get<std::string>();
    r.covariates = j.at("covariates").get<std::vector<std::string>>();
    r.directions = matrix_from_json(j.at("directions"), j.at("p").get<Eigen::Index>());
    r.eigenvalues = vector_from_json(j.at("eigenvalues"));
    r.projections = matrix_from_json(j.at("projections"), r.k);
    if (j.contains("ols")) {
        const auto& o = j["ols"];
        metrics::OlsReport ols;
        ols.coefficients = vector_from_json(o.at("coefficients"));
        ols.r2 = o.at("r2").get<double>();
        ols.adjusted_r2 = o.at("adjusted_r2").get<double>();
        ols.f_statistic = o.at("f_statistic").is_null() ? std::numeric_limits<double>::infinity()
                                                         : o.at("f_statistic").get<double>();
        ols.dof_numerator = o.at("dof_numerator").get<int>();
        ols.dof_denominator = o.at("dof_denominator").get<int>();
        ols.n_used = o.at("n_used").get<int>();
        r.ols = ols;
    }
    return r;
}

FitReport cmd_fit(const RunConfig& c) {
    if (c.input_path.empty()) throw InputError("fit needs --input");
    if (c.response_column.empty()) throw InputError("fit needs --response");
    const CsvTable t = read_csv_file(c.input_path, c.head);
    const int response = resolve_column(t, c.response_column);
    const auto cols = used_covariates(t, c, response);

    elliptical::Dataset d;
    d.x = numeric_columns(t, cols);
    d.y = numeric_columns(t, {response}).col(0);
    const int k = c.k == 0 ? 1 : c.k;
    if (c.ols_quad && k != 2) throw InputError("--ols-quad needs --K 2");
    if (d.x.rows() < 2L * c.h) {
        throw InputError("need at least 2H = " + std::to_string(2 * c.h) + " rows, found " +
                         std::to_string(d.x.rows()));
    }

    FitReport r;
    r.method = sdr::parse_method(c.method);
    const auto fit = sdr::fit(r.method, d, c.h, k);
    r.h = fit.h_used;
    r.k = fit.k;
    r.response = t.header[response];
    for (int col : cols) r.covariates.push_back(t.header[col]);
    r.directions = fit.directions;
    r.eigenvalues = fit.eigenvalues;
    r.projections = d.x * fit.directions.transpose();
    if (c.ols_quad) {
        const auto f1 = r.projections.col(0).array();
        const auto f2 = r.projections.col(1).array();
        linalg::Matrix design(d.x.rows(), 5);
        design.col(0) = f1.matrix();
        design.col(1) = f2.matrix();
        design.col(2) = (f1 * f1).matrix();
        design.col(3) = (f2 * f2).matrix();
        design.col(4) = (f1 * f2).matrix();
        r.ols = metrics::ols_fit(design, d.y);
    }
    return r;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    RunConfig c;
    CLI::App app{"Sliced inverse regression (SIR) and its elliptical Kendall-tau variant (ESIR)", "esir"};
    app.require_subcommand(1);

    const std::map<std::string, OutputFormat> formats{
        {"json", OutputFormat::Json}, {"csv", OutputFormat::Csv}, {"text", OutputFormat::Text}};
    auto add_output = [&](CLI::App* sub) {
        sub->add_option("--output", c.output_path, "Output file (default: stdout)");
        sub->add_option("--format", c.output_format, "json, csv or text")
            ->transform(CLI::CheckedTransformer(formats, CLI::ignore_case));
    };
    auto add_csv = [&](CLI::App* sub, bool response_required) {
        sub->add_option("--input", c.input_path, "Comma-separated file with a header row")->required();
        auto* r = sub->add_option("--response", c.response_column, "Response column name or 0-based index");
        if (response_required) r->required();
        sub->add_option("--covariates", c.covariates, "Covariate columns (default: all other numeric columns)")
            ->delimiter(',');
        sub->add_option("--head", c.head, "Use only the first N data rows")->check(CLI::PositiveNumber);
    };

    auto* fit = app.add_subcommand("fit", "Fit SIR or ESIR to a CSV file");
    add_csv(fit, true);
    fit->add_option("--method", c.method, "sir or esir")->check(CLI::IsMember({"sir", "esir"}, CLI::ignore_case));
    fit->add_option("--H", c.h, "Number of slices");
    fit->add_option("--K", c.k, "Number of directions (default 1)");
    fit->add_flag("--ols-quad", c.ols_quad, "Regress the response on (f1, f2, f1^2, f2^2, f1*f2); needs K = 2");
    add_output(fit);

    auto add_sim = [&](CLI::App* sub) {
        sub->add_option("--model", c.model, "A1, A2, A3, B1, B2, B3 or B4");
        sub->add_option("--dist", c.distribution, "normal, laplace, logistic, t<nu>, cauchy, ec1 or F<d1>,<d2>");
        sub->add_option("--p", c.p, "Dimension");
        sub->add_option("--reps", c.reps, "Replicates");
        sub->add_option("--seed", c.seed, "Base seed; replicate r uses seed + r");
    };

    auto* simulate = app.add_subcommand("simulate", "Monte Carlo R^2 summary for one model and distribution");
    add_sim(simulate);
    simulate->add_option("--n", c.n, "Sample size");
    simulate->add_option("--H", c.h, "Number of slices");
    simulate->add_option("--K", c.k, "Number of directions (default: the model's)");
    simulate->add_option("--method", c.method, "sir, esir or both")
        ->check(CLI::IsMember({"sir", "esir", "both"}, CLI::ignore_case));
    add_output(simulate);

    auto* tables = app.add_subcommand("tables", "Run the simulation table grids");
    tables->add_flag("--paper", c.all_tables, "All four grids");
    tables->add_option("--table", c.tables, "Grid number (1-4), repeatable")->check(CLI::Range(1, 4));
    tables->add_option("--reps", c.reps, "Replicates per cell");
    tables->add_option("--seed", c.seed, "Base seed");
    add_output(tables);

    auto* converge = app.add_subcommand("converge", "Spectral error of the slice-mean tau matrix against a large-n oracle");
    add_sim(converge);
    converge->add_option("--n-grid", c.n_grid, "Ascending sample sizes")->delimiter(',');
    converge->add_option("--H", c.h, "Slices at every n");
    converge->add_option("--oracle-n", c.oracle_n, "Oracle sample size (>= 10 * max n)");
    add_output(converge);

    auto* diagnose = app.add_subcommand("diagnose", "Per-column KS normality test and excess kurtosis");
    add_csv(diagnose, false);
    add_output(diagnose);

    std::vector<std::string> argv_store{"esir"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& a : argv_store) argv.push_back(a.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    if (app.got_subcommand(converge)) {
        if (converge->count("--model") == 0) c.model = "A2";
        if (converge->count("--reps") == 0) c.reps = 50;
    }

    try {
        if (c.reps < 1) throw InputError("--reps must be >= 1");
        if (app.got_subcommand(fit)) {
            const FitReport r = cmd_fit(c);
            Sink sink(c.output_path, out);
            write_fit(r, c.output_format, sink.stream());
            return 0;
        }
        if (app.got_subcommand(simulate)) return cmd_simulate(c, out);
        if (app.got_subcommand(tables)) return cmd_tables(c, out);
        if (app.got_subcommand(converge)) return cmd_converge(c, out);
        return cmd_diagnose(c, out);
    } catch (const InputError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return e.is_numerical() ? 3 : 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace esir::cli
