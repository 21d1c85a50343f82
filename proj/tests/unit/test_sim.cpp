#include <cmath>
#include <cstdlib>

#include <gtest/gtest.h>
#include "json.hpp"

#include "esir/error.hpp"
#include "esir/sim.hpp"

using namespace esir;
using namespace esir::sim;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no esir::Error thrown";
    return ErrorCode::InvalidArgument;
}

ReplicateSummary fake_cell(ModelId m, const std::string& dist, int n, int p, int h, sdr::Method method,
                           double r2) {
    ReplicateSummary s;
    s.config.model = m;
    s.config.distribution = dist;
    s.config.n = n;
    s.config.p = p;
    s.config.h = h;
    s.config.k = model_k(m);
    s.config.method = method;
    s.rep_count = 10;
    s.r2_mean = Vector::Constant(model_k(m), r2);
    s.r2_sd = Vector::Constant(model_k(m), 0.01);
    s.avg_r2 = r2;
    return s;
}

}  // namespace

TEST(ModelResponse, FixedPoints) {
    const RowVector zero = RowVector::Zero(10);
    EXPECT_DOUBLE_EQ(model_response(make_model(ModelId::A2, 10, "normal"), zero, 0.0), 2.75);
    EXPECT_DOUBLE_EQ(model_response(make_model(ModelId::A1, 10, "normal"), zero, 0.0), 1.0 / 2.75);
    EXPECT_DOUBLE_EQ(model_response(make_model(ModelId::B1, 10, "normal"), zero, 0.0), 0.0);

    const auto a3 = make_model(ModelId::A3, 10, "normal");
    RowVector x = RowVector::Zero(10);
    x(0) = 0.7;
    EXPECT_DOUBLE_EQ(model_response(a3, x, 0.0), 0.0);
    EXPECT_DOUBLE_EQ(model_response(a3, zero, 1.0), 2.0 * 0.5);
}

TEST(ModelSpec, Structure) {
    const auto a1 = make_model(ModelId::A1, 10, "normal");
    EXPECT_EQ(a1.b_true.rows(), 1);
    EXPECT_EQ(a1.b_true.cols(), 10);
    EXPECT_EQ(a1.sigma.dim(), 10);

    const auto b2 = make_model(ModelId::B2, 30, "normal");
    EXPECT_EQ(b2.p, 5);
    EXPECT_EQ(b2.b_true.rows(), 2);

    const auto b4 = make_model(ModelId::B4, 10, "normal");
    EXPECT_EQ(b4.p, 10);
    EXPECT_EQ(b4.sample_sigma.dim(), 9);
    EXPECT_EQ(b4.sigma.dim(), 10);
    EXPECT_NEAR(b4.sigma(0, 0), 1.0 + 3.0 * (1.0 - 2.0 / M_PI), 1e-15);

    EXPECT_EQ(model_k(ModelId::A3), 1);
    EXPECT_EQ(model_k(ModelId::B3), 2);
    EXPECT_EQ(parse_model("b4"), ModelId::B4);
    EXPECT_EQ(code_of([] { parse_model("C9"); }), ErrorCode::InvalidArgument);
    EXPECT_EQ(code_of([] { make_model(ModelId::B4, 3, "normal"); }), ErrorCode::InvalidArgument);
}

TEST(GenDataset, ShapesAndDeterminism) {
    const auto m = make_model(ModelId::B4, 6, "t3");
    Rng r1(5), r2(5);
    const auto d1 = gen_dataset(m, 50, r1);
    const auto d2 = gen_dataset(m, 50, r2);
    EXPECT_EQ(d1.x.rows(), 50);
    EXPECT_EQ(d1.x.cols(), 6);
    EXPECT_EQ(d1.x, d2.x);
    EXPECT_EQ(d1.y, d2.y);
    EXPECT_TRUE((d1.x.col(0).array() >= 0.0).any());
}

TEST(RunCell, SingleReplicateHasZeroSd) {
    CellConfig c;
    c.model = ModelId::A2;
    c.n = 200;
    c.p = 5;
    c.reps = 1;
    const auto s = run_cell(c);
    EXPECT_EQ(s.rep_count, 1);
    EXPECT_EQ(s.r2_sd(0), 0.0);
    EXPECT_GE(s.r2_mean(0), 0.0);
    EXPECT_LE(s.r2_mean(0), 1.0);
}

TEST(RunCell, IdenticalAcrossThreadCounts) {
    CellConfig c;
    c.model = ModelId::B1;
    c.n = 200;
    c.p = 5;
    c.reps = 8;
    c.distribution = "t3";
    setenv("ESIR_THREADS", "1", 1);
    const auto a = run_cell(c);
    setenv("ESIR_THREADS", "4", 1);
    const auto b = run_cell(c);
    unsetenv("ESIR_THREADS");
    ASSERT_EQ(a.replicate_r2.size(), b.replicate_r2.size());
    for (std::size_t i = 0; i < a.replicate_r2.size(); ++i) EXPECT_EQ(a.replicate_r2[i], b.replicate_r2[i]);
    EXPECT_EQ(a.r2_mean, b.r2_mean);
}

TEST(RunCell, RejectsBadConfig) {
    CellConfig c;
    c.reps = 0;
    EXPECT_EQ(code_of([&] { run_cell(c); }), ErrorCode::InvalidArgument);
    c.reps = 2;
    c.k = 20;
    EXPECT_EQ(code_of([&] { run_cell(c); }), ErrorCode::KTooLarge);
}

TEST(EmitTable, SingleCell) {
    const auto out = emit_table({fake_cell(ModelId::A1, "normal", 400, 10, 10, sdr::Method::ESIR, 0.95)},
                                TableLayout::Table1);
    ASSERT_EQ(out.json_records.size(), 1u);
    EXPECT_NE(out.text.find("0.95 (0.01)"), std::string::npos);
    const auto j = nlohmann::json::parse(out.json_records[0]);
    for (const char* field : {"model", "dist", "n", "p", "h", "k", "method", "seed", "rep_count", "excluded",
                              "r2_mean", "r2_sd", "avg_r2"})
        EXPECT_TRUE(j.contains(field)) << field;
    EXPECT_EQ(j["model"], "A1");
    EXPECT_EQ(j["method"], "ESIR");
}

TEST(EmitTable, EmptyAndIncompleteGrids) {
    EXPECT_EQ(code_of([] { emit_table({}, TableLayout::Table1); }), ErrorCode::MissingCell);
    const std::vector<ReplicateSummary> partial{
        fake_cell(ModelId::A1, "normal", 400, 10, 10, sdr::Method::SIR, 0.9),
        fake_cell(ModelId::A2, "t3", 400, 10, 10, sdr::Method::ESIR, 0.8)};
    EXPECT_EQ(code_of([&] { emit_table(partial, TableLayout::Table1); }), ErrorCode::MissingCell);
}

TEST(EmitTable, Table2Grid) {
    std::vector<ReplicateSummary> cells;
    for (int n : {200, 400})
        for (int h : {5, 10})
            for (int p : {10, 20})
                for (auto m : {sdr::Method::SIR, sdr::Method::ESIR})
                    cells.push_back(fake_cell(ModelId::A2, "t3", n, p, h, m, 0.5));
    const auto out = emit_table(cells, TableLayout::Table2);
    EXPECT_EQ(out.json_records.size(), cells.size());
    EXPECT_NE(out.text.find("n=400"), std::string::npos);
    cells.pop_back();
    EXPECT_EQ(code_of([&] { emit_table(cells, TableLayout::Table2); }), ErrorCode::MissingCell);
}

TEST(Convergence, SinglePointAndOracleChecks) {
    ConvergenceConfig c;
    c.p = 4;
    c.n_grid = {200};
    c.oracle_n = 2000;
    c.reps = 3;
    const auto r = convergence_experiment(c);
    ASSERT_EQ(r.points.size(), 1u);
    EXPECT_EQ(r.oracle_h, 44);
    EXPECT_GT(r.points[0].mean_error, 0.0);
    EXPECT_EQ(r.oracle.rows(), 4);

    c.oracle_n = 1999;
    EXPECT_EQ(code_of([&] { convergence_experiment(c); }), ErrorCode::InvalidArgument);
}

TEST(Convergence, MonotoneWithinSe) {
    std::vector<ConvergencePoint> pts{{100, 10, 0.5, 0.01}, {200, 10, 0.505, 0.01}, {400, 10, 0.3, 0.01}};
    EXPECT_TRUE(non_increasing_within_se(pts));
    pts[1].mean_error = 0.53;
    EXPECT_FALSE(non_increasing_within_se(pts));
}
