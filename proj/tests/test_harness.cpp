#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "oracles.hpp"
#include "sparsekf/harness/experiment.hpp"
#include "sparsekf/harness/report.hpp"

using namespace sparsekf;

namespace {

ExperimentConfig small_config(FilterKind kind) {
    ExperimentConfig c;
    c.filter = kind;
    c.steps = 60;
    c.replicates = 5;
    return c;
}

double naive_rmse(const std::vector<Eigen::VectorXd>& a, const std::vector<Eigen::VectorXd>& b) {
    double s = 0.0;
    std::size_t count = 0;
    for (std::size_t k = 0; k < a.size(); ++k)
        for (Eigen::Index i = 0; i < a[k].size(); ++i) {
            s += (a[k][i] - b[k][i]) * (a[k][i] - b[k][i]);
            ++count;
        }
    return std::sqrt(s / static_cast<double>(count));
}

}  // namespace

TEST(Truth, DeterministicAndStartsInRange) {
    ExperimentConfig c;
    c.steps = 100;
    const auto a = generate_truth(c, 3);
    const auto b = generate_truth(c, 3);
    const auto other = generate_truth(c, 4);
    ASSERT_EQ(a.size(), 101u);
    for (std::size_t k = 0; k < a.size(); ++k) EXPECT_EQ(a[k], b[k]);
    EXPECT_NE(a[0], other[0]);
    EXPECT_LE(a[0].cwiseAbs().maxCoeff(), 1.0);
    EXPECT_EQ(a[1], rk4_step(a[0], c.dt, c.forcing));
}

TEST(Truth, LongRunTimeMeanNearAttractorMean) {
    ExperimentConfig c;
    c.steps = 100000;
    const auto traj = generate_truth(c, 0);
    double sum = 0.0;
    for (const auto& x : traj) sum += x.sum();
    const double mean = sum / (static_cast<double>(traj.size()) * 40.0);
    EXPECT_NEAR(mean, 2.3, 0.5);
}

TEST(Observations, ExactWithoutNoiseAndOnlyAfterStart) {
    ExperimentConfig c;
    c.steps = 20;
    const auto truth = generate_truth(c, 0);
    const auto h = ObservationOperator::every(40, 2, 0.0);
    auto rng = make_rng(c.seed, 0, RngStream::observations);
    const auto y = synthesize_observations(truth, h, 1, rng);
    ASSERT_EQ(y.size(), 21u);
    EXPECT_FALSE(y[0].has_value());
    for (std::size_t k = 1; k < y.size(); ++k) {
        ASSERT_TRUE(y[k].has_value());
        EXPECT_EQ(y[k]->size(), 20);
        EXPECT_EQ(*y[k], h.observe(truth[k]));
    }
    auto rng2 = make_rng(c.seed, 0, RngStream::observations);
    const auto sparse = synthesize_observations(truth, h, 4, rng2);
    for (std::size_t k = 1; k < sparse.size(); ++k) EXPECT_EQ(sparse[k].has_value(), k % 4 == 0);
}

TEST(Observations, NoiseCovarianceMatchesR) {
    const std::vector<Eigen::VectorXd> truth(100001, Eigen::VectorXd::Zero(4));
    const auto h = ObservationOperator::every(4, 2, 2.0);
    std::mt19937_64 rng(11);
    const auto y = synthesize_observations(truth, h, 1, rng);
    double s00 = 0, s11 = 0, s01 = 0, m0 = 0, m1 = 0;
    const double count = 100000.0;
    for (std::size_t k = 1; k < y.size(); ++k) {
        const auto& v = *y[k];
        m0 += v[0];
        m1 += v[1];
        s00 += v[0] * v[0];
        s11 += v[1] * v[1];
        s01 += v[0] * v[1];
    }
    EXPECT_NEAR(s00 / count, 2.0, 0.06);
    EXPECT_NEAR(s11 / count, 2.0, 0.06);
    EXPECT_NEAR(s01 / count, 0.0, 0.06);
    EXPECT_NEAR(m0 / count, 0.0, 0.03);
    EXPECT_NEAR(m1 / count, 0.0, 0.03);
}

TEST(Rmse, HandExamplesAndLoopOracle) {
    const std::vector<Eigen::VectorXd> zeros(3, Eigen::VectorXd::Zero(4));
    const std::vector<Eigen::VectorXd> ones(3, Eigen::VectorXd::Ones(4));
    EXPECT_DOUBLE_EQ(rmse(ones, zeros), 1.0);
    EXPECT_DOUBLE_EQ(rmse(zeros, zeros), 0.0);
    std::vector<Eigen::VectorXd> step{Eigen::VectorXd::Zero(2), Eigen::VectorXd::Constant(2, 2.0)};
    EXPECT_DOUBLE_EQ(rmse(step, std::vector<Eigen::VectorXd>(2, Eigen::VectorXd::Zero(2))), std::sqrt(2.0));

    std::mt19937_64 rng(12);
    for (int t = 0; t < 20; ++t) {
        std::vector<Eigen::VectorXd> a, b;
        for (int k = 0; k < 30; ++k) {
            a.push_back(oracle::random_matrix(7, 1, rng));
            b.push_back(oracle::random_matrix(7, 1, rng));
        }
        EXPECT_NEAR(rmse(a, b), naive_rmse(a, b), 1e-12);
    }
    EXPECT_THROW(rmse(zeros, std::vector<Eigen::VectorXd>(2, Eigen::VectorXd::Zero(4))), std::invalid_argument);
}

TEST(Summarize, FiveValues) {
    const std::vector<double> v{5, 1, 4, 2, 3};
    const Statistics s = summarize(v);
    EXPECT_EQ(s.count, 5u);
    EXPECT_DOUBLE_EQ(s.mean, 3.0);
    EXPECT_DOUBLE_EQ(s.median, 3.0);
    EXPECT_DOUBLE_EQ(s.q1, 2.0);
    EXPECT_DOUBLE_EQ(s.q3, 4.0);
    EXPECT_DOUBLE_EQ(s.std, std::sqrt(2.5));
    EXPECT_DOUBLE_EQ(s.lower_whisker, 1.0);
    EXPECT_DOUBLE_EQ(s.upper_whisker, 5.0);
}

TEST(Summarize, OutlierFallsOutsideWhiskers) {
    const std::vector<double> v{1, 2, 3, 4, 100};
    const Statistics s = summarize(v);
    EXPECT_DOUBLE_EQ(s.median, 3.0);
    EXPECT_DOUBLE_EQ(s.upper_whisker, 4.0);
    EXPECT_DOUBLE_EQ(s.max, 100.0);
    EXPECT_GT(s.mean, s.median);
}

TEST(Summarize, EvenCountInterpolates) {
    const std::vector<double> v{1, 2, 3, 4};
    const Statistics s = summarize(v);
    EXPECT_DOUBLE_EQ(s.median, 2.5);
    EXPECT_DOUBLE_EQ(s.q1, 1.75);
    EXPECT_DOUBLE_EQ(s.q3, 3.25);
    EXPECT_THROW(summarize(std::vector<double>{}), std::invalid_argument);
}

TEST(Summarize, MatchesNaiveMeanAndStd) {
    std::mt19937_64 rng(13);
    std::lognormal_distribution<double> d;
    std::vector<double> v(101);
    for (double& x : v) x = d(rng);
    double m = 0.0;
    for (double x : v) m += x;
    m /= 101.0;
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    const Statistics s = summarize(v);
    EXPECT_NEAR(s.mean, m, 1e-12);
    EXPECT_NEAR(s.std, std::sqrt(ss / 100.0), 1e-12);
    auto sorted = v;
    std::sort(sorted.begin(), sorted.end());
    EXPECT_EQ(s.median, sorted[50]);
    EXPECT_EQ(s.q1, sorted[25]);
    EXPECT_EQ(s.q3, sorted[75]);
}

TEST(RunReplicate, ObserverSeesEveryCycleAndRmseAgrees) {
    for (FilterKind kind : {FilterKind::sparse_ukf, FilterKind::progressive_ekf, FilterKind::enkf}) {
        const ExperimentConfig c = small_config(kind);
        std::vector<Eigen::VectorXd> xa, xt;
        std::uint64_t evals = 0;
        const auto r = run_replicate(c, 1, [&](std::size_t k, const Eigen::VectorXd& a, const Eigen::VectorXd& t,
                                               const CycleDiagnostics& d) {
            EXPECT_EQ(k, xa.size());
            xa.push_back(a);
            xt.push_back(t);
            if (k > 0) EXPECT_EQ(d.evaluations, c.expected_evaluations());
            evals += d.evaluations;
        });
        ASSERT_FALSE(r.failed) << r.error;
        EXPECT_EQ(xa.size(), c.steps + 1);
        EXPECT_NEAR(r.rmse, naive_rmse(xa, xt), 1e-12);
        EXPECT_DOUBLE_EQ(r.eval_per_cycle, static_cast<double>(c.expected_evaluations()));
        // The initial analysis is truth plus N(0, 0.2 I), well inside a few units.
        EXPECT_LT((xa[0] - xt[0]).cwiseAbs().maxCoeff(), 3.0);
        EXPECT_EQ(xt[0], generate_truth(c, 1)[0]);
    }
}

TEST(RunExperiment, IndependentOfWorkerCount) {
    for (FilterKind kind : {FilterKind::sparse_ukf, FilterKind::enkf}) {
        const ExperimentConfig c = small_config(kind);
        const RunSummary one = run_experiment(c, 1);
        const RunSummary three = run_experiment(c, 3);
        ASSERT_EQ(one.replicates.size(), 5u);
        for (std::size_t r = 0; r < 5; ++r) {
            EXPECT_EQ(one.replicates[r].replicate, r);
            EXPECT_EQ(one.replicates[r].rmse, three.replicates[r].rmse);
        }
        EXPECT_EQ(one.rmse.median, three.rmse.median);
        EXPECT_EQ(one.failed, 0u);
        EXPECT_NE(one.replicates[0].rmse, one.replicates[1].rmse);
    }
}

TEST(RunExperiment, SeedChangesResults) {
    ExperimentConfig c = small_config(FilterKind::progressive_ekf);
    c.replicates = 2;
    const auto a = run_experiment(c, 1);
    c.seed += 1;
    const auto b = run_experiment(c, 1);
    EXPECT_NE(a.replicates[0].rmse, b.replicates[0].rmse);
}

TEST(Config, ValidationRejectsBadValues) {
    ExperimentConfig c;
    EXPECT_NO_THROW(c.validate());
    c.nsp = 8;
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c = {};
    c.steps = 0;
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c = {};
    c.np = 0;
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c = {};
    c.n = 3;
    EXPECT_THROW(c.validate(), std::invalid_argument);
    EXPECT_THROW(run_replicate(c, 0), std::invalid_argument);
    EXPECT_EQ(parse_filter("pekf"), FilterKind::progressive_ekf);
    EXPECT_THROW(parse_filter("kf"), std::invalid_argument);
}

TEST(Config, LabelsAndEvaluationCounts) {
    ExperimentConfig c;
    EXPECT_EQ(c.param_label(), "nsp=7");
    EXPECT_EQ(c.expected_evaluations(), 600u);
    c.filter = FilterKind::progressive_ekf;
    c.nsp = 17;
    c.np = 2;
    EXPECT_EQ(c.param_label(), "nsp=17;np=2");
    EXPECT_EQ(c.expected_evaluations(), 1440u);
    c.filter = FilterKind::enkf;
    EXPECT_EQ(c.param_label(), "ens=10");
    EXPECT_EQ(c.expected_evaluations(), 400u);
}

TEST(Report, CsvLayout) {
    EXPECT_EQ(format_number(0.30612345678), "0.306123");
    EXPECT_EQ(format_number(600.0), "600");
    ExperimentConfig c = small_config(FilterKind::sparse_ukf);
    c.replicates = 2;
    c.steps = 10;
    const std::vector<RunSummary> runs{run_experiment(c, 1)};

    std::ostringstream summary;
    write_summary_csv(summary, runs);
    std::istringstream lines(summary.str());
    std::string header, row, extra;
    std::getline(lines, header);
    std::getline(lines, row);
    EXPECT_EQ(header, kSummaryHeader);
    EXPECT_EQ(row.rfind("sukf,nsp=7,", 0), 0u);
    EXPECT_EQ(row.substr(row.size() - 4), ",2,0");
    EXPECT_FALSE(std::getline(lines, extra));

    std::ostringstream reps;
    write_replicates_csv(reps, runs);
    std::istringstream rl(reps.str());
    std::getline(rl, header);
    EXPECT_EQ(header, kReplicateHeader);
    std::getline(rl, row);
    EXPECT_EQ(row.rfind("sukf,nsp=7,0,", 0), 0u);
    EXPECT_NE(row.find(",600,"), std::string::npos);
}

TEST(Summarize, ConstantSample) {
    const std::vector<double> v(7, 0.25);
    const Statistics s = summarize(v);
    EXPECT_EQ(s.std, 0.0);
    EXPECT_EQ(s.iqr, 0.0);
    EXPECT_EQ(s.median, 0.25);
    EXPECT_EQ(s.lower_whisker, 0.25);
    EXPECT_EQ(s.upper_whisker, 0.25);
}
