#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "helpers.hpp"
#include "irm/analysis.hpp"
#include "irm/cli.hpp"
#include "irm/matrix_io.hpp"

namespace fs = std::filesystem;
using irm::Rational;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("irm_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    Outcome run(std::vector<std::string> args) const {
        std::ostringstream out, err;
        const int code = irm::cli::run(args, out, err);
        return {code, out.str(), err.str()};
    }

    static std::string slurp(const std::string& p) {
        std::ifstream in(p, std::ios::binary);
        std::stringstream s;
        s << in.rdbuf();
        return s.str();
    }

    void write(const std::string& name, const std::string& text) const {
        std::ofstream out(path(name));
        out << text;
    }

    fs::path dir_;
};

} // namespace

TEST_F(Cli, GenDiagonalPrintsActiveCount) {
    const auto r = run({"gen", "--spectrum", "1x1,2x1,3x1", "--rhs", "ones", "-o", path("sys")});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("m=3"), std::string::npos);
    EXPECT_EQ(slurp(path("sys/A.txt")), "diagonal 3\n1\n2\n3\n");
    EXPECT_EQ(slurp(path("sys/b.txt")), "vector 3\n1\n1\n1\n");
}

TEST_F(Cli, GenRotatedKeepsTraceExact) {
    const auto r = run({"gen", "--spectrum", "2x2,5x1", "--rotate", "4", "--seed", "7", "-o", path("sys")});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("m=2"), std::string::npos);
    const auto a = irm::io::load_matrix(path("sys/A.txt"));
    EXPECT_FALSE(a.is_diagonal());
    EXPECT_EQ(a.order(), 3u);
    // 2 * 2 + 5 * 1
    EXPECT_EQ(oracle::trace(testing_support::to_qmat(a)), 9);
}

TEST_F(Cli, GenSpringChain) {
    const auto r = run({"gen", "--chain", "2", "--stiff", "1,1,1", "-o", path("sys")});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(slurp(path("sys/A.txt")), "symmetric 2\n2\n-1 2\n");
    EXPECT_EQ(r.out.find("m="), std::string::npos);
}

TEST_F(Cli, GenInverseRecoversTheChosenSolution) {
    write("xstar.txt", "vector 3\n1/2\n-3\n4\n");
    const auto g = run({"gen", "--spectrum", "1x1,2x1,6x1", "--rotate", "3", "--seed", "5", "--inverse", path("xstar.txt"),
                        "-o", path("sys")});
    ASSERT_EQ(g.code, 0) << g.err;
    const auto s = run({"solve", path("sys/A.txt"), path("sys/b.txt"), "--x-out", path("x.txt")});
    ASSERT_EQ(s.code, 0) << s.err;
    EXPECT_EQ(slurp(path("x.txt")), "vector 3\n1/2\n-3\n4\n");
}

TEST_F(Cli, GenErrors) {
    EXPECT_EQ(run({"gen", "--spectrum", "1x1,1x1", "-o", path("sys")}).code, irm::cli::kUsage);
    EXPECT_EQ(run({"gen", "--spectrum", "1x", "-o", path("sys")}).code, irm::cli::kUsage);
    EXPECT_EQ(run({"gen", "--spectrum", "1x1", "--chain", "2", "-o", path("sys")}).code, irm::cli::kUsage);
    EXPECT_EQ(run({"gen", "--chain", "2", "--stiff", "1,1", "-o", path("sys")}).code, irm::cli::kUsage);
    EXPECT_EQ(run({"gen", "--spectrum", "1x1"}).code, irm::cli::kUsage);
    EXPECT_EQ(run({"frobnicate"}).code, irm::cli::kUsage);
    EXPECT_EQ(run({"--help"}).code, 0);
}

TEST_F(Cli, SolveExactDiag123) {
    ASSERT_EQ(run({"gen", "--spectrum", "1x1,2x1,3x1", "-o", path("sys")}).code, 0);
    const auto r = run({"solve", "--method", "irm-cg", "--arith", "exact", "--omega", "1", "--eps", "0",
                        path("sys/A.txt"), path("sys/b.txt"), "-o", path("e.csv")});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("steps=3"), std::string::npos);
    EXPECT_NE(r.out.find("rr=0/1"), std::string::npos);
    const auto t = std::get<irm::ConvergenceTrace<Rational>>(irm::read_csv(path("e.csv")));
    EXPECT_EQ(t.steps(), 3u);
    EXPECT_TRUE(t.records.back().rr.is_zero());
    EXPECT_TRUE(t.system_id.has_value());
}

TEST_F(Cli, SolveDoubleCg) {
    ASSERT_EQ(run({"gen", "--spectrum", "1x1,2x1,3x1,10x2", "-o", path("sys")}).code, 0);
    const auto r = run({"solve", "--method", "cg", "--arith", "f64", "--eps", "1e-10", "--refresh-k", "50",
                        path("sys/A.txt"), path("sys/b.txt"), "-o", path("d.csv")});
    EXPECT_EQ(r.code, 0) << r.err;
    const auto t = std::get<irm::ConvergenceTrace<double>>(irm::read_csv(path("d.csv")));
    EXPECT_EQ(t.termination, irm::Termination::converged);
    EXPECT_EQ(t.settings.refresh_k, 50u);
}

TEST_F(Cli, SolvePerturbationIsRecorded) {
    ASSERT_EQ(run({"gen", "--spectrum", "1x2,2x2,3x2,4x2", "-o", path("sys")}).code, 0);
    const auto r = run({"solve", "--perturb", "1:7:1", "--max-steps", "20", "--no-energy", path("sys/A.txt"),
                        path("sys/b.txt"), "-o", path("p.csv")});
    EXPECT_NE(r.code, irm::cli::kUsage) << r.err;
    const auto t = std::get<irm::ConvergenceTrace<Rational>>(irm::read_csv(path("p.csv")));
    EXPECT_TRUE(t.records[1].perturbed);
    EXPECT_FALSE(t.records[1].energy.has_value());
    EXPECT_EQ(run({"solve", "--perturb", "1:99:1", path("sys/A.txt"), path("sys/b.txt")}).code, irm::cli::kUsage);
    // each --perturb takes one value, so positionals may follow it
    const auto two = run({"solve", "--perturb", "1:1:1", "--perturb", "2:2:1", path("sys/A.txt"), path("sys/b.txt"),
                          "--max-steps", "3", "-o", path("q.csv")});
    EXPECT_NE(two.code, irm::cli::kUsage) << two.err;
    const auto t2 = std::get<irm::ConvergenceTrace<Rational>>(irm::read_csv(path("q.csv")));
    EXPECT_TRUE(t2.records[1].perturbed && t2.records[2].perturbed);
}

TEST_F(Cli, SolveExitCodes) {
    write("bad.txt", "symmetric 2\n1\n2 1\n");
    write("b2.txt", "vector 2\n1\n1\n");
    EXPECT_EQ(run({"solve", path("bad.txt"), path("b2.txt")}).code, irm::cli::kNotSpd);
    EXPECT_EQ(run({"solve", "--arith", "f64", path("bad.txt"), path("b2.txt")}).code, irm::cli::kNotSpd);

    ASSERT_EQ(run({"gen", "--spectrum", "1x1,2x1,3x1", "-o", path("sys")}).code, 0);
    EXPECT_EQ(run({"solve", "--omega", "1/2", "--budget-bits", "4096", path("sys/A.txt"), path("sys/b.txt")}).code,
              irm::cli::kBudget);
    EXPECT_EQ(run({"solve", "--max-steps", "1", path("sys/A.txt"), path("sys/b.txt")}).code, irm::cli::kNotConverged);
    EXPECT_EQ(run({"solve", "--omega", "2", path("sys/A.txt"), path("sys/b.txt")}).code, irm::cli::kUsage);
    EXPECT_EQ(run({"solve", path("missing.txt"), path("sys/b.txt")}).code, irm::cli::kUsage);
    EXPECT_EQ(run({"solve", path("sys/A.txt"), path("b2.txt")}).code, irm::cli::kUsage);
}

TEST_F(Cli, SolveMatrixMarketWithSnap) {
    write("A.mtx", "%%MatrixMarket matrix coordinate real symmetric\n2 2 3\n1 1 2.0\n2 1 1e-30\n2 2 4.0\n");
    write("b.txt", "vector 2\n2\n4\n");
    const auto r = run({"solve", "--snap-zero", "1e-20", path("A.mtx"), path("b.txt"), "--x-out", path("x.txt")});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(slurp(path("x.txt")), "vector 2\n1\n1\n");
}

TEST_F(Cli, CompareAndActive) {
    ASSERT_EQ(run({"gen", "--spectrum", "1x1,2x1,3x1", "-o", path("sys")}).code, 0);
    ASSERT_EQ(run({"solve", path("sys/A.txt"), path("sys/b.txt"), "-o", path("e.csv")}).code, 0);
    ASSERT_EQ(run({"solve", "--arith", "f64", path("sys/A.txt"), path("sys/b.txt"), "-o", path("d.csv")}).code, 0);
    ASSERT_EQ(run({"solve", "--omega", "0.9", "--eps", "1/10", path("sys/A.txt"), path("sys/b.txt"), "-o",
                   path("w.csv")}).code,
              0);

    const auto self = run({"compare", path("e.csv"), path("e.csv")});
    EXPECT_EQ(self.code, 0);
    EXPECT_NE(self.out.find("divergence_step=none delta_steps=0"), std::string::npos);
    EXPECT_EQ(run({"compare", path("e.csv"), path("d.csv")}).code, 0);
    EXPECT_EQ(run({"compare", path("e.csv"), path("w.csv")}).code, irm::cli::kIncomparable);

    const auto active = run({"active", path("sys/A.txt"), path("sys/b.txt")});
    EXPECT_EQ(active.out, "m=3\n");
    ASSERT_EQ(run({"gen", "--spectrum", "1x1,2x1", "--rotate", "1", "-o", path("rot")}).code, 0);
    EXPECT_EQ(run({"active", path("rot/A.txt"), path("rot/b.txt")}).code, irm::cli::kUsage);
}

TEST_F(Cli, ManifestReplayIsByteIdentical) {
    const auto g = run({"gen", "--spectrum", "1x2,3x1,4x2", "--rhs", "random", "--rotate", "5", "--seed", "11", "-o",
                        path("sys"), "--write-manifest", path("gen.json")});
    ASSERT_EQ(g.code, 0) << g.err;
    const auto solve = run({"solve", "--method", "cg", "--perturb", "2:1:1/3", "--max-steps", "12", path("sys/A.txt"),
                            path("sys/b.txt"), "-o", path("t.csv"), "--write-manifest", path("solve.json")});
    const std::string a_first = slurp(path("sys/A.txt"));
    const std::string first = slurp(path("t.csv"));
    fs::remove_all(path("sys"));
    fs::remove(path("t.csv"));

    ASSERT_EQ(run({"replay", path("gen.json")}).code, 0);
    EXPECT_EQ(run({"replay", path("solve.json")}).code, solve.code);
    EXPECT_EQ(slurp(path("sys/A.txt")), a_first);
    EXPECT_EQ(slurp(path("t.csv")), first);

    const auto m = irm::cli::RunManifest::from_json(slurp(path("solve.json")));
    ASSERT_TRUE(m.solve);
    EXPECT_EQ(m.solve->method, "cg");
    EXPECT_EQ(m.solve->perturb, std::vector<std::string>{"2:1:1/3"});
    EXPECT_EQ(m.to_json(), irm::cli::RunManifest::from_json(m.to_json()).to_json());

    write("broken.json", "{\"subcommand\": \"solve\"");
    EXPECT_EQ(run({"replay", path("broken.json")}).code, irm::cli::kUsage);
}
