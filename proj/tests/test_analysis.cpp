#include <gtest/gtest.h>

#include <sstream>

#include "irm/analysis.hpp"
#include "irm/benchgen.hpp"
#include "irm/solvers.hpp"

using irm::ConvergenceTrace;
using irm::Rational;
using irm::StepRecord;
using irm::Termination;

namespace {

Rational q(long num, long den) { return Rational(mpz_class(num), mpz_class(den)); }

ConvergenceTrace<Rational> exact_trace(std::vector<Rational> rr, Termination t = Termination::converged) {
    ConvergenceTrace<Rational> trace;
    trace.order = 3;
    trace.settings.max_steps = 300;
    for (std::size_t i = 0; i < rr.size(); ++i) trace.records.push_back({i, rr[i], std::nullopt, i == 1, false});
    trace.termination = t;
    return trace;
}

ConvergenceTrace<double> double_trace(std::vector<double> rr, Termination t = Termination::converged) {
    ConvergenceTrace<double> trace;
    trace.order = 3;
    trace.settings.max_steps = 300;
    trace.settings.refresh_k = 50;
    for (std::size_t i = 0; i < rr.size(); ++i) trace.records.push_back({i, rr[i], std::nullopt, false, false});
    trace.termination = t;
    return trace;
}

std::string csv(const irm::AnyTrace& t) {
    std::ostringstream out;
    irm::emit_csv(t, out);
    return out.str();
}

} // namespace

TEST(RelativeNorms, Examples) {
    EXPECT_EQ(irm::relative_norms(exact_trace({Rational(4), Rational(1), Rational(0)})),
              (std::vector<double>{1.0, 0.5, 0.0}));
    EXPECT_EQ(irm::relative_norms(exact_trace({q(7, 3)})), (std::vector<double>{1.0}));
    EXPECT_EQ(irm::relative_norms(double_trace({4.0, 1.0})), (std::vector<double>{1.0, 0.5}));
    EXPECT_THROW(irm::relative_norms(exact_trace({Rational(0)})), irm::ZeroInitialResidual);
}

TEST(RelativeNorms, ExactDivisionBeforeDemotion) {
    // rr values far beyond double range still give a finite ratio
    mpz_class big;
    mpz_ui_pow_ui(big.get_mpz_t(), 10, 400);
    const Rational huge(big, mpz_class(1));
    const auto n = irm::relative_norms(exact_trace({huge * Rational(4), huge}));
    EXPECT_EQ(n[1], 0.5);
}

TEST(CountActive, Examples) {
    using M = irm::SymmetricMatrix<Rational>;
    using V = irm::Vector<Rational>;
    EXPECT_EQ(irm::count_active(M::diagonal({Rational(2), Rational(2), Rational(5)}), V{Rational(1), Rational(0), Rational(3)}), 2u);
    EXPECT_EQ(irm::count_active(M::diagonal({Rational(1), Rational(2), Rational(3)}), V{Rational(0), Rational(1), Rational(0)}), 1u);
    EXPECT_EQ(irm::count_active(M::diagonal({Rational(1), Rational(2), Rational(3)}), V(3)), 0u);
    EXPECT_THROW(irm::count_active(M::from_rows({{Rational(2), Rational(1)}, {Rational(1), Rational(2)}}), V(2)),
                 irm::DiagonalRequired);
}

TEST(Compare, IdenticalTraces) {
    const irm::AnyTrace t = exact_trace({Rational(9), Rational(1), Rational(0)});
    const auto report = irm::compare(t, t);
    EXPECT_FALSE(report.divergence_step);
    EXPECT_EQ(report.delta_steps, 0);
    EXPECT_EQ(report.summary_line(), "divergence_step=none delta_steps=0");
    EXPECT_FALSE(report.termination_mismatch);
}

TEST(Compare, LaterDoubleTermination) {
    std::vector<Rational> e;
    std::vector<double> d;
    for (int i = 0; i < 6; ++i) {
        e.push_back(Rational(1) / Rational(1 << (2 * i)));
        d.push_back(1.0 / (1 << (2 * i)));
    }
    e.push_back(Rational(0));
    d.push_back(1e-8);
    d.push_back(1e-20);
    d.push_back(1e-30);
    const auto report = irm::compare(exact_trace(e), double_trace(d));
    EXPECT_EQ(report.first_steps, 6u);
    EXPECT_EQ(report.second_steps, 8u);
    EXPECT_EQ(report.delta_steps, 2);
    ASSERT_TRUE(report.divergence_step);
    EXPECT_EQ(*report.divergence_step, 6u);
    EXPECT_FALSE(report.termination_mismatch);
    EXPECT_EQ(report.summary_line(), "divergence_step=6 delta_steps=2");
    const auto text = irm::format_report(report);
    EXPECT_NE(text.find("rel_E"), std::string::npos);
    EXPECT_NE(text.find("rel_DP"), std::string::npos);
}

TEST(Compare, GapControlsDivergence) {
    const auto e = exact_trace({Rational(1), q(1, 100), q(1, 10000)});
    const auto d = double_trace({1.0, 1e-3, 1e-6});
    // relative norms (1, 0.1, 0.01) vs (1, 0.0316, 0.001)
    EXPECT_EQ(*irm::compare(e, d, 0.4).divergence_step, 1u);
    EXPECT_EQ(*irm::compare(e, d, 0.9).divergence_step, 2u);
    EXPECT_FALSE(irm::compare(e, d, 1.0).divergence_step);
    EXPECT_TRUE(irm::compare(e, d).second_below_first);
    EXPECT_THROW(irm::compare(e, d, 0.0), irm::InvalidConfig);
}

TEST(Compare, StalledDoubleFlagsMismatch) {
    const auto e = exact_trace({Rational(1), q(1, 4), Rational(0)});
    const auto d = double_trace({1.0, 0.25, 1e-3, 1e-3}, Termination::max_steps);
    const auto report = irm::compare(e, d);
    EXPECT_TRUE(report.termination_mismatch);
    EXPECT_NE(irm::format_report(report).find("termination mismatch"), std::string::npos);
}

TEST(Compare, MismatchedConfigsThrow) {
    const auto e = exact_trace({Rational(1), Rational(0)});
    auto d = double_trace({1.0, 0.0});
    d.settings.omega = q(1, 2);
    EXPECT_THROW(irm::compare(e, d), irm::IncomparableTraces);
    d = double_trace({1.0, 0.0});
    d.settings.method = irm::Method::cg;
    EXPECT_THROW(irm::compare(e, d), irm::IncomparableTraces);
    d = double_trace({1.0, 0.0});
    d.system_id = 1;
    auto e2 = e;
    e2.system_id = 2;
    EXPECT_THROW(irm::compare(e2, d), irm::IncomparableTraces);
    d.order = 4;
    EXPECT_THROW(irm::compare(e, d), irm::IncomparableTraces);
}

TEST(Csv, ExactFormat) {
    auto t = exact_trace({Rational(3), q(1, 2), Rational(0)});
    t.records[1].energy = q(-3, 4);
    t.seed = 7;
    const std::string text = csv(t);
    EXPECT_EQ(text, "# method=irm-cg\n"
                    "# arith=E\n"
                    "# omega=1\n"
                    "# epsilon=0\n"
                    "# refresh_k=1\n"
                    "# max_steps=300\n"
                    "# generator=residual+increment\n"
                    "# seed=7\n"
                    "# n=3\n"
                    "# system=none\n"
                    "# termination=converged\n"
                    "step,rr,energy,refreshed,perturbed\n"
                    "0,3/1,,0,0\n"
                    "1,1/2,-3/4,1,0\n"
                    "2,0/1,,0,0\n");
    std::istringstream in(text);
    EXPECT_EQ(std::get<ConvergenceTrace<Rational>>(irm::parse_csv(in)), t);
}

TEST(Csv, DoubleUsesShortestDecimals) {
    const auto t = double_trace({0.1, 1e-300});
    const std::string text = csv(t);
    EXPECT_NE(text.find("\n0,0.1,,0,0\n1,1e-300,,0,0\n"), std::string::npos);
    std::istringstream in(text);
    EXPECT_EQ(std::get<ConvergenceTrace<double>>(irm::parse_csv(in)), t);
}

TEST(Csv, SolverTraceRoundTripsByteForByte) {
    const auto sys = irm::gen_rotated(irm::SpectrumSpec::parse_inline("1x1,3x2,8x1"), irm::RotationPlan::random(4, 5, 2));
    irm::SolverConfig cfg;
    auto res = irm::solve(sys.a, sys.b, irm::Vector<Rational>(4), cfg);
    res.trace.system_id = irm::system_fingerprint(sys.a, sys.b);
    const std::string first = csv(res.trace);
    std::istringstream in(first);
    EXPECT_EQ(csv(irm::parse_csv(in)), first);
    EXPECT_EQ(csv(res.trace), first);
}

TEST(Csv, RejectsMalformed) {
    std::istringstream no_header("# arith=E\n0,1/1,,0,0\n");
    EXPECT_THROW(irm::parse_csv(no_header), irm::ParseError);
    auto text = csv(exact_trace({Rational(1)}));
    std::istringstream bad_flag(text.substr(0, text.size() - 2) + "2\n");
    EXPECT_THROW(irm::parse_csv(bad_flag), irm::ParseError);
    std::string missing = text;
    missing.erase(missing.find("# n=3\n"), 6);
    std::istringstream no_n(missing);
    EXPECT_THROW(irm::parse_csv(no_n), irm::ParseError);
    EXPECT_THROW(irm::read_csv("/nonexistent/trace.csv"), irm::IoError);
}

TEST(Fingerprint, DistinguishesSystems) {
    const auto a = irm::SymmetricMatrix<Rational>::diagonal({Rational(1), Rational(2)});
    const irm::Vector<Rational> b{Rational(1), Rational(1)};
    const irm::Vector<Rational> c{Rational(1), Rational(2)};
    EXPECT_EQ(irm::system_fingerprint(a, b), irm::system_fingerprint(a, b));
    EXPECT_NE(irm::system_fingerprint(a, b), irm::system_fingerprint(a, c));
}
