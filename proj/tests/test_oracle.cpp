#include <gtest/gtest.h>

#include <random>

#include <dnmap/oracle.hpp>

using namespace dnmap;

TEST(Exponential, SolvesThePde) {
    for (const cvec& c : {cvec{0.0, 0.0, 1.0}, cvec{0.0, 0.0, 0.0, -I}, cvec{0.0, I, 0.0, I}, cvec{1.0, 0.5, 0.0, 0.0, 1.0}}) {
        const ExponentialSolution sol(DispersionPolynomial(c), cplx(0.4, 1.3));
        for (double t : {0.1, 0.7})
            for (double x : {0.0, 0.5, 2.0}) EXPECT_LT(std::abs(sol.pde_residual(t, x)) / std::abs(sol.value(t, x)), 1e-8);
        EXPECT_NEAR(std::abs(sol.boundary(0, 0.3) - sol.value(0.3, 0.0)), 0.0, 1e-15);
    }
    EXPECT_THROW(ExponentialSolution(DispersionPolynomial({0.0, 0.0, 1.0}), cplx(1.0, 0.0)), DomainError);
}

TEST(Exponential, TransformMatchesQuadrature) {
    const ExponentialSolution sol(DispersionPolynomial({0.0, 0.0, 0.0, I}), cplx(0.2, 1.0));
    const cplx xi(0.8, -0.3);
    const cplx num = adaptive_simpson([&](double x) { return std::exp(-I * xi * x) * sol.value(0.0, x); }, 0.0, 40.0, 1e-13);
    EXPECT_NEAR(std::abs(num - sol.initial_transform(xi)), 0.0, 1e-10);
}

TEST(Exponential, ProblemCarriesBoundaryData) {
    const auto ep = exponential_problem(DispersionPolynomial({0.0, 0.0, 0.0, I}), cplx(0.0, 2.0), {0, 1});
    ASSERT_EQ(ep.problem.boundary_signals.size(), 2u);
    EXPECT_NEAR(std::abs(ep.problem.boundary_signals[1].value(0.5) - ep.solution.boundary(1, 0.5)), 0.0, 1e-15);
    EXPECT_TRUE(validate_problem(ep.problem).empty());
}

TEST(Simpson, SmoothIntegral) {
    const cplx v = adaptive_simpson([](double t) { return std::exp(I * t); }, 0.0, 1.0);
    EXPECT_NEAR(std::abs(v - (std::exp(I) - 1.0) / I), 0.0, 1e-12);
}

TEST(GlobalRelation, VanishesForExactSolutions) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> re(-2.0, 2.0), im(-2.0, 0.0);
    for (const cvec& c : {cvec{0.0, 0.0, 1.0}, cvec{0.0, I, 0.0, -I}, cvec{0.0, 0.0, 0.0, I}}) {
        const ExponentialSolution sol(DispersionPolynomial(c), cplx(0.3, 1.1));
        for (int i = 0; i < 20; ++i) EXPECT_LT(std::abs(global_relation_residual(sol, cplx(re(rng), im(rng)), 0.8)), 1e-8);
    }
}

TEST(HeatReference, RampNeumannValue) {
    const auto g = Signal::closed_form([](double t) { return cplx(t); }, std::nullopt, 1.0);
    const auto ref = heat_reference_solver(g, 1.0, 12.0, 2000, 2000);
    ASSERT_EQ(ref.times.size(), ref.neumann.size());
    EXPECT_NEAR(ref.times.back(), 1.0, 1e-14);
    EXPECT_NEAR(ref.neumann.back(), -2.0 / std::sqrt(pi), 1e-4);
}

TEST(HeatReference, FarFieldMonitorTrips) {
    const auto g = Signal::closed_form([](double t) { return cplx(t); }, std::nullopt, 1.0);
    EXPECT_THROW(heat_reference_solver(g, 1.0, 2.0, 200, 200), DomainError);
}
