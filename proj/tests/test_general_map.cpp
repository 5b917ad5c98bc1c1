#include <gtest/gtest.h>

#include <dnmap/general_map.hpp>
#include <dnmap/monomial_map.hpp>
#include <dnmap/oracle.hpp>

using namespace dnmap;

namespace {

double rel_error(const DNMapResult& r, const ExponentialProblem& ep) {
    double e = 0.0;
    for (std::size_t j = 0; j < r.orders.size(); ++j)
        for (std::size_t m = 0; m < r.times.size(); ++m) {
            const cplx ex = ep.expected(r.orders[j], r.times[m]);
            e = std::max(e, std::abs(r.values[j][m] - ex) / std::abs(ex));
        }
    return e;
}

BoundaryValueProblem heat_ramp() {
    BoundaryValueProblem p;
    p.dispersion = DispersionPolynomial({0.0, 0.0, 1.0});
    p.given_orders = {0};
    p.boundary_signals = {Signal::closed_form([](double t) { return cplx(t); }, Signal::Fn([](double) { return cplx(1.0); }), 1.0)};
    return p;
}

} // namespace

TEST(GeneralMap, StokesExponentialSolutions) {
    const auto grid = TimeGrid::make(1.0, 0.1, 256);
    const auto s1 = exponential_problem(DispersionPolynomial({0.0, I, 0.0, -I}), cplx(0.0, 2.0), {0});
    EXPECT_LT(rel_error(general_dn_map(s1.problem, grid), s1), 5e-4);
    const auto s2 = exponential_problem(DispersionPolynomial({0.0, I, 0.0, I}), cplx(0.0, 2.0), {0, 1});
    EXPECT_LT(rel_error(general_dn_map(s2.problem, grid), s2), 5e-4);
}

TEST(GeneralMap, HeatMatchesClosedForm) {
    const auto r = general_dn_map(heat_ramp(), TimeGrid::make(1.0, 0.1, 128));
    for (std::size_t m = 0; m < r.times.size(); ++m)
        EXPECT_NEAR(r.values[0][m].real(), -2.0 * std::sqrt(r.times[m] / pi), 1e-6);
}

TEST(GeneralMap, AgreesWithMonomialMapOnMonomials) {
    const auto ep = exponential_problem(DispersionPolynomial({0.0, 0.0, 0.0, -I}), cplx(0.5, 1.5), {0});
    const auto grid = TimeGrid::make(1.0, 0.1, 256);
    const auto a = monomial_dn_map(ep.problem, grid), b = general_dn_map(ep.problem, grid);
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < a.values.size(); ++j)
        for (std::size_t m = 0; m < a.values[j].size(); ++m) {
            num = std::max(num, std::abs(a.values[j][m] - b.values[j][m]));
            den = std::max(den, std::abs(a.values[j][m]));
        }
    EXPECT_LT(num / den, 1e-5);
}

TEST(GeneralMap, RecordsContourParameters) {
    const auto ep = exponential_problem(DispersionPolynomial({0.0, I, 0.0, -I}), cplx(0.0, 1.0), {0});
    const auto r = general_dn_map(ep.problem, TimeGrid::make(1.0, 0.1, 32));
    std::map<std::string, double> p(r.parameters.begin(), r.parameters.end());
    ASSERT_TRUE(p.count("L") && p.count("R_max") && p.count("delta0"));
    // L clears every singular point of the symbol
    EXPECT_GT(p["L"], singular_points(ep.problem.dispersion).radius);
    EXPECT_GT(p["R_max"], p["L"]);
    EXPECT_GT(p["delta0"], 0.0);
}

TEST(GeneralMap, JobsDoNotChangeBits) {
    const auto ep = exponential_problem(DispersionPolynomial({0.0, I, 0.0, I}), cplx(0.3, 1.2), {0, 1});
    const auto grid = TimeGrid::make(1.0, 0.1, 64);
    MapOptions four;
    four.jobs = 4;
    const auto a = general_dn_map(ep.problem, grid), b = general_dn_map(ep.problem, grid, four);
    for (std::size_t j = 0; j < a.values.size(); ++j)
        for (std::size_t m = 0; m < a.values[j].size(); ++m) {
            EXPECT_EQ(a.values[j][m].real(), b.values[j][m].real());
            EXPECT_EQ(a.values[j][m].imag(), b.values[j][m].imag());
        }
}

TEST(GeneralMap, RejectsNonCanonicalOrders) {
    const auto ep = exponential_problem(DispersionPolynomial({0.0, I, 0.0, I}), cplx(0.0, 1.0), {0, 2});
    EXPECT_THROW(general_dn_map(ep.problem, TimeGrid::make(1.0, 0.1, 16)), ValidationError);
}
