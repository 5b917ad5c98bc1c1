#include <gtest/gtest.h>

#include <random>

#include <dnmap/alternant.hpp>
#include <dnmap/roots.hpp>

using namespace dnmap;

TEST(Tail, PolynomialPieces) {
    const DispersionPolynomial d({5.0, 4.0, 3.0, 2.0});
    const cplx xi(0.4, -0.2);
    EXPECT_EQ(tail_polynomial(d, 0, xi), cplx(2.0));
    EXPECT_NEAR(std::abs(tail_polynomial(d, 1, xi) - (2.0 * xi + 3.0)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(tail_polynomial(d, 3, xi) - d(xi)), 0.0, 1e-14);
    EXPECT_THROW(tail_polynomial(d, 4, xi), DomainError);
    // heat: c_0 = i xi, c_1 = 1
    const DispersionPolynomial heat({0.0, 0.0, 1.0});
    EXPECT_NEAR(std::abs(flux_coefficient(heat, 0, xi) - I * xi), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(flux_coefficient(heat, 1, xi) - 1.0), 0.0, 1e-15);
}

TEST(Alternant, InverseAndQuotients) {
    const DispersionPolynomial d({0.0, I, 0.0, 0.3, -I});
    const cvec z{cplx(0.3, -1.0), cplx(-0.8, -0.4)};
    const std::vector<int> V{2, 3}, U{0, 1};
    const auto aq = alternant_quotients(d, z, V, U);
    const CMatrix id = aq.system.A * aq.system.inverse;
    EXPECT_LT((id - CMatrix::Identity(2, 2)).norm(), 1e-14);
    // Cramer: Q_jl equals det of A with column j replaced by the u_l column, over det A
    for (std::size_t j = 0; j < V.size(); ++j)
        for (std::size_t l = 0; l < U.size(); ++l) {
            CMatrix B = aq.system.A;
            for (Eigen::Index i = 0; i < 2; ++i) B(i, Eigen::Index(j)) = tail_polynomial(d, 4 - U[l] - 1, z[std::size_t(i)]);
            EXPECT_NEAR(std::abs(aq.Q[j][l] - B.determinant() / aq.system.det), 0.0, 1e-13);
        }
}

TEST(Alternant, DetectsCollision) {
    const DispersionPolynomial d({0.0, 0.0, 0.0, -I});
    EXPECT_THROW(alternant_system(d, {cplx(0.5, -0.5), cplx(0.5, -0.5)}, {1, 2}), StructuralError);
    EXPECT_THROW(alternant_system(d, {cplx(0.5, -0.5)}, {1, 2}), StructuralError);
}

TEST(Alternant, MonomialSpecialization) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> ang(0.05, pi - 0.05), rad(0.2, 4.0);
    struct Case {
        cvec c;
        std::vector<int> U, V;
    };
    const std::vector<Case> cases = {{{0.0, 0.0, 0.0, -I}, {0}, {1, 2}},
                                     {{0.0, 0.0, 0.0, -I}, {2}, {0, 1}},
                                     {{0.0, 0.0, 0.0, I}, {0, 1}, {2}},
                                     {{0.0, 0.0, 0.0, I}, {1, 2}, {0}},
                                     {{0.0, 0.0, 0.0, 0.0, 1.0}, {0, 1}, {2, 3}},
                                     {{0.0, 0.0, 0.0, 0.0, 0.0, -I}, {0, 1}, {2, 3, 4}}};
    for (const auto& c : cases) {
        const DispersionPolynomial d(c.c);
        const auto s = sector_decomposition(d);
        for (int k = 1; k <= s.upper_count(); ++k)
            for (int i = 0; i < 20; ++i) {
                const double a = s.theta1(k) + (s.theta2(k) - s.theta1(k)) * (ang(rng) / pi);
                EXPECT_LT(monomial_specialization_check(d, k, rad(rng) * polar1(a), c.V, c.U), 1e-10);
            }
    }
    EXPECT_THROW(monomial_specialization_check(DispersionPolynomial({0.0, I, 0.0, -I}), 1, I, {1, 2}, {0}), ModeError);
}
