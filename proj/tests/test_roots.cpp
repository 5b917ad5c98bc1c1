#include <gtest/gtest.h>

#include <random>

#include <dnmap/roots.hpp>

using namespace dnmap;

namespace {

bool contains(const cvec& set, cplx z, double tol) {
    for (const cplx& s : set)
        if (std::abs(s - z) < tol) return true;
    return false;
}

} // namespace

TEST(Poly, RootsOfKnownPolynomial) {
    // (z - 1)(z - 2)(z + i) = z^3 + (i - 3) z^2 + (2 - 3i) z + 2i
    const cvec p{2.0 * I, 2.0 - 3.0 * I, I - 3.0, 1.0};
    const cvec r = poly::roots(p);
    ASSERT_EQ(r.size(), 3u);
    for (const cplx z : {cplx(1.0), cplx(2.0), -I}) EXPECT_TRUE(contains(r, z, 1e-13)) << z;
}

TEST(Quotient, LevelSetAndVieta) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (const cvec& c : {cvec{0.0, 0.0, 1.0}, cvec{0.0, I, 0.0, -I}, cvec{0.5, I, 0.2, I}, cvec{0.0, 1.0, 0.0, 0.0, 0.0, I}}) {
        const DispersionPolynomial d(c);
        const int n = d.degree();
        for (int trial = 0; trial < 50; ++trial) {
            const cplx xi(u(rng), u(rng));
            const cvec z = solve_roots(quotient_polynomial(d, xi));
            ASSERT_EQ(int(z.size()), n - 1);
            cplx sum = xi;
            for (const cplx& r : z) {
                EXPECT_LT(std::abs(d(r) - d(xi)) / std::max(1.0, std::abs(d(xi))), 1e-10);
                sum += r;
            }
            // all n roots of omega(z) - omega(xi) sum to -a_{n-1}/a_n
            EXPECT_LT(std::abs(sum + d.coeff(n - 1) / d.leading()), 1e-10);
        }
    }
}

TEST(Branches, HeatLowerBranchIsReflection) {
    const DispersionPolynomial d({0.0, 0.0, 1.0});
    cvec path;
    for (int i = 0; i <= 40; ++i) path.push_back((0.5 + 0.2 * i) * polar1(pi / 4 + 0.9 * (pi / 2) * i / 40.0));
    const auto b = track_branches(d, path, 1);
    for (std::size_t s = 0; s < path.size(); ++s) {
        ASSERT_EQ(b.branches[s].size(), 1u);
        EXPECT_NEAR(std::abs(b.branches[s][0] + path[s]), 0.0, 1e-12);
    }
}

TEST(Branches, AiryBranchesAreRotations) {
    const DispersionPolynomial d({0.0, 0.0, 0.0, -I});
    const cplx rho = polar1(2 * pi / 3);
    cvec path;
    for (int i = 0; i <= 30; ++i) path.push_back(cplx(-2.0 + 4.0 * i / 30.0, 1.5));
    const auto b = track_branches(d, path, 1);
    for (std::size_t s = 0; s < path.size(); ++s) {
        ASSERT_EQ(b.branches[s].size(), 2u);
        const cvec expect{rho * path[s], rho * rho * path[s]};
        const double a = std::arg(path[s]);
        for (const cplx& z : b.branches[s]) {
            EXPECT_TRUE(contains(expect, z, 1e-10));
            // inside the sector both labelled branches sit below the real axis
            if (a > pi / 3 && a < 2 * pi / 3) {
                EXPECT_LT(z.imag(), 0.0);
            }
        }
        // labels are continuous along the path
        if (s > 0) {
            EXPECT_LT(std::abs(b.branches[s][0] - b.branches[s - 1][0]), 0.5);
        }
    }
}

TEST(Branches, SeedingRadiusSeparatesRoots) {
    const DispersionPolynomial d({0.0, I, 0.0, -I});
    const auto s = sector_decomposition(d);
    const double R = seeding_radius(d, s);
    EXPECT_GE(R, 10.0 * (1.0 + d.lower_norm()));
    const cvec r = solve_roots(quotient_polynomial(d, R * polar1(s.mid(1))));
    int below = 0;
    for (const cplx& z : r) below += z.imag() < 0.0;
    EXPECT_EQ(below, s.N);
}
