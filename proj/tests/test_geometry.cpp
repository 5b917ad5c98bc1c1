#include <gtest/gtest.h>

#include <dnmap/geometry.hpp>

using namespace dnmap;

namespace {

void expect_sector_signs(const DispersionPolynomial& d) {
    const auto s = sector_decomposition(d);
    const cplx an = d.leading();
    ASSERT_EQ(int(s.upper.size()), s.n - s.N);
    ASSERT_EQ(int(s.lower.size()), s.N);
    for (int k = 1; k <= s.upper_count(); ++k) {
        EXPECT_GT(s.theta1(k), 0.0 - 1e-14);
        EXPECT_LT(s.theta2(k), pi + 1e-14);
        EXPECT_NEAR(s.theta2(k) - s.theta1(k), pi / s.n, 1e-14);
        // a_n xi^n is negative real mid-sector and positive real on the rotated rays
        const cplx mid = an * std::pow(polar1(s.mid(k)), s.n);
        EXPECT_NEAR(mid.imag(), 0.0, 1e-13);
        EXPECT_LT(mid.real(), 0.0);
        for (double a : {s.alpha(k), s.beta(k)}) {
            const cplx r = an * std::pow(polar1(a), s.n);
            EXPECT_NEAR(r.imag(), 0.0, 1e-13);
            EXPECT_GT(r.real(), 0.0);
        }
    }
}

} // namespace

TEST(Sectors, Heat) {
    const auto s = sector_decomposition(DispersionPolynomial({0.0, 0.0, 1.0}));
    EXPECT_EQ(s.N, 1);
    EXPECT_NEAR(s.theta1(1), pi / 4, 1e-15);
    EXPECT_NEAR(s.theta2(1), 3 * pi / 4, 1e-15);
    EXPECT_NEAR(s.wedge_low(1), 0.0, 1e-15);
    EXPECT_NEAR(s.wedge_high(1), pi, 1e-15);
}

TEST(Sectors, SignStructure) {
    for (const cvec& c : {cvec{0.0, 0.0, 1.0}, cvec{0.0, 0.0, 0.0, I}, cvec{0.0, 0.0, 0.0, -I}, cvec{0.0, 0.0, 0.0, 0.0, 1.0},
                          cvec{0.0, 0.0, 0.0, 0.0, 0.0, I}, cvec{0.0, 0.0, 0.0, 0.0, 0.0, -I}, cvec{0.0, 0.0, I}})
        expect_sector_signs(DispersionPolynomial(c));
}

TEST(Sectors, AiryCounts) {
    EXPECT_EQ(sector_decomposition(DispersionPolynomial({0.0, 0.0, 0.0, -I})).upper_count(), 1);
    EXPECT_EQ(sector_decomposition(DispersionPolynomial({0.0, 0.0, 0.0, I})).upper_count(), 2);
}

TEST(Domain, Membership) {
    const DispersionPolynomial heat({0.0, 0.0, 1.0});
    EXPECT_TRUE(in_domain(heat, cplx(0.0, 1.0)));
    EXPECT_FALSE(in_domain(heat, cplx(1.0, 0.0)));
}

TEST(Zeros, StokesOne) {
    // omega = i xi - i xi^3 = -i xi (xi - 1)(xi + 1)
    const DispersionPolynomial d({0.0, I, 0.0, -I});
    const auto s = sector_decomposition(d);
    const auto z = zeros_of_omega(d, s.upper_count());
    EXPECT_TRUE(z.zero_at_origin);
    EXPECT_FALSE(z.clustered);
    ASSERT_EQ(z.zeros.size(), 3u);
    std::vector<double> re;
    for (const auto& x : z.zeros) {
        EXPECT_NEAR(x.value.imag(), 0.0, 1e-12);
        EXPECT_EQ(x.multiplicity, 1);
        re.push_back(x.value.real());
    }
    std::sort(re.begin(), re.end());
    EXPECT_NEAR(re[0], -1.0, 1e-12);
    EXPECT_NEAR(re[1], 0.0, 1e-12);
    EXPECT_NEAR(re[2], 1.0, 1e-12);
}

TEST(Zeros, ClassifyAngle) {
    EXPECT_EQ(classify_angle(pi / 4, 1, 2), ZeroPlacement::Interior);
    EXPECT_EQ(classify_angle(pi / 2, 1, 2), ZeroPlacement::Boundary);
    EXPECT_EQ(classify_angle(0.0, 1, 2), ZeroPlacement::Boundary);
    EXPECT_EQ(classify_angle(3 * pi / 4, 1, 2), ZeroPlacement::Outside);
    EXPECT_EQ(classify_angle(-pi / 4, 1, 1), ZeroPlacement::Outside);
}

TEST(Singular, CriticalAndBranchPoints) {
    // xi^3 - 3 xi: critical +-1, omega(1) = -2 -> (xi - 1)^2 (xi + 2), omega(-1) = 2 -> (xi + 1)^2 (xi - 2)
    const auto sp = singular_points(DispersionPolynomial({0.0, -3.0, 0.0, 1.0}));
    ASSERT_EQ(sp.critical.size(), 2u);
    ASSERT_EQ(sp.branch.size(), 2u);
    std::vector<double> b{sp.branch[0].real(), sp.branch[1].real()};
    std::sort(b.begin(), b.end());
    EXPECT_NEAR(b[0], -2.0, 1e-10);
    EXPECT_NEAR(b[1], 2.0, 1e-10);
    EXPECT_NEAR(sp.radius, 2.0, 1e-10);
}
