#include <gtest/gtest.h>

#include <dnmap/quadrature.hpp>

using namespace dnmap;

namespace {

std::vector<double> uniform_nodes(double T, int cells) {
    std::vector<double> n(std::size_t(cells) + 1);
    for (int i = 0; i <= cells; ++i) n[std::size_t(i)] = T * i / cells;
    return n;
}

double time_transform_error(cplx w, int cells) {
    const auto nodes = uniform_nodes(1.0, cells);
    cvec f(nodes.size()), out;
    for (std::size_t i = 0; i < nodes.size(); ++i) f[i] = std::sin(3.0 * nodes[i]);
    TimeTransform::run(w, nodes, f, out);
    // int_0^1 e^{w (tau - 1)} sin(3 tau) dtau
    const cplx ex = (std::exp(-w) * 3.0 + w * std::sin(3.0) - 3.0 * std::cos(3.0)) / (w * w + 9.0);
    return std::abs(out.back() - ex);
}

} // namespace

TEST(Gamma, KnownValues) {
    EXPECT_NEAR(gamma_fn(0.5), std::sqrt(pi), 1e-14);
    EXPECT_NEAR(gamma_fn(5.0), 24.0, 1e-12);
    EXPECT_NEAR(gamma_fn(1.0 / 3.0), 2.678938534707747, 1e-13);
}

TEST(GaussLegendre, PanelIsExactForPolynomials) {
    std::vector<double> xs, ws;
    quad::panel(0.0, 2.0, 8, xs, ws);
    double s = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) s += ws[i] * std::pow(xs[i], 15);
    EXPECT_NEAR(s, std::pow(2.0, 16) / 16.0, 1e-9);
}

TEST(Phi, SeriesAndRecurrenceAgree) {
    for (const cplx z : {cplx(0.999, 0.0), cplx(1.001, 0.0), cplx(0.0, 0.9999), cplx(0.0, 1.0001), cplx(-0.7, 0.7), cplx(-5.0, 2.0)}) {
        cplx p1, p2, p3;
        phi123(z, p1, p2, p3);
        const std::complex<long double> zl(z.real(), z.imag());
        const auto e1 = (std::exp(zl) - 1.0L) / zl;
        const auto e2 = (e1 - 1.0L) / zl;
        const auto e3 = (e2 - 0.5L) / zl;
        EXPECT_NEAR(std::abs(p1 - cplx(e1)), 0.0, 1e-13);
        EXPECT_NEAR(std::abs(p2 - cplx(e2)), 0.0, 1e-12);
        EXPECT_NEAR(std::abs(p3 - cplx(e3)), 0.0, 1e-11);
    }
    cplx p1, p2, p3;
    phi123(0.0, p1, p2, p3);
    EXPECT_DOUBLE_EQ(p1.real(), 1.0);
    EXPECT_DOUBLE_EQ(p2.real(), 0.5);
    EXPECT_NEAR(p3.real(), 1.0 / 6.0, 1e-16);
}

TEST(TimeTransformTest, ExactForQuadratics) {
    const cplx w(1.0, 2.0);
    std::vector<double> nodes{0.0, 0.1, 0.25, 0.3, 0.55, 0.8, 1.0};
    cvec f(nodes.size()), out;
    for (std::size_t i = 0; i < nodes.size(); ++i) f[i] = nodes[i] * nodes[i];
    TimeTransform::run(w, nodes, f, out);
    for (std::size_t m = 0; m < nodes.size(); ++m) {
        const double t = nodes[m];
        // int_0^t e^{w (tau - t)} tau^2 dtau
        const cplx ex = t * t / w - 2.0 * t / (w * w) + 2.0 / (w * w * w) * (1.0 - std::exp(-w * t));
        EXPECT_NEAR(std::abs(out[m] - ex), 0.0, 1e-14);
    }
}

TEST(TimeTransformTest, ConvergesWithHighOrder) {
    for (const cplx w : {cplx(1.0, 2.0), cplx(50.0, -30.0), cplx(0.0, 40.0)}) {
        const double e1 = time_transform_error(w, 64), e2 = time_transform_error(w, 128);
        EXPECT_LT(e2, 1e-6);
        EXPECT_GT(e1 / e2, 7.0) << "w = " << w;
    }
}

TEST(Abel, ExactForQuadratics) {
    const double beta = 0.5;
    std::vector<double> nodes{0.0, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6};
    cvec f(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) f[i] = 1.0 + nodes[i] * nodes[i];
    const AbelKernel ker(beta, nodes);
    for (std::size_t m = 1; m < nodes.size(); ++m) {
        const double t = nodes[m];
        // int_0^t (1 + tau^2)(t - tau)^{-beta} dtau
        const double ex = std::pow(t, 1 - beta) / (1 - beta) + 2.0 * std::pow(t, 3 - beta) / ((1 - beta) * (2 - beta) * (3 - beta));
        EXPECT_NEAR(ker.apply(f, m).real(), ex, 1e-14);
    }
}

TEST(Abel, IntegralOfSmoothSignal) {
    const auto s = Signal::closed_form([](double t) { return cplx(std::exp(t)); }, Signal::Fn([](double t) { return cplx(std::exp(t)); }), 1.0);
    // int_0^1 e^tau (1 - tau)^{-1/2} dtau = e sqrt(pi) erf(1)
    const double ex = std::exp(1.0) * std::sqrt(pi) * std::erf(1.0);
    EXPECT_NEAR(abel_integral(s, 0.5, 1.0, false).real(), ex, 1e-10);
    EXPECT_NEAR(abel_integral(s, 0.5, 1.0, true).real(), ex, 1e-10);
    const double e1 = std::abs(abel_integral(s, 0.5, 1.0, false, 256).real() - ex);
    const double e2 = std::abs(abel_integral(s, 0.5, 1.0, false, 512).real() - ex);
    EXPECT_GT(e1 / e2, 5.0);
    EXPECT_THROW(abel_integral(s, 1.5, 1.0, false), DomainError);
}

TEST(HalfLineTransform, CallableMatchesClosedForm) {
    const auto q = InitialData::callable([](double x) { return std::exp(I * cplx(0.3, 1.0) * x); });
    for (const cplx xi : {cplx(0.7, 0.0), cplx(-1.2, -0.5)})
        EXPECT_NEAR(std::abs(half_line_transform(q, xi) - (-I / (xi - cplx(0.3, 1.0)))), 0.0, 1e-10);
    EXPECT_EQ(half_line_transform(InitialData::zero(), 1.0), cplx(0.0));
}
