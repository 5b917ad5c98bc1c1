#pragma once

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "core.hpp"
#include "problem.hpp"

namespace dnmap {

/// Gamma function for x > 0.
inline double gamma_fn(double x) {
    if (!(x > 0.0)) throw DomainError("gamma_fn: argument must be positive");
    return std::tgamma(x);
}

namespace quad {

/// Gauss-Legendre rule on [-1, 1].
struct Rule {
    std::vector<double> x;
    std::vector<double> w;
};

template <unsigned M>
Rule make_rule() {
    using G = boost::math::quadrature::gauss<double, M>;
    Rule r;
    const auto& a = G::abscissa();
    const auto& w = G::weights();
    for (std::size_t i = a.size(); i-- > 0;) {
        if (a[i] == 0.0) continue;
        r.x.push_back(-a[i]);
        r.w.push_back(w[i]);
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
        r.x.push_back(a[i]);
        r.w.push_back(w[i]);
    }
    // the zero node of odd rules appears once, in the second loop
    return r;
}

/// Cached rules for the orders used by the contour code.
inline const Rule& gauss_legendre(int m) {
    static const Rule r8 = make_rule<8>();
    static const Rule r12 = make_rule<12>();
    static const Rule r16 = make_rule<16>();
    static const Rule r20 = make_rule<20>();
    static const Rule r24 = make_rule<24>();
    static const Rule r32 = make_rule<32>();
    switch (m) {
    case 8: return r8;
    case 12: return r12;
    case 16: return r16;
    case 20: return r20;
    case 24: return r24;
    case 32: return r32;
    default: throw DomainError("gauss_legendre: unsupported order");
    }
}

/// Nodes/weights of rule m mapped to [a, b].
inline void panel(double a, double b, int m, std::vector<double>& xs, std::vector<double>& ws) {
    const Rule& r = gauss_legendre(m);
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    for (std::size_t i = 0; i < r.x.size(); ++i) {
        xs.push_back(c + h * r.x[i]);
        ws.push_back(h * r.w[i]);
    }
}

/// Complex integrand on a real interval by adaptive Gauss-Kronrod, real and
/// imaginary parts separately.
template <class F>
cplx integrate_gk(F&& f, double a, double b, double tol = 1e-12, double* err = nullptr) {
    using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
    double e1 = 0.0, e2 = 0.0;
    const double re = GK::integrate([&](double x) { return f(x).real(); }, a, b, 15, tol, &e1);
    const double im = GK::integrate([&](double x) { return f(x).imag(); }, a, b, 15, tol, &e2);
    if (err) *err = std::hypot(e1, e2);
    return {re, im};
}

} // namespace quad

/// phi_1..phi_3 with phi_k(z) = sum_j z^j/(j+k)!, stable near 0.
inline void phi123(cplx z, cplx& p1, cplx& p2, cplx& p3) {
    if (std::abs(z) < 1.0) {
        cplx t1 = 1.0, t2 = 0.5, t3 = 1.0 / 6.0;
        p1 = t1;
        p2 = t2;
        p3 = t3;
        for (int k = 1; k < 24; ++k) {
            t1 *= z / double(k + 1);
            t2 *= z / double(k + 2);
            t3 *= z / double(k + 3);
            p1 += t1;
            p2 += t2;
            p3 += t3;
        }
        return;
    }
    const cplx em1 = std::exp(z) - 1.0;
    p1 = em1 / z;
    p2 = (p1 - 1.0) / z;
    p3 = (p2 - 0.5) / z;
}

/// Inner time integral E(t) = int_0^t e^{w (tau - t)} f(tau) dtau on a grid.
/// On each cell f is replaced by the quadratic through the cell ends and the
/// previous node (the next one on the first cell); exact for that interpolant.
struct TimeTransform {
    /// out[m] = E(nodes[m]); out[0] = 0.
    static void run(cplx w, const std::vector<double>& nodes, const cvec& f, cvec& out) {
        const std::size_t K = nodes.size();
        out.assign(K, cplx(0.0));
        if (K < 2) return;
        double h_prev = -1.0, e_prev = 0.0;
        cplx decay = 0.0, c0 = 0.0, c1 = 0.0, c2 = 0.0;
        for (std::size_t m = 0; m + 1 < K; ++m) {
            const double h = nodes[m + 1] - nodes[m];
            // third node, measured like tau - t_m
            std::size_t third = m + 2;
            if (m > 0) third = m - 1;
            const bool quadratic = third < K;
            const double e = quadratic ? nodes[third] - nodes[m] : 0.0;
            // grid spacings repeat up to rounding; reuse the weights then
            if (std::abs(h - h_prev) > 1e-13 * h || std::abs(e - e_prev) > 1e-13 * h) {
                const cplx z = -w * h;
                cplx p1, p2, p3;
                phi123(z, p1, p2, p3);
                decay = std::exp(z);
                // nu_q = int_0^h e^{-w (h - s)} s^q ds
                const cplx nu0 = h * p1, nu1 = h * h * p2, nu2 = 2.0 * h * h * h * p3;
                if (quadratic) {
                    // Lagrange basis at s = 0 (t_m), h (t_{m+1}), e (third)
                    c1 = (nu2 - (h + e) * nu1 + h * e * nu0) / (h * e);
                    c0 = (nu2 - e * nu1) / (h * (h - e));
                    c2 = (nu2 - h * nu1) / (e * (e - h));
                } else {
                    c0 = nu1 / h;
                    c1 = nu0 - nu1 / h;
                    c2 = 0.0;
                }
                h_prev = h;
                e_prev = e;
            }
            out[m + 1] = decay * out[m] + c0 * f[m + 1] + c1 * f[m] + (quadratic ? c2 * f[third] : cplx(0.0));
        }
    }
};

/// Product-integration weights for int_0^{t_m} f(tau) (t_m - tau)^{-beta} dtau
/// with f interpolated on each cell by the quadratic through the cell ends and
/// the next node (the previous one on the last cell).
class AbelKernel {
public:
    AbelKernel(double beta, std::vector<double> nodes) : beta_(beta), nodes_(std::move(nodes)) {
        if (!(beta > 0.0 && beta < 1.0)) throw DomainError("abel kernel: beta must lie in (0, 1)");
        if (nodes_.size() < 3) throw DomainError("abel kernel: need at least three nodes");
        // on the uniform tail of the grid the weights depend only on m - i
        const std::size_t K = nodes_.size();
        h_ = nodes_[K - 1] - nodes_[K - 2];
        u0_ = K - 2;
        while (u0_ > 0 && std::abs((nodes_[u0_] - nodes_[u0_ - 1]) - h_) <= 1e-12 * h_) --u0_;
        table_.resize(K - u0_);
        for (std::size_t d = 1; d < table_.size(); ++d) weights(0.0, h_, double(d) * h_, 2.0 * h_, table_[d].data());
    }

    double beta() const { return beta_; }
    const std::vector<double>& nodes() const { return nodes_; }

    /// Integral up to nodes[m] of the interpolant of f (values at nodes).
    cplx apply(const cvec& f, std::size_t m) const {
        cplx acc = 0.0;
        const double t = nodes_[m];
        for (std::size_t i = 0; i < m; ++i) {
            const std::size_t e = i + 2 < nodes_.size() ? i + 2 : i - 1;
            if (i >= u0_ && e == i + 2) {
                const auto& w = table_[m - i];
                acc += w[0] * f[i] + w[1] * f[i + 1] + w[2] * f[e];
                continue;
            }
            double w[3];
            cell_weights(t, i, e, w);
            acc += w[0] * f[i] + w[1] * f[i + 1] + w[2] * f[e];
        }
        return acc;
    }

    /// Weights of nodes (i, i+1, e) for the cell [nodes[i], nodes[i+1]].
    void cell_weights(double t, std::size_t i, std::size_t e, double w[3]) const {
        weights(nodes_[i], nodes_[i + 1] - nodes_[i], t, nodes_[e] - nodes_[i], w);
    }

private:
    /// Cell [a, a + h], target t, third interpolation node at a + y3.
    void weights(double a, double h, double t, double y3, double w[3]) const {
        const double b = a + h;
        const double lo = t - b;
        // mu[q] = int_a^b (tau - a)^q (t - tau)^{-beta} dtau
        double mu[3];
        if (lo > 4.0 * h) {
            const quad::Rule& r = quad::gauss_legendre(8);
            mu[0] = mu[1] = mu[2] = 0.0;
            for (std::size_t k = 0; k < r.x.size(); ++k) {
                const double y = 0.5 * h * (r.x[k] + 1.0);
                const double kw = 0.5 * h * r.w[k] * std::pow(t - a - y, -beta_);
                mu[0] += kw;
                mu[1] += kw * y;
                mu[2] += kw * y * y;
            }
        } else {
            // s = t - tau in [lo, hi]; tau - a = hi - s
            const double hi = t - a;
            double I[3];
            for (int q = 0; q < 3; ++q) {
                const double p = q + 1.0 - beta_;
                I[q] = (std::pow(hi, p) - std::pow(lo, p)) / p;
            }
            mu[0] = I[0];
            mu[1] = hi * I[0] - I[1];
            mu[2] = hi * hi * I[0] - 2.0 * hi * I[1] + I[2];
        }
        const double y[3] = {0.0, h, y3};
        for (int k = 0; k < 3; ++k) {
            const double y1 = y[(k + 1) % 3], y2 = y[(k + 2) % 3];
            const double den = (y[k] - y1) * (y[k] - y2);
            w[k] = (y1 * y2 * mu[0] - (y1 + y2) * mu[1] + mu[2]) / den;
        }
    }

    double beta_;
    std::vector<double> nodes_;
    double h_ = 0.0;
    std::size_t u0_ = 0;
    std::vector<std::array<double, 3>> table_;
};

/// int_0^t f(tau) (t - tau)^{-beta} dtau (f replaced by its derivative when
/// requested) by product integration on `cells` uniform cells.
inline cplx abel_integral(const Signal& f, double beta, double t, bool use_derivative, int cells = 2048) {
    if (!(beta > 0.0 && beta < 1.0)) throw DomainError("abel_integral: beta must lie in (0, 1)");
    if (!(t > 0.0)) throw DomainError("abel_integral: t must be positive");
    std::vector<double> nodes(std::size_t(cells) + 1);
    cvec vals(nodes.size());
    for (int i = 0; i <= cells; ++i) {
        nodes[std::size_t(i)] = i == cells ? t : t * i / cells;
        vals[std::size_t(i)] = use_derivative ? f.derivative(nodes[std::size_t(i)]) : f.value(nodes[std::size_t(i)]);
    }
    AbelKernel k(beta, nodes);
    return k.apply(vals, nodes.size() - 1);
}

/// Half-line transform int_0^inf e^{-i xi x} q0(x) dx.
inline cplx half_line_transform(const InitialData& q0, cplx xi) {
    switch (q0.kind()) {
    case InitialData::Kind::Zero: return 0.0;
    case InitialData::Kind::Exponential: return -I / (xi - q0.k());
    default: break;
    }
    if (q0.has_transform_hint()) return (*q0.transform_hint())(xi);
    // truncation: grow X until the integrand is negligible relative to its peak
    double peak = 0.0;
    for (int i = 0; i <= 64; ++i) peak = std::max(peak, std::abs(q0.value(i / 16.0)));
    if (peak == 0.0) return 0.0;
    double X = 4.0;
    auto integrand = [&](double x) { return std::exp(-I * xi * x) * q0.value(x); };
    while (std::abs(integrand(X)) > 1e-12 * peak || std::abs(integrand(0.5 * X)) > 1e-10 * peak) {
        X *= 2.0;
        if (X > 4096.0) throw ConvergenceError("half_line_transform: initial data does not decay");
    }
    double err = 0.0;
    cplx total = 0.0;
    // split into unit-ish panels so oscillation does not defeat the rule
    const int pieces = int(std::ceil(X / 2.0));
    for (int p = 0; p < pieces; ++p) {
        double e = 0.0;
        total += quad::integrate_gk(integrand, 2.0 * p, std::min(X, 2.0 * (p + 1)), 1e-13, &e);
        err += e;
    }
    if (err > 1e-8 * std::max(1.0, std::abs(total))) throw ConvergenceError("half_line_transform: quadrature error too large");
    return total;
}

} // namespace dnmap
