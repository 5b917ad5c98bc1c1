#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/Polynomials>

#include <algorithm>
#include <cmath>

#include "core.hpp"

namespace dnmap::poly {

/// Horner evaluation; coefficients low-to-high.
inline cplx eval(const cvec& c, cplx x) {
    cplx r = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) r = r * x + *it;
    return r;
}

inline cvec derivative(const cvec& c) {
    if (c.size() <= 1) return {cplx(0.0)};
    cvec d(c.size() - 1);
    for (std::size_t i = 1; i < c.size(); ++i) d[i - 1] = c[i] * double(i);
    return d;
}

/// Value and derivative in one Horner pass.
inline void eval2(const cvec& c, cplx x, cplx& p, cplx& dp) {
    p = 0.0;
    dp = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) {
        dp = dp * x + p;
        p = p * x + *it;
    }
}

/// Divides p (low-to-high) by (z - r); remainder dropped.
inline cvec deflate(const cvec& p, cplx r) {
    const std::size_t n = p.size() - 1;
    cvec q(n);
    cplx acc = p[n];
    for (std::size_t i = n; i-- > 0;) {
        q[i] = acc;
        acc = p[i] + acc * r;
    }
    return q;
}

/// Largest |coefficient|, used as residual scale.
inline double scale(const cvec& c) {
    double s = 0.0;
    for (auto& a : c) s = std::max(s, std::abs(a));
    return s;
}

/// All roots of p (low-to-high), balanced companion eigenvalues followed by at
/// most five Newton steps each. Output sorted by (re, im) for reproducibility.
inline cvec roots(const cvec& p) {
    std::size_t deg = p.size() - 1;
    while (deg > 0 && p[deg] == cplx(0.0)) --deg;
    if (deg == 0) throw StructuralError("roots: degenerate leading coefficient");
    cvec r;
    if (deg == 1) {
        r.push_back(-p[0] / p[1]);
        return r;
    }
    if (deg == 2) {
        cplx a = p[2], b = p[1], c = p[0];
        cplx s = std::sqrt(b * b - 4.0 * a * c);
        cplx q = -0.5 * (b + (std::real(std::conj(b) * s) >= 0 ? s : -s));
        if (q == cplx(0.0)) {
            r = {cplx(0.0), cplx(0.0)};
        } else {
            r = {q / a, c / q};
        }
    } else {
        Eigen::Matrix<cplx, Eigen::Dynamic, 1> coeffs(deg + 1);
        for (std::size_t i = 0; i <= deg; ++i) coeffs[Eigen::Index(i)] = p[i];
        Eigen::PolynomialSolver<cplx, Eigen::Dynamic> solver(coeffs);
        const auto& rr = solver.roots();
        for (Eigen::Index i = 0; i < rr.size(); ++i) r.push_back(rr[i]);
    }
    cvec pp(p.begin(), p.begin() + long(deg + 1));
    for (auto& z : r) {
        for (int it = 0; it < 5; ++it) {
            cplx f, df;
            eval2(pp, z, f, df);
            if (f == cplx(0.0) || df == cplx(0.0)) break;
            cplx step = f / df;
            cplx zn = z - step;
            cplx fn, dfn;
            eval2(pp, zn, fn, dfn);
            if (std::abs(fn) > std::abs(f)) break;
            z = zn;
            if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(z))) break;
        }
    }
    std::sort(r.begin(), r.end(), [](cplx a, cplx b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    return r;
}

} // namespace dnmap::poly
