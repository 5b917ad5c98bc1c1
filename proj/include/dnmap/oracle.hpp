#pragma once

#include <Eigen/Sparse>

#include <cmath>
#include <functional>
#include <vector>

#include "alternant.hpp"
#include "core.hpp"
#include "problem.hpp"

namespace dnmap {

/// q(t, x) = e^{ikx - omega(k) t}, Im k > 0.
class ExponentialSolution {
public:
    ExponentialSolution(DispersionPolynomial d, cplx k) : d_(std::move(d)), k_(k) {
        if (!(k.imag() > 0.0)) throw DomainError("exponential solution: need Im k > 0");
        w_ = d_(k_);
    }

    const DispersionPolynomial& dispersion() const { return d_; }
    cplx k() const { return k_; }
    cplx omega_k() const { return w_; }

    cplx value(double t, double x) const { return std::exp(I * k_ * x - w_ * t); }
    /// d^m q(t, 0)
    cplx boundary(int m, double t) const { return std::pow(I * k_, m) * std::exp(-w_ * t); }
    /// int_0^inf e^{-i xi x} q(t, x) dx, Im xi <= 0
    cplx transform(cplx xi, double t) const { return -I / (xi - k_) * std::exp(-w_ * t); }
    cplx initial_transform(cplx xi) const { return -I / (xi - k_); }

    /// q_t + omega(-i d_x) q, evaluated term by term from the derivatives.
    cplx pde_residual(double t, double x) const {
        cplx lhs = -w_ * value(t, x);
        for (int j = 0; j <= d_.degree(); ++j) lhs += d_.coeff(j) * std::pow(-I, j) * std::pow(I * k_, j) * value(t, x);
        return lhs;
    }

private:
    DispersionPolynomial d_;
    cplx k_;
    cplx w_;
};

/// Problem whose unknown boundary values are (ik)^v e^{-omega(k) t}.
struct ExponentialProblem {
    BoundaryValueProblem problem;
    ExponentialSolution solution;

    cplx expected(int v, double t) const { return solution.boundary(v, t); }
};

inline ExponentialProblem exponential_problem(const DispersionPolynomial& d, cplx k, const std::vector<int>& U, double T = 1.0) {
    ExponentialSolution sol(d, k);
    BoundaryValueProblem p;
    p.dispersion = d;
    p.given_orders = U;
    p.horizon = T;
    const cplx w = sol.omega_k();
    for (int u : U) {
        const cplx c = std::pow(I * k, u);
        p.boundary_signals.push_back(Signal::closed_form([=](double t) { return c * std::exp(-w * t); },
                                                         Signal::Fn([=](double t) { return -w * c * std::exp(-w * t); }), T));
    }
    p.initial = InitialData::exponential(k);
    return {std::move(p), std::move(sol)};
}

namespace detail {

inline cplx simpson_step(const std::function<cplx(double)>& f, double a, double b, cplx fa, cplx fm, cplx fb, cplx whole, double tol,
                         int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const cplx flm = f(lm), frm = f(rm);
    const cplx left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const cplx right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const cplx diff = left + right - whole;
    if (depth <= 0 || std::abs(diff) <= 15.0 * tol) return left + right + diff / 15.0;
    return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

} // namespace detail

/// Adaptive Simpson with Richardson correction.
inline cplx adaptive_simpson(const std::function<cplx(double)>& f, double a, double b, double tol = 1e-12, int max_depth = 40) {
    if (a == b) return 0.0;
    const cplx fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const cplx whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return detail::simpson_step(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

/// e^{omega t} qhat(t, xi) - qhat0(xi) + sum_m c_m(xi) int_0^t e^{omega tau} d^m q(tau, 0) dtau.
inline cplx global_relation_residual(const ExponentialSolution& sol, cplx xi, double t) {
    const auto& d = sol.dispersion();
    const int n = d.degree();
    const cplx w = d(xi);
    cplx r = std::exp(w * t) * sol.transform(xi, t) - sol.initial_transform(xi);
    const double scale = std::max(1.0, std::abs(r) + std::abs(sol.initial_transform(xi)));
    for (int m = 0; m < n; ++m) {
        const auto f = [&](double tau) { return std::exp(w * tau) * sol.boundary(m, tau); };
        r += flux_coefficient(d, m, xi) * adaptive_simpson(f, 0.0, t, 1e-14 * scale);
    }
    return r;
}

/// Neumann trace of the Dirichlet heat problem on [0, X] with q(t, X) = 0.
struct HeatReference {
    std::vector<double> times;
    std::vector<double> neumann; ///< q_x(t, 0)
    double far_field = 0.0;      ///< max_t |q(t, X/2)|
};

/// Crank-Nicolson for q_t = q_xx, q(0, x) = 0, q(t, 0) = g(t). Real part of g.
inline HeatReference heat_reference_solver(const Signal& g, double T, double X, int nx, int nt) {
    if (nx < 4 || nt < 1 || !(X > 0.0) || !(T > 0.0)) throw DomainError("heat reference: bad grid");
    if (std::abs(g.value(0.0)) > 1e-12) throw DomainError("heat reference: need g(0) = 0 for zero initial data");
    const double dx = X / nx, dt = T / nt;
    const double r = dt / (dx * dx);
    const int m = nx - 1; // interior unknowns
    using SpMat = Eigen::SparseMatrix<double>;
    SpMat A(m, m);
    std::vector<Eigen::Triplet<double>> trip;
    for (int i = 0; i < m; ++i) {
        trip.emplace_back(i, i, 1.0 + r);
        if (i > 0) trip.emplace_back(i, i - 1, -0.5 * r);
        if (i + 1 < m) trip.emplace_back(i, i + 1, -0.5 * r);
    }
    A.setFromTriplets(trip.begin(), trip.end());
    Eigen::SimplicialLDLT<SpMat> solver(A);
    if (solver.info() != Eigen::Success) throw ConvergenceError("heat reference: factorisation failed");

    Eigen::VectorXd q = Eigen::VectorXd::Zero(m), rhs(m);
    HeatReference out;
    out.times.push_back(0.0);
    out.neumann.push_back(0.0);
    const int half = nx / 2 - 1;
    double g_old = g.value(0.0).real();
    double g_max = 0.0;
    for (int s = 1; s <= nt; ++s) {
        const double t = s == nt ? T : s * dt;
        const double g_new = g.value(t).real();
        g_max = std::max(g_max, std::abs(g_new));
        for (int i = 0; i < m; ++i) {
            const double left = i > 0 ? q(i - 1) : g_old;
            const double right = i + 1 < m ? q(i + 1) : 0.0;
            rhs(i) = (1.0 - r) * q(i) + 0.5 * r * (left + right);
        }
        rhs(0) += 0.5 * r * g_new;
        q = solver.solve(rhs);
        g_old = g_new;
        out.times.push_back(t);
        out.neumann.push_back((-3.0 * g_new + 4.0 * q(0) - q(1)) / (2.0 * dx));
        out.far_field = std::max(out.far_field, std::abs(q(half)));
    }
    // the far boundary must not be felt: the midpoint stays quiet relative to the data
    if (out.far_field > 1e-5 * std::max(1.0, g_max))
        throw DomainError("heat reference: domain too short (|q(t, X/2)| = " + std::to_string(out.far_field) + "); increase X");
    return out;
}

} // namespace dnmap
