#pragma once

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "core.hpp"
#include "poly.hpp"

namespace dnmap {

/// Symbol omega(xi) = a_0 + a_1 xi + ... + a_n xi^n of q_t + omega(-i d_x) q = 0.
class DispersionPolynomial {
public:
    DispersionPolynomial() = default;
    explicit DispersionPolynomial(cvec coeffs) : a_(std::move(coeffs)) {
        if (a_.empty()) throw ValidationError("dispersion: empty coefficient list");
        dera_ = poly::derivative(a_);
    }

    int degree() const { return int(a_.size()) - 1; }
    const cvec& coeffs() const { return a_; }
    cplx coeff(int j) const { return a_[std::size_t(j)]; }
    cplx leading() const { return a_.back(); }

    cplx operator()(cplx xi) const { return poly::eval(a_, xi); }
    cplx derivative(cplx xi) const { return poly::eval(dera_, xi); }
    const cvec& derivative_coeffs() const { return dera_; }

    /// True when a_j = 0 for all j < n.
    bool is_monomial() const {
        for (int j = 0; j < degree(); ++j)
            if (a_[std::size_t(j)] != cplx(0.0)) return false;
        return true;
    }

    /// Sum of |a_j| over j < n.
    double lower_norm() const {
        double s = 0.0;
        for (int j = 0; j < degree(); ++j) s += std::abs(a_[std::size_t(j)]);
        return s;
    }

private:
    cvec a_;
    cvec dera_;
};

/// Result of rescaling x -> s*x so that |a_n| = 1.
struct RescaledDispersion {
    DispersionPolynomial dispersion;
    double scale; ///< s; the new symbol is omega(xi / s)
};

/// Substitutes xi -> xi / s with s = |a_n|^{1/n}; the rescaled PDE lives on
/// x' = s x.
inline RescaledDispersion rescale_to_unit_leading(const DispersionPolynomial& d) {
    const int n = d.degree();
    if (n < 1 || d.leading() == cplx(0.0)) throw ValidationError("rescale: zero leading coefficient");
    const double s = std::pow(std::abs(d.leading()), 1.0 / n);
    cvec c = d.coeffs();
    for (int j = 0; j <= n; ++j) c[std::size_t(j)] /= std::pow(s, j);
    return {DispersionPolynomial(c), s};
}

/// Boundary signal on [0, T]: either closed form (with optional analytic
/// derivative) or uniform samples.
class Signal {
public:
    using Fn = std::function<cplx(double)>;

    static Signal closed_form(Fn f, std::optional<Fn> df, double horizon) {
        Signal s;
        s.f_ = std::move(f);
        s.df_ = std::move(df);
        s.T_ = horizon;
        return s;
    }

    /// Samples at t = 0, dt, 2dt, ...; at least 3 nodes.
    static Signal samples(const cvec& values, double dt) {
        if (values.size() < 3) throw ValidationError("signal: sampled form needs at least 3 nodes");
        if (!(dt > 0.0)) throw ValidationError("signal: dt must be positive");
        Signal s;
        s.samples_ = std::make_shared<Sampled>(values, dt);
        s.T_ = dt * double(values.size() - 1);
        return s;
    }

    double horizon() const { return T_; }
    bool is_sampled() const { return bool(samples_); }
    bool has_analytic_derivative() const { return df_.has_value(); }

    cplx value(double t) const {
        check(t);
        if (samples_) return samples_->value(t);
        return f_(t);
    }

    /// Analytic derivative when supplied; spline derivative for samples;
    /// centered difference otherwise.
    cplx derivative(double t) const {
        check(t);
        if (samples_) return samples_->derivative(t);
        if (df_) return (*df_)(t);
        const double h = 1e-5 * std::max(1.0, T_);
        const double a = std::max(0.0, t - h), b = std::min(T_, t + h);
        return (f_(b) - f_(a)) / (b - a);
    }

private:
    struct Sampled {
        using Spline = boost::math::interpolators::cardinal_cubic_b_spline<double>;
        double dt;
        double end;
        std::unique_ptr<Spline> re, im;

        Sampled(const cvec& v, double step) : dt(step), end(step * double(v.size() - 1)) {
            std::vector<double> r(v.size()), i(v.size());
            for (std::size_t k = 0; k < v.size(); ++k) {
                r[k] = v[k].real();
                i[k] = v[k].imag();
            }
            re = make(r);
            im = make(i);
        }
        std::unique_ptr<Spline> make(const std::vector<double>& y) const {
            const std::size_t m = y.size() - 1;
            // one-sided quadratic slopes at the ends
            const double left = (-3.0 * y[0] + 4.0 * y[1] - y[2]) / (2.0 * dt);
            const double right = (3.0 * y[m] - 4.0 * y[m - 1] + y[m - 2]) / (2.0 * dt);
            return std::make_unique<Spline>(y.data(), y.size(), 0.0, dt, left, right);
        }
        cplx value(double t) const { return {(*re)(t), (*im)(t)}; }
        cplx derivative(double t) const { return {re->prime(t), im->prime(t)}; }
    };

    void check(double t) const {
        const double tol = 1e-12 * std::max(1.0, T_);
        if (t < -tol || t > T_ + tol)
            throw DomainError("signal: t = " + std::to_string(t) + " outside [0, " + std::to_string(T_) + "]");
    }

    Fn f_;
    std::optional<Fn> df_;
    std::shared_ptr<const Sampled> samples_;
    double T_ = 0.0;
};

/// q0(x) = q(0, x).
class InitialData {
public:
    enum class Kind { Zero, Exponential, Callable };
    using Fn = std::function<cplx(double)>;
    using Transform = std::function<cplx(cplx)>;

    static InitialData zero() { return InitialData(); }

    /// q0 = e^{ikx}, Im k > 0.
    static InitialData exponential(cplx k) {
        InitialData q;
        q.kind_ = Kind::Exponential;
        q.k_ = k;
        return q;
    }

    /// Decaying callable; `transform_hint` is the closed-form half-line
    /// transform, needed wherever the transform is evaluated off the real axis.
    static InitialData callable(Fn f, std::optional<Transform> transform_hint = std::nullopt) {
        InitialData q;
        q.kind_ = Kind::Callable;
        q.f_ = std::move(f);
        q.hint_ = std::move(transform_hint);
        return q;
    }

    Kind kind() const { return kind_; }
    cplx k() const { return k_; }
    bool has_transform_hint() const { return hint_.has_value(); }
    const std::optional<Transform>& transform_hint() const { return hint_; }

    cplx value(double x) const {
        switch (kind_) {
        case Kind::Zero: return 0.0;
        case Kind::Exponential: return std::exp(I * k_ * x);
        default: return f_(x);
        }
    }

    /// d^m q0 / dx^m at x = 0 where available in closed form; callables use
    /// one-sided differences up to m = 2.
    cplx derivative_at_origin(int m) const {
        switch (kind_) {
        case Kind::Zero: return 0.0;
        case Kind::Exponential: return std::pow(I * k_, m);
        default: {
            if (m == 0) return f_(0.0);
            const double h = 1e-4;
            if (m == 1) return (-3.0 * f_(0) + 4.0 * f_(h) - f_(2 * h)) / (2 * h);
            if (m == 2) return (2.0 * f_(0) - 5.0 * f_(h) + 4.0 * f_(2 * h) - f_(3 * h)) / (h * h);
            throw DomainError("initial data: derivative order > 2 of a callable is not available");
        }
        }
    }

private:
    Kind kind_ = Kind::Zero;
    cplx k_{0.0, 0.0};
    Fn f_;
    std::optional<Transform> hint_;
};

/// Half-line problem with prescribed d^{u_l} q(t, 0) = g_l(t), u_l in U.
struct BoundaryValueProblem {
    DispersionPolynomial dispersion;
    std::vector<int> given_orders;   ///< U, sorted
    std::vector<Signal> boundary_signals; ///< one per element of U
    InitialData initial;
    double horizon = 1.0;            ///< T

    /// V: complement of U in {0..n-1}.
    std::vector<int> unknown_orders() const {
        std::vector<int> v;
        for (int m = 0; m < dispersion.degree(); ++m)
            if (std::find(given_orders.begin(), given_orders.end(), m) == given_orders.end()) v.push_back(m);
        return v;
    }
};

struct Violation {
    std::string code;
    std::string message;
};

/// Number of unknown boundary values N (sectors of the principal domain in
/// the lower half-plane).
inline int count_unknowns(int n, cplx an) {
    if (n < 2) throw ValidationError("count_unknowns: degree must be at least 2");
    if (std::abs(std::abs(an) - 1.0) > 1e-12) throw ValidationError("count_unknowns: |a_n| must be 1");
    if (n % 2 == 0) {
        if (an.real() < -1e-12) throw ValidationError("count_unknowns: even degree requires Re a_n >= 0");
        return n / 2;
    }
    if (std::abs(an.real()) > 1e-12) throw ValidationError("count_unknowns: odd degree requires a_n = +i or -i");
    return an.imag() > 0 ? (n - 1) / 2 : (n + 1) / 2;
}

/// Every violated hypothesis; empty when valid.
inline std::vector<Violation> validate_problem(const BoundaryValueProblem& p, double compat_tol = 1e-8) {
    std::vector<Violation> out;
    const auto& d = p.dispersion;
    const int n = d.degree();
    if (n < 2) {
        out.push_back({"degree", "degree n must be at least 2"});
        return out;
    }
    const cplx an = d.leading();
    if (an == cplx(0.0)) {
        out.push_back({"leading_zero", "leading coefficient a_n is zero"});
        return out;
    }
    bool leading_ok = true;
    if (std::abs(std::abs(an) - 1.0) > 1e-12) {
        out.push_back({"leading_modulus", "|a_n| must equal 1 (see rescale_to_unit_leading)"});
        leading_ok = false;
    }
    if (n % 2 == 0 && an.real() < -1e-12) {
        out.push_back({"even_leading_sign", "even degree requires Re a_n >= 0"});
        leading_ok = false;
    }
    if (n % 2 == 1 && std::abs(an.real()) > 1e-12) {
        out.push_back({"odd_leading_real", "odd degree requires Re a_n = 0 (a_n = +i or -i)"});
        leading_ok = false;
    }
    const auto& U = p.given_orders;
    for (std::size_t i = 0; i < U.size(); ++i) {
        if (U[i] < 0 || U[i] > n - 1)
            out.push_back({"order_range", "given order " + std::to_string(U[i]) + " outside [0, n-1]"});
        if (i > 0 && U[i] <= U[i - 1]) out.push_back({"order_sorted", "given orders must be sorted and distinct"});
    }
    if (leading_ok) {
        const int N = count_unknowns(n, an);
        if (int(U.size()) != n - N)
            out.push_back({"given_count", "|U| = " + std::to_string(U.size()) + " but n - N = " + std::to_string(n - N)});
    }
    if (p.boundary_signals.size() != U.size())
        out.push_back({"signal_count", "one boundary signal per given order is required"});
    if (!(p.horizon > 0.0)) out.push_back({"horizon", "horizon T must be positive"});
    for (std::size_t l = 0; l < p.boundary_signals.size(); ++l) {
        if (p.boundary_signals[l].horizon() < p.horizon * (1.0 - 1e-12))
            out.push_back({"signal_domain", "boundary signal " + std::to_string(l) + " does not cover [0, T]"});
    }
    if (p.initial.kind() == InitialData::Kind::Exponential && !(p.initial.k().imag() > 0.0))
        out.push_back({"initial_decay", "exponential initial data needs Im k > 0"});
    // compatibility at the corner, enforced for the Dirichlet datum only
    for (std::size_t l = 0; l < U.size() && l < p.boundary_signals.size(); ++l) {
        if (U[l] != 0) continue;
        if (p.boundary_signals[l].horizon() <= 0.0) continue;
        const cplx q00 = p.initial.value(0.0);
        const cplx g0 = p.boundary_signals[l].value(0.0);
        if (std::abs(g0 - q00) > compat_tol * (1.0 + std::abs(q00)))
            out.push_back({"compatibility", "g(0) differs from q0(0)"});
    }
    return out;
}

/// Extra hypotheses of the general-symbol map: canonical U and n <= 5.
inline std::vector<Violation> validate_general(const BoundaryValueProblem& p) {
    std::vector<Violation> out;
    const int n = p.dispersion.degree();
    if (n > 5) out.push_back({"general_degree", "general symbols are supported for n <= 5"});
    for (std::size_t l = 0; l < p.given_orders.size(); ++l)
        if (p.given_orders[l] != int(l)) {
            out.push_back({"canonical", "general symbols require U = {0, ..., n-N-1}"});
            break;
        }
    return out;
}

/// Evaluation grid: uniform cells on [0, t_min] followed by `steps` uniform
/// cells on [t_min, T]. Output nodes are the last steps + 1.
struct TimeGrid {
    std::vector<double> nodes;
    std::size_t first_output = 0;

    static TimeGrid make(double T, double t_min, int steps) {
        if (!(T > 0.0) || !(t_min > 0.0) || !(t_min < T)) throw DomainError("time grid: need 0 < t_min < T");
        if (steps < 1) throw DomainError("time grid: steps must be positive");
        TimeGrid g;
        const double h = (T - t_min) / steps;
        const int pre = std::max(1, int(std::ceil(t_min / h - 1e-9)));
        for (int m = 0; m < pre; ++m) g.nodes.push_back(t_min * m / pre);
        g.first_output = g.nodes.size();
        for (int j = 0; j <= steps; ++j) g.nodes.push_back(j == steps ? T : t_min + h * j);
        return g;
    }

    std::size_t size() const { return nodes.size(); }
    std::size_t output_count() const { return nodes.size() - first_output; }
    double output_time(std::size_t j) const { return nodes[first_output + j]; }
};

/// Per-order, per-time breakdown of the assembled map (all multiplied out to
/// the final d^v q scale).
struct TermBreakdown {
    cplx q0_term{0.0};
    cplx pv_term{0.0};
    cplx residue_term{0.0};
    cplx origin_term{0.0};
};

struct DNMapResult {
    std::vector<int> orders;                 ///< V
    std::vector<double> times;               ///< output grid, strictly increasing, > 0
    std::vector<cvec> values;                ///< values[j][m] = d^{v_j} q(t_m, 0)
    std::vector<std::vector<TermBreakdown>> terms; ///< terms[j][m]
    std::vector<double> quad_error;          ///< per order, max over probe times
    std::vector<std::pair<std::string, double>> parameters; ///< resolved numerical choices
};

} // namespace dnmap
