#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <vector>

#include "core.hpp"
#include "geometry.hpp"
#include "problem.hpp"

namespace dnmap {

/// omega_m(xi) = sum_{i=0}^{m} a_{n-i} xi^{m-i}; no division by xi.
inline cplx tail_polynomial(const DispersionPolynomial& d, int m, cplx xi) {
    const int n = d.degree();
    if (m < 0 || m > n) throw DomainError("tail_polynomial: m outside [0, n]");
    cplx r = 0.0;
    for (int i = 0; i <= m; ++i) r = r * xi + d.coeff(n - i);
    return r;
}

/// c_m(xi) = i^{3m+1} omega_{n-m-1}(xi).
inline cplx flux_coefficient(const DispersionPolynomial& d, int m, cplx xi) {
    const int n = d.degree();
    if (m < 0 || m > n - 1) throw DomainError("flux_coefficient: m outside [0, n-1]");
    return ipow(3 * m + 1) * tail_polynomial(d, n - m - 1, xi);
}

using CMatrix = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic>;
using CVector = Eigen::Matrix<cplx, Eigen::Dynamic, 1>;

/// Alternant A_ij = omega_{n-v_j-1}(z_i) at one sample, with its inverse.
struct AlternantSystem {
    CMatrix A;
    CMatrix inverse;
    cplx det = 0.0;

    /// (-1)^{i+j} det A_ji / det A, i.e. (A^{-1})_{ji}; zero-based indices.
    cplx minor_quotient(std::size_t j, std::size_t i) const { return inverse(Eigen::Index(j), Eigen::Index(i)); }
};

inline AlternantSystem alternant_system(const DispersionPolynomial& d, const cvec& z, const std::vector<int>& V) {
    const int n = d.degree();
    const auto N = Eigen::Index(z.size());
    if (N != Eigen::Index(V.size())) throw StructuralError("alternant: branch count differs from |V|");
    AlternantSystem s;
    s.A.resize(N, N);
    for (Eigen::Index i = 0; i < N; ++i)
        for (Eigen::Index j = 0; j < N; ++j) s.A(i, j) = tail_polynomial(d, n - V[std::size_t(j)] - 1, z[std::size_t(i)]);
    Eigen::PartialPivLU<CMatrix> lu(s.A);
    s.det = lu.determinant();
    // Hadamard ratio over columns: invariant under the xi-scaling of each column
    double cols = 1.0;
    for (Eigen::Index j = 0; j < N; ++j) cols *= s.A.col(j).norm();
    if (!(std::abs(s.det) > 1e-12 * cols))
        throw StructuralError("alternant: matrix is near singular (sample too close to a root collision)");
    s.inverse = lu.inverse();
    return s;
}

/// Column-replacement quotients Q[j][l] = det A^{jl} / det A.
struct AlternantQuotients {
    AlternantSystem system;
    std::vector<cvec> Q; ///< Q[j][l]
};

inline AlternantQuotients alternant_quotients(const DispersionPolynomial& d, const cvec& z, const std::vector<int>& V,
                                              const std::vector<int>& U) {
    const int n = d.degree();
    AlternantQuotients out{alternant_system(d, z, V), {}};
    const auto N = Eigen::Index(z.size());
    out.Q.assign(V.size(), cvec(U.size()));
    for (std::size_t l = 0; l < U.size(); ++l) {
        CVector b(N);
        for (Eigen::Index i = 0; i < N; ++i) b(i) = tail_polynomial(d, n - U[l] - 1, z[std::size_t(i)]);
        const CVector x = out.system.inverse * b;
        for (std::size_t j = 0; j < V.size(); ++j) out.Q[j][l] = x(Eigen::Index(j));
    }
    return out;
}

/// Closed-form monomial quotients at z_i = rho^{i+n-N-k} xi with c =
/// rho^{n-N-k} xi:
///   Q_jl = c^{v_j-u_l} (det V^{jl}/det V)(rho),
///   (A^{-1})_{ji} = a_n^{-1} c^{-(n-v_j-1)} (V(rho)^{-1})_{ji}.
/// Returns the max relative deviation from the alternant evaluated directly.
inline double monomial_specialization_check(const DispersionPolynomial& d, int k, cplx xi, const std::vector<int>& V,
                                            const std::vector<int>& U) {
    if (!d.is_monomial()) throw ModeError("monomial_specialization_check: dispersion is not a monomial");
    const SectorDecomposition s = sector_decomposition(d);
    const int n = s.n, N = s.N;
    const cplx rho = polar1(2.0 * pi / n);
    cvec z(static_cast<std::size_t>(N));
    for (int i = 1; i <= N; ++i) z[std::size_t(i - 1)] = std::pow(rho, i + n - N - k) * xi;
    const AlternantQuotients aq = alternant_quotients(d, z, V, U);

    // Vandermonde pieces at rho
    CMatrix Vm(N, N);
    for (int i = 1; i <= N; ++i)
        for (int j = 0; j < N; ++j) Vm(i - 1, j) = std::pow(rho, i * (n - V[std::size_t(j)] - 1));
    const CMatrix Vinv = Vm.inverse();
    const cplx c = std::pow(rho, n - N - k) * xi;
    double dev = 0.0;
    auto rel = [](cplx a, cplx b) { return std::abs(a - b) / std::max(1e-300, std::max(std::abs(a), std::abs(b))); };
    for (int j = 0; j < N; ++j) {
        for (int i = 0; i < N; ++i) {
            const cplx closed = Vinv(j, i) / (d.leading() * std::pow(c, n - V[std::size_t(j)] - 1));
            dev = std::max(dev, rel(closed, aq.system.minor_quotient(std::size_t(j), std::size_t(i))));
        }
        for (std::size_t l = 0; l < U.size(); ++l) {
            CVector b(N);
            for (int i = 1; i <= N; ++i) b(i - 1) = std::pow(rho, i * (n - U[l] - 1));
            const cplx ratio = (Vinv * b)(j);
            const cplx closed = std::pow(c, V[std::size_t(j)] - U[l]) * ratio;
            dev = std::max(dev, rel(closed, aq.Q[std::size_t(j)][l]));
        }
    }
    return dev;
}

} // namespace dnmap
