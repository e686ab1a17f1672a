/// @file rd2d.hpp
/// @brief Residual distribution on P1 triangulations: scalar advection and
/// the 2D Euler system.
#pragma once

#include "rfv/mesh.hpp"
#include "rfv/physics.hpp"

#include <array>
#include <vector>

namespace rfv {

template <class V>
using Res3 = std::array<V, 3>;

enum class RdScheme { n, lxf, limited };

RdScheme parse_rd_scheme(const std::string& name);
const char* to_string(RdScheme s);

/// k_sigma = a.n_sigma / 2 with the scaled inward normals of triangle t.
Res3<double> inflow_params(const TriMesh& mesh, int t, const Vec2& a);

/// Phi^K = sum k_sigma u_sigma.
double total_residual(const Res3<double>& k, const Res3<double>& u);

/// Phi^K = oint f(u_h).n with two Gauss points per edge. x counterclockwise.
Vec4 total_residual(const std::array<Vec2, 3>& x, const Res3<Vec4>& u, const IdealGasEos& eos);

/// Phi_sigma = k+ (u_sigma - u_in), u_in = (sum k-)^{-1} sum k- u.
Res3<double> n_scheme_scalar(const Res3<double>& k, const Res3<double>& u);

/// Update coefficients of the scalar N scheme: Phi_sigma = sum_s' c(s,s') (u_s - u_s').
std::array<std::array<double, 3>, 3> n_scheme_coefficients(const Res3<double>& k);

/// System N scheme in the conservative form: K = A(u_mean, n)/2,
/// Phi_sigma = K+ (u_sigma - u_c) with u_c fixed by sum Phi_sigma = Phi^K.
/// Falls back to lxf_distribution when sum K+ is numerically singular;
/// `fallback` reports that.
Res3<Vec4> n_scheme_system(const std::array<Vec2, 3>& x, const std::array<Vec2, 3>& normals, const Res3<Vec4>& u,
                           const IdealGasEos& eos, bool* fallback = nullptr);

/// Phi_sigma = Phi/3 + alpha (u_sigma - u_mean).
template <class V>
Res3<V> lxf_distribution(const V& phi, const Res3<V>& u, double alpha) {
    const V mean = (u[0] + u[1] + u[2]) / 3.0;
    return {phi / 3.0 + alpha * (u[0] - mean), phi / 3.0 + alpha * (u[1] - mean), phi / 3.0 + alpha * (u[2] - mean)};
}

/// beta_sigma = max(0, Phi_L/Phi) / sum max(0, Phi_L/Phi); zero when Phi = 0,
/// 1/3 when no ratio is positive.
Res3<double> beta_coefficients(const Res3<double>& low, double phi);
Res3<double> beta_limit(const Res3<double>& low, double phi);
/// Componentwise.
Res3<Vec4> beta_limit(const Res3<Vec4>& low, const Vec4& phi);

/// Vertex -> (triangle, local index), triangles in increasing order.
std::vector<std::vector<std::pair<int, int>>> vertex_triangles(const TriMesh& mesh);

/// dt = cfl min_sigma |C_sigma| / sum_K k+_sigma.
double rd_stable_dt(const TriMesh& mesh, const Vec2& a, double cfl = 0.4);
/// Same with the largest signal speed of each element: alpha_K = max (|v.n| + a|n|)/2.
double rd_stable_dt(const TriMesh& mesh, const std::vector<Vec4>& u, const IdealGasEos& eos, double cfl = 0.4);

/// Element residuals of one step, one array per triangle.
std::vector<Res3<double>> rd_residuals(const TriMesh& mesh, const Vec2& a, const std::vector<double>& u,
                                       RdScheme scheme, Exec exec = Exec::parallel);
std::vector<Res3<Vec4>> rd_residuals(const TriMesh& mesh, const std::vector<Vec4>& u, RdScheme scheme,
                                     const IdealGasEos& eos, Exec exec = Exec::parallel);

/// u_sigma -= dt/|C_sigma| sum_K Phi_sigma^K. Vertices with fixed[sigma] != 0 are
/// left unchanged (strong Dirichlet). The serial path scatters element by
/// element; the parallel one gathers per vertex.
std::vector<double> rd_step(const TriMesh& mesh, const Vec2& a, const std::vector<double>& u, double dt,
                            RdScheme scheme, Exec exec = Exec::parallel, const std::vector<char>* fixed = nullptr);

/// Euler system. Throws DomainError naming the first out-of-domain vertex.
std::vector<Vec4> rd_step(const TriMesh& mesh, const std::vector<Vec4>& u, double dt, RdScheme scheme,
                          const IdealGasEos& eos, Exec exec = Exec::parallel);

/// sum_sigma |C_sigma| u_sigma.
double rd_total(const TriMesh& mesh, const std::vector<double>& u);
Vec4 rd_total(const TriMesh& mesh, const std::vector<Vec4>& u);

}  // namespace rfv
