#include "rfv/rd2d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace rfv {

RdScheme parse_rd_scheme(const std::string& name) {
    if (name == "n") return RdScheme::n;
    if (name == "lxf") return RdScheme::lxf;
    if (name == "limited") return RdScheme::limited;
    throw ConfigError("unknown residual distribution scheme '" + name + "' (expected n, lxf or limited)");
}

const char* to_string(RdScheme s) {
    switch (s) {
        case RdScheme::n: return "n";
        case RdScheme::lxf: return "lxf";
        case RdScheme::limited: return "limited";
    }
    return "?";
}

Res3<double> inflow_params(const TriMesh& mesh, int t, const Vec2& a) {
    const auto& n = mesh.normals[t];
    return {0.5 * a.dot(n[0]), 0.5 * a.dot(n[1]), 0.5 * a.dot(n[2])};
}

double total_residual(const Res3<double>& k, const Res3<double>& u) {
    return k[0] * u[0] + k[1] * u[1] + k[2] * u[2];
}

Vec4 total_residual(const std::array<Vec2, 3>& x, const Res3<Vec4>& u, const IdealGasEos& eos) {
    const double g = 0.5 / std::sqrt(3.0);
    Vec4 phi = Vec4::Zero();
    for (int k = 0; k < 3; ++k) {
        const int kb = (k + 1) % 3;
        const Vec2 n = cross_ez(x[kb] - x[k]);  // outward, scaled by the length
        for (double t : {0.5 - g, 0.5 + g}) {
            phi += 0.5 * euler_flux(Vec4((1.0 - t) * u[k] + t * u[kb]), n, eos);
        }
    }
    return phi;
}

Res3<double> n_scheme_scalar(const Res3<double>& k, const Res3<double>& u) {
    double sum_minus = 0.0, sum_minus_u = 0.0;
    for (int s = 0; s < 3; ++s) {
        const double km = std::min(k[s], 0.0);
        sum_minus += km;
        sum_minus_u += km * u[s];
    }
    if (sum_minus == 0.0) return {0.0, 0.0, 0.0};
    const double u_in = sum_minus_u / sum_minus;
    Res3<double> phi;
    for (int s = 0; s < 3; ++s) phi[s] = std::max(k[s], 0.0) * (u[s] - u_in);
    return phi;
}

std::array<std::array<double, 3>, 3> n_scheme_coefficients(const Res3<double>& k) {
    std::array<std::array<double, 3>, 3> c{};
    double sum_minus = 0.0;
    for (double v : k) sum_minus += std::min(v, 0.0);
    if (sum_minus == 0.0) return c;
    for (int s = 0; s < 3; ++s) {
        for (int r = 0; r < 3; ++r) {
            if (r != s) c[s][r] = std::max(k[s], 0.0) * std::min(k[r], 0.0) / sum_minus;
        }
    }
    return c;
}

Res3<Vec4> n_scheme_system(const std::array<Vec2, 3>& x, const std::array<Vec2, 3>& normals, const Res3<Vec4>& u,
                           const IdealGasEos& eos, bool* fallback) {
    const Vec4 phi = total_residual(x, u, eos);
    const Vec4 mean = (u[0] + u[1] + u[2]) / 3.0;
    std::array<Mat4, 3> kp;
    Mat4 sum = Mat4::Zero();
    Vec4 rhs = -phi;
    double alpha = 0.0;
    for (int s = 0; s < 3; ++s) {
        const auto es = euler_eigensystem(mean, 0.5 * normals[s], eos);
        kp[s] = es.plus();
        sum += kp[s];
        rhs += kp[s] * u[s];
        alpha = std::max(alpha, es.lambda.cwiseAbs().maxCoeff());
    }
    const Eigen::PartialPivLU<Mat4> lu(sum);
    if (fallback) *fallback = false;
    if (!(lu.rcond() > 1e-12)) {
        if (fallback) *fallback = true;
        return lxf_distribution(phi, u, alpha);
    }
    const Vec4 uc = lu.solve(rhs);
    Res3<Vec4> out;
    for (int s = 0; s < 3; ++s) out[s] = kp[s] * (u[s] - uc);
    // Solve error would leak into the conservation ledger; put it on the largest entry.
    const Vec4 defect = phi - (out[0] + out[1] + out[2]);
    int big = 0;
    for (int s = 1; s < 3; ++s) {
        if (out[s].norm() > out[big].norm()) big = s;
    }
    out[big] += defect;
    return out;
}

Res3<double> beta_coefficients(const Res3<double>& low, double phi) {
    if (phi == 0.0) return {0.0, 0.0, 0.0};
    Res3<double> b;
    double sum = 0.0;
    for (int s = 0; s < 3; ++s) {
        b[s] = std::max(0.0, low[s] / phi);
        sum += b[s];
    }
    // Roundoff can leave no positive ratio when phi is tiny.
    if (!(sum > 0.0)) return {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
    for (double& v : b) v /= sum;
    return b;
}

Res3<double> beta_limit(const Res3<double>& low, double phi) {
    const Res3<double> b = beta_coefficients(low, phi);
    return {b[0] * phi, b[1] * phi, b[2] * phi};
}

Res3<Vec4> beta_limit(const Res3<Vec4>& low, const Vec4& phi) {
    Res3<Vec4> out;
    for (int c = 0; c < 4; ++c) {
        const Res3<double> l = beta_limit({low[0](c), low[1](c), low[2](c)}, phi(c));
        for (int s = 0; s < 3; ++s) out[s](c) = l[s];
    }
    return out;
}

std::vector<std::vector<std::pair<int, int>>> vertex_triangles(const TriMesh& mesh) {
    std::vector<std::vector<std::pair<int, int>>> vt(mesh.num_vertices());
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        for (int k = 0; k < 3; ++k) vt[mesh.triangles[t][k]].emplace_back(t, k);
    }
    return vt;
}

namespace {

double element_alpha(const Res3<double>& k) {
    return std::max({std::abs(k[0]), std::abs(k[1]), std::abs(k[2])});
}

double element_alpha(const TriMesh& mesh, int t, const std::vector<Vec4>& u, const IdealGasEos& eos) {
    double alpha = 0.0;
    for (int s = 0; s < 3; ++s) {
        const Vec4& us = u[mesh.triangles[t][s]];
        for (int j = 0; j < 3; ++j) alpha = std::max(alpha, 0.5 * euler_max_speed(us, mesh.normals[t][j], eos));
    }
    return alpha;
}

double dt_from_node_sums(const TriMesh& mesh, const std::vector<double>& node_sum, double cfl) {
    double dt = std::numeric_limits<double>::infinity();
    for (int v = 0; v < mesh.num_vertices(); ++v) {
        if (node_sum[v] > 0.0) dt = std::min(dt, mesh.dual_area[v] / node_sum[v]);
    }
    return cfl * dt;
}

template <class V>
std::vector<V> apply_residuals(const TriMesh& mesh, const std::vector<V>& u, const std::vector<Res3<V>>& res,
                               double dt, Exec exec, const std::vector<char>* fixed) {
    const int nv = mesh.num_vertices();
    std::vector<V> acc(nv, V(u[0] * 0.0));
    if (exec == Exec::serial) {
        for (int t = 0; t < mesh.num_triangles(); ++t) {
            for (int k = 0; k < 3; ++k) acc[mesh.triangles[t][k]] += res[t][k];
        }
    } else {
        const auto vt = vertex_triangles(mesh);
#pragma omp parallel for schedule(static)
        for (int v = 0; v < nv; ++v) {
            for (const auto& [t, k] : vt[v]) acc[v] += res[t][k];
        }
    }
    std::vector<V> out(nv);
    const bool par = exec == Exec::parallel;
#pragma omp parallel for schedule(static) if (par)
    for (int v = 0; v < nv; ++v) {
        const bool hold = fixed && (*fixed)[v];
        out[v] = hold ? u[v] : V(u[v] - dt / mesh.dual_area[v] * acc[v]);
    }
    return out;
}

}  // namespace

double rd_stable_dt(const TriMesh& mesh, const Vec2& a, double cfl) {
    std::vector<double> sum(mesh.num_vertices(), 0.0);
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const double alpha = element_alpha(inflow_params(mesh, t, a));
        for (int k = 0; k < 3; ++k) sum[mesh.triangles[t][k]] += alpha;
    }
    return dt_from_node_sums(mesh, sum, cfl);
}

double rd_stable_dt(const TriMesh& mesh, const std::vector<Vec4>& u, const IdealGasEos& eos, double cfl) {
    std::vector<double> sum(mesh.num_vertices(), 0.0);
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const double alpha = element_alpha(mesh, t, u, eos);
        for (int k = 0; k < 3; ++k) sum[mesh.triangles[t][k]] += alpha;
    }
    return dt_from_node_sums(mesh, sum, cfl);
}

std::vector<Res3<double>> rd_residuals(const TriMesh& mesh, const Vec2& a, const std::vector<double>& u,
                                       RdScheme scheme, Exec exec) {
    const int nt = mesh.num_triangles();
    std::vector<Res3<double>> res(nt);
    const bool par = exec == Exec::parallel;
#pragma omp parallel for schedule(static) if (par)
    for (int t = 0; t < nt; ++t) {
        const auto& tri = mesh.triangles[t];
        const Res3<double> ut{u[tri[0]], u[tri[1]], u[tri[2]]};
        const Res3<double> k = inflow_params(mesh, t, a);
        const double phi = total_residual(k, ut);
        switch (scheme) {
            case RdScheme::n: res[t] = n_scheme_scalar(k, ut); break;
            case RdScheme::lxf: res[t] = lxf_distribution(phi, ut, element_alpha(k)); break;
            case RdScheme::limited: res[t] = beta_limit(n_scheme_scalar(k, ut), phi); break;
        }
    }
    return res;
}

std::vector<Res3<Vec4>> rd_residuals(const TriMesh& mesh, const std::vector<Vec4>& u, RdScheme scheme,
                                     const IdealGasEos& eos, Exec exec) {
    const int nt = mesh.num_triangles();
    std::vector<Res3<Vec4>> res(nt);
    const bool par = exec == Exec::parallel;
#pragma omp parallel for schedule(static) if (par)
    for (int t = 0; t < nt; ++t) {
        const auto& tri = mesh.triangles[t];
        const std::array<Vec2, 3> x{mesh.position(t, 0), mesh.position(t, 1), mesh.position(t, 2)};
        const Res3<Vec4> ut{u[tri[0]], u[tri[1]], u[tri[2]]};
        if (scheme == RdScheme::n) {
            res[t] = n_scheme_system(x, mesh.normals[t], ut, eos);
        } else {
            const Vec4 phi = total_residual(x, ut, eos);
            const Res3<Vec4> low = lxf_distribution(phi, ut, element_alpha(mesh, t, u, eos));
            res[t] = scheme == RdScheme::lxf ? low : beta_limit(low, phi);
        }
    }
    return res;
}

std::vector<double> rd_step(const TriMesh& mesh, const Vec2& a, const std::vector<double>& u, double dt,
                            RdScheme scheme, Exec exec, const std::vector<char>* fixed) {
    if (static_cast<int>(u.size()) != mesh.num_vertices()) throw ArgumentError("one value per vertex is required");
    return apply_residuals(mesh, u, rd_residuals(mesh, a, u, scheme, exec), dt, exec, fixed);
}

std::vector<Vec4> rd_step(const TriMesh& mesh, const std::vector<Vec4>& u, double dt, RdScheme scheme,
                          const IdealGasEos& eos, Exec exec) {
    if (static_cast<int>(u.size()) != mesh.num_vertices()) throw ArgumentError("one state per vertex is required");
    std::vector<Vec4> out = apply_residuals(mesh, u, rd_residuals(mesh, u, scheme, eos, exec), dt, exec, nullptr);
    for (int v = 0; v < mesh.num_vertices(); ++v) {
        const Vec4& s = out[v];
        const double rho = s(0);
        const double eps = rho > 0.0 ? (s(3) - 0.5 * (s(1) * s(1) + s(2) * s(2)) / rho) / rho : 0.0;
        if (!(rho > 0.0) || !(eps > 0.0)) {
            std::ostringstream msg;
            msg << "vertex " << v << " left the admissible set (rho=" << rho << ", eps=" << eps << ")";
            throw DomainError(msg.str());
        }
    }
    return out;
}

double rd_total(const TriMesh& mesh, const std::vector<double>& u) {
    double s = 0.0;
    for (int v = 0; v < mesh.num_vertices(); ++v) s += mesh.dual_area[v] * u[v];
    return s;
}

Vec4 rd_total(const TriMesh& mesh, const std::vector<Vec4>& u) {
    Vec4 s = Vec4::Zero();
    for (int v = 0; v < mesh.num_vertices(); ++v) s += mesh.dual_area[v] * u[v];
    return s;
}

}  // namespace rfv
