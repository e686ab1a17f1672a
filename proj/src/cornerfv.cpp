#include "rfv/cornerfv.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace rfv {

CornerFvSetup make_cornerfv_setup(PolyMesh mesh) {
    CornerFvSetup s;
    s.mesh = std::move(mesh);
    if (s.mesh.node_cells.size() != s.mesh.vertices.size()) s.mesh.finalize();
    s.geometry = corner_geometry(s.mesh);
    const auto faces = node_faces(s.mesh);
    s.fans.resize(s.mesh.num_vertices());
    for (int p = 0; p < s.mesh.num_vertices(); ++p) {
        NodeFan& fan = s.fans[p];
        fan.corners = s.mesh.node_cells[p];
        Vec2 sum = Vec2::Zero();
        for (const auto& [c, k] : fan.corners) {
            fan.ln.push_back(s.geometry.corners[c][k].ln);
            sum += fan.ln.back();
        }
        fan.boundary = std::any_of(faces[p].begin(), faces[p].end(), [](const NodeFace& f) { return f.boundary(); });
        if (fan.boundary) fan.ln.push_back(-sum);
    }
    s.volume.resize(s.mesh.num_cells());
    for (int c = 0; c < s.mesh.num_cells(); ++c) s.volume[c] = s.mesh.volume(c);
    return s;
}

NodeFluxes dissipative_corner_flux(const std::vector<Vec4>& u, const std::vector<Vec2>& ln, const IdealGasEos& eos) {
    const std::size_t n = u.size();
    if (n == 0 || ln.size() != n) throw ArgumentError("dissipative_corner_flux: one normal per state");
    Vec4 fx = Vec4::Zero(), fy = Vec4::Zero(), mean = Vec4::Zero();
    double speed = 0.0, lmax = 0.0;
    for (std::size_t c = 0; c < n; ++c) {
        fx += euler_flux(u[c], Vec2(1.0, 0.0), eos);
        fy += euler_flux(u[c], Vec2(0.0, 1.0), eos);
        mean += u[c];
        const double l = ln[c].norm();
        lmax = std::max(lmax, l);
        if (l > 0.0) speed = std::max(speed, euler_max_speed(u[c], ln[c] / l, eos));
    }
    const double inv = 1.0 / static_cast<double>(n);
    fx *= inv;
    fy *= inv;
    mean *= inv;
    NodeFluxes out;
    out.alpha = speed * lmax;
    out.lf.resize(n);
    for (std::size_t c = 0; c < n; ++c) out.lf[c] = ln[c].x() * fx + ln[c].y() * fy + out.alpha * (u[c] - mean);
    return out;
}

CornerResiduals corner_residuals(int node, const std::vector<Vec4>& u, const std::vector<Vec2>& ln,
                                 const std::vector<Vec4>& lf, const IdealGasEos& eos) {
    Vec4 sum = Vec4::Zero();
    double scale = 0.0;
    for (const Vec4& v : lf) {
        sum += v;
        scale += v.cwiseAbs().sum();
    }
    const double defect = sum.norm();
    if (defect > 1e-10 * std::max(1.0, scale)) {
        std::ostringstream msg;
        msg << "node " << node << " violates corner flux conservation (defect " << defect << ")";
        throw ConservationError(msg.str(), defect);
    }
    CornerResiduals r;
    r.phi.resize(u.size());
    r.total = Vec4::Zero();
    for (std::size_t c = 0; c < u.size(); ++c) {
        const Vec4 f = euler_flux(u[c], ln[c], eos);
        r.phi[c] = lf[c] - f;
        r.total -= f;
    }
    return r;
}

std::vector<Vec4> fan_states(const NodeFan& fan, const std::vector<Vec4>& u, CornerBc bc) {
    std::vector<Vec4> s;
    s.reserve(fan.ln.size());
    Vec4 mean = Vec4::Zero();
    for (const auto& [c, k] : fan.corners) {
        s.push_back(u[c]);
        mean += u[c];
    }
    if (fan.boundary) {
        mean /= static_cast<double>(fan.corners.size());
        const Vec2 g = fan.ln.back();
        if (bc == CornerBc::wall && g.norm() > 0.0) {
            const Vec2 nh = g / g.norm();
            const Vec2 m(mean(1), mean(2));
            const Vec2 r = m - 2.0 * m.dot(nh) * nh;
            mean(1) = r.x();
            mean(2) = r.y();
        }
        s.push_back(mean);
    }
    return s;
}

namespace {

void check_cell(int c, const Vec4& s) {
    const double rho = s(0);
    const double eps = rho > 0.0 ? (s(3) - 0.5 * (s(1) * s(1) + s(2) * s(2)) / rho) / rho : 0.0;
    if (!(rho > 0.0) || !(eps > 0.0)) {
        std::ostringstream msg;
        msg << "cell " << c << " left the admissible set (rho=" << rho << ", eps=" << eps << ")";
        throw DomainError(msg.str());
    }
}

}  // namespace

double cornerfv_stable_dt(const CornerFvSetup& s, const std::vector<Vec4>& u, CornerBc bc, const IdealGasEos& eos,
                          double cfl) {
    std::vector<double> sum(s.mesh.num_cells(), 0.0);
    for (const NodeFan& fan : s.fans) {
        const double alpha = dissipative_corner_flux(fan_states(fan, u, bc), fan.ln, eos).alpha;
        for (const auto& [c, k] : fan.corners) sum[c] += alpha;
    }
    double dt = std::numeric_limits<double>::infinity();
    for (int c = 0; c < s.mesh.num_cells(); ++c) {
        if (sum[c] > 0.0) dt = std::min(dt, s.volume[c] / sum[c]);
    }
    return cfl * dt;
}

std::vector<Vec4> cornerfv_step(const CornerFvSetup& s, const std::vector<Vec4>& u, double dt, CornerBc bc,
                                const IdealGasEos& eos, CornerPath path, Exec exec, bool entropy_fix,
                                CornerStepInfo* info) {
    const int nc = s.mesh.num_cells(), np = s.mesh.num_vertices();
    if (static_cast<int>(u.size()) != nc) throw ArgumentError("one state per cell is required");
    for (int c = 0; c < nc; ++c) check_cell(c, u[c]);

    // Phase 1: per-node values stored in corner slots.
    std::vector<std::vector<Vec4>> slot(nc);
    for (int c = 0; c < nc; ++c) slot[c].assign(s.mesh.cells[c].size(), Vec4::Zero());
    const bool report = entropy_fix || info;
    std::vector<NodeEntropyReport> reports(report ? np : 0);
    auto node_values = [&](int p) {
        const NodeFan& fan = s.fans[p];
        const std::vector<Vec4> us = fan_states(fan, u, bc);
        NodeFluxes nf = dissipative_corner_flux(us, fan.ln, eos);
        std::vector<Vec4> out = nf.lf;
        if (report || path == CornerPath::residual) {
            CornerResiduals r = corner_residuals(p, us, fan.ln, nf.lf, eos);
            if (report) {
                const double g = node_entropy_flux(us, fan.ln, eos, EntropyForm::eulerian);
                reports[p] = entropy_fix ? entropy_correct(us, r.phi, g, eos, EntropyForm::eulerian)
                                         : node_entropy_defect(us, r.phi, g, eos, EntropyForm::eulerian);
                reports[p].node = p;
            }
            for (std::size_t i = 0; i < us.size(); ++i) {
                out[i] = path == CornerPath::residual ? r.phi[i] : Vec4(r.phi[i] + euler_flux(us[i], fan.ln[i], eos));
            }
        }
        return out;
    };

    std::vector<Vec4> acc(nc, Vec4::Zero());
    if (exec == Exec::serial) {
        for (int p = 0; p < np; ++p) {
            const std::vector<Vec4> v = node_values(p);
            for (std::size_t i = 0; i < s.fans[p].corners.size(); ++i) acc[s.fans[p].corners[i].first] += v[i];
        }
    } else {
#pragma omp parallel for schedule(dynamic, 64)
        for (int p = 0; p < np; ++p) {
            const std::vector<Vec4> v = node_values(p);
            for (std::size_t i = 0; i < s.fans[p].corners.size(); ++i) {
                const auto& [c, k] = s.fans[p].corners[i];
                slot[c][k] = v[i];
            }
        }
#pragma omp parallel for schedule(static)
        for (int c = 0; c < nc; ++c) {
            for (const Vec4& v : slot[c]) acc[c] += v;
        }
    }

    std::vector<Vec4> out(nc);
    for (int c = 0; c < nc; ++c) {
        out[c] = u[c] - dt / s.volume[c] * acc[c];
        check_cell(c, out[c]);
    }
    if (info) info->entropy = std::move(reports);
    return out;
}

Vec4 cornerfv_total(const CornerFvSetup& s, const std::vector<Vec4>& u) {
    Vec4 t = Vec4::Zero();
    for (int c = 0; c < s.mesh.num_cells(); ++c) t += s.volume[c] * u[c];
    return t;
}

}  // namespace rfv
