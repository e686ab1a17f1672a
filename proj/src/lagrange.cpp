#include "rfv/lagrange.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

namespace rfv {

namespace {

struct Speeds {
    std::vector<double> l, r;
};

Speeds wave_speeds(const std::vector<HalfFace>& faces, const Vec2& v, const IdealGasEos& eos, double k) {
    Speeds s{std::vector<double>(faces.size()), std::vector<double>(faces.size())};
    for (std::size_t f = 0; f < faces.size(); ++f) {
        const HalfFace& h = faces[f];
        const LagState& right = h.wall ? h.left : h.right;
        positivity_wave_speeds(h.left, right, h.n, v.dot(h.n), eos, k, s.l[f], s.r[f]);
    }
    return s;
}

struct PressureCache {
    std::vector<double> l, r;
};

Vec2 solve_velocity(const std::vector<HalfFace>& faces, const Speeds& sp, const PressureCache& pc, double& cond) {
    Mat2 m = Mat2::Zero();
    Vec2 b = Vec2::Zero();
    std::vector<Vec2> walls;
    for (std::size_t f = 0; f < faces.size(); ++f) {
        const HalfFace& h = faces[f];
        if (h.wall) {
            walls.push_back(h.n);
            continue;
        }
        const double ll = sp.l[f], lr = sp.r[f];
        m += h.length * (ll + lr) * h.n * h.n.transpose();
        b += h.length * (ll * h.left.v.dot(h.n) + lr * h.right.v.dot(h.n) - (pc.r[f] - pc.l[f])) * h.n;
    }
    if (walls.empty()) {
        const Eigen::SelfAdjointEigenSolver<Mat2> es(m);
        const double lo = es.eigenvalues()(0), hi = es.eigenvalues()(1);
        cond = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
        if (!(lo > 1e-14 * hi)) {
            std::ostringstream msg;
            msg << "nodal matrix is singular (condition estimate " << cond << ")";
            throw SolverError(msg.str());
        }
        return m.ldlt().solve(b);
    }
    cond = 1.0;
    const Vec2 n0 = walls.front();
    for (const Vec2& w : walls) {
        if (std::abs(cross(n0, w)) > 1e-10) return Vec2::Zero();  // corner
    }
    const Vec2 t(-n0.y(), n0.x());
    const double tmt = t.dot(m * t);
    if (!(tmt > 0.0)) return Vec2::Zero();
    return t.dot(b) / tmt * t;
}

bool positivity_holds(const std::vector<HalfFace>& faces, const Speeds& sp, const Vec2& v, const IdealGasEos& eos) {
    const Speeds need = wave_speeds(faces, v, eos, 1.0);
    for (std::size_t f = 0; f < faces.size(); ++f) {
        if (sp.l[f] < need.l[f]) return false;
        if (!faces[f].wall && sp.r[f] < need.r[f]) return false;
    }
    return true;
}

}  // namespace

NodalSolution nodal_solver(const std::vector<HalfFace>& faces, const IdealGasEos& eos, double k, int max_refresh) {
    if (faces.empty()) throw ArgumentError("nodal_solver: node without faces");
    PressureCache pc{std::vector<double>(faces.size()), std::vector<double>(faces.size())};
    Vec2 v = Vec2::Zero();
    int count = 0;
    for (std::size_t f = 0; f < faces.size(); ++f) {
        const HalfFace& h = faces[f];
        pc.l[f] = pressure(h.left, eos);
        v += h.left.v;
        ++count;
        if (!h.wall) {
            pc.r[f] = pressure(h.right, eos);
            v += h.right.v;
            ++count;
        }
    }
    v /= count;

    NodalSolution s;
    Speeds sp = wave_speeds(faces, v, eos, k);
    v = solve_velocity(faces, sp, pc, s.cond);
    sp = wave_speeds(faces, v, eos, k);
    v = solve_velocity(faces, sp, pc, s.cond);
    s.refreshes = 1;
    while (!positivity_holds(faces, sp, v, eos) && s.refreshes < max_refresh) {
        const Speeds need = wave_speeds(faces, v, eos, k);
        for (std::size_t f = 0; f < faces.size(); ++f) {
            sp.l[f] = std::max(sp.l[f], need.l[f]);
            sp.r[f] = std::max(sp.r[f], need.r[f]);
        }
        v = solve_velocity(faces, sp, pc, s.cond);
        ++s.refreshes;
    }

    s.v = v;
    s.lambda_l = sp.l;
    s.lambda_r = sp.r;
    s.p_star_l.resize(faces.size());
    s.p_star_r.resize(faces.size());
    for (std::size_t f = 0; f < faces.size(); ++f) {
        const HalfFace& h = faces[f];
        const double vn = v.dot(h.n);
        s.p_star_l[f] = pc.l[f] - sp.l[f] * (vn - h.left.v.dot(h.n));
        s.p_star_r[f] = h.wall ? s.p_star_l[f] : pc.r[f] + sp.r[f] * (vn - h.right.v.dot(h.n));
    }
    return s;
}

double node_conservation_defect(const std::vector<HalfFace>& faces, const NodalSolution& s) {
    Vec2 sum = Vec2::Zero();
    for (std::size_t f = 0; f < faces.size(); ++f) {
        if (!faces[f].wall) sum += faces[f].length * (s.p_star_l[f] - s.p_star_r[f]) * faces[f].n;
    }
    return sum.norm();
}

Vec4 subface_flux(const Vec2& v_node, const Vec2& n, double p_star) {
    const double vn = v_node.dot(n);
    return Vec4(-vn, p_star * n.x(), p_star * n.y(), p_star * vn);
}

double discrete_divergence(const PolyMesh& mesh, const CornerGeometry& g, int c, const std::vector<Vec2>& q) {
    double s = 0.0;
    for (std::size_t k = 0; k < g.corners[c].size(); ++k) s += g.corners[c][k].ln.dot(q[mesh.cells[c][k]]);
    return s / mesh.volume(c);
}

GclConvention parse_gcl_convention(const std::string& name) {
    if (name == "current") return GclConvention::current;
    if (name == "midpoint") return GclConvention::midpoint;
    throw ConfigError("gcl_convention must be 'current' or 'midpoint', got '" + name + "'");
}

LagrangeSystem make_lagrange_system(PolyMesh mesh, std::vector<LagState> state) {
    if (mesh.node_cells.size() != mesh.vertices.size()) mesh.finalize();
    if (static_cast<int>(state.size()) != mesh.num_cells()) throw ArgumentError("one state per cell is required");
    LagrangeSystem sys;
    sys.mass.resize(state.size());
    for (int c = 0; c < mesh.num_cells(); ++c) {
        check_domain(state[c], ("cell " + std::to_string(c)).c_str());
        sys.mass[c] = mesh.volume(c) / state[c].tau;
    }
    sys.mesh = std::move(mesh);
    sys.state = std::move(state);
    return sys;
}

NodePhase lagrange_nodal_phase(const LagrangeSystem& sys, const IdealGasEos& eos, Exec exec) {
    const PolyMesh& mesh = sys.mesh;
    const CornerGeometry g = corner_geometry(mesh);
    const auto nf = node_faces(mesh);
    const int np = mesh.num_vertices();
    NodePhase ph;
    ph.v.assign(np, Vec2::Zero());
    ph.entries.assign(np, {});
    ph.faces.assign(np, {});
    ph.solutions.assign(np, {});
    ph.boundary.assign(np, 0);
    const bool par = exec == Exec::parallel;
    std::vector<std::string> errors(np);
#pragma omp parallel for schedule(dynamic, 64) if (par)
    for (int p = 0; p < np; ++p) {
        try {
            auto& faces = ph.faces[p];
            for (const NodeFace& f : nf[p]) {
                const Subface& sf = g.corners[f.cell][f.local].sub[f.side];
                HalfFace h{sys.state[f.cell], sys.state[f.cell], sf.normal, sf.length, f.boundary()};
                if (!h.wall) h.right = sys.state[f.nb_cell];
                ph.boundary[p] |= h.wall ? 1 : 0;
                faces.push_back(h);
            }
            const NodalSolution s = nodal_solver(faces, eos);
            ph.v[p] = s.v;
            for (std::size_t i = 0; i < nf[p].size(); ++i) {
                const NodeFace& f = nf[p][i];
                ph.entries[p].push_back({f.cell, f.local, f.side, faces[i].length, faces[i].n, s.lambda_l[i],
                                         s.p_star_l[i]});
                if (!f.boundary()) {
                    ph.entries[p].push_back({f.nb_cell, f.nb_local, f.nb_side, faces[i].length, -faces[i].n,
                                             s.lambda_r[i], s.p_star_r[i]});
                }
            }
            ph.solutions[p] = s;
        } catch (const Error& e) {
            errors[p] = "node " + std::to_string(p) + ": " + e.what();
        }
    }
    for (int p = 0; p < np; ++p) {
        if (!errors[p].empty()) throw SolverError(errors[p]);
    }
    return ph;
}

double lagrange_stable_dt(const LagrangeSystem& sys, const NodePhase& ph, double cfl) {
    std::vector<double> sum(sys.mesh.num_cells(), 0.0);
    for (const auto& node : ph.entries) {
        for (const SubfaceEntry& e : node) sum[e.cell] += e.length * e.lambda;
    }
    double dt = std::numeric_limits<double>::infinity();
    for (int c = 0; c < sys.mesh.num_cells(); ++c) {
        if (sum[c] > 0.0) dt = std::min(dt, sys.mass[c] / sum[c]);
    }
    return cfl * dt;
}

LagStepReport lagrange_step(LagrangeSystem& sys, double dt, const IdealGasEos& eos, Exec exec,
                            const NodePhase* given) {
    NodePhase local;
    if (!given) local = lagrange_nodal_phase(sys, eos, exec);
    const NodePhase& ph = given ? *given : local;
    const double bound = lagrange_stable_dt(sys, ph, 1.0);
    if (!(dt > 0.0) || dt > bound * (1.0 + 1e-12)) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "time step " << dt << " exceeds the positivity bound " << bound;
        throw TimeStepError(msg.str());
    }

    PolyMesh& mesh = sys.mesh;
    const int nc = mesh.num_cells(), np = mesh.num_vertices();
    const bool par = exec == Exec::parallel;
    LagStepReport rep;
    rep.dt = dt;

    // Cell fluxes: sum over nodes and subfaces of l f.
    std::vector<Vec4> acc(nc, Vec4::Zero());
    if (!par) {
        for (int p = 0; p < np; ++p) {
            for (const SubfaceEntry& e : ph.entries[p]) acc[e.cell] += e.length * subface_flux(ph.v[p], e.n, e.p_star);
        }
    } else {
        std::vector<std::vector<std::array<Vec4, 2>>> slot(nc);
        for (int c = 0; c < nc; ++c) slot[c].assign(mesh.cells[c].size(), {Vec4::Zero(), Vec4::Zero()});
#pragma omp parallel for schedule(static)
        for (int p = 0; p < np; ++p) {
            for (const SubfaceEntry& e : ph.entries[p]) {
                slot[e.cell][e.local][e.side] = e.length * subface_flux(ph.v[p], e.n, e.p_star);
            }
        }
#pragma omp parallel for schedule(static)
        for (int c = 0; c < nc; ++c) {
            for (const auto& s : slot[c]) acc[c] += s[0] + s[1];
        }
    }

    for (int p = 0; p < np; ++p) {
        if (ph.boundary[p]) {
            for (const SubfaceEntry& e : ph.entries[p]) rep.wall_impulse -= dt * e.length * e.p_star * e.n;
        } else {
            rep.max_node_defect = std::max(rep.max_node_defect, node_conservation_defect(ph.faces[p], ph.solutions[p]));
        }
    }

    const CornerGeometry g0 = corner_geometry(mesh);
    std::vector<double> vol0(nc);
    for (int c = 0; c < nc; ++c) vol0[c] = mesh.volume(c);

    std::vector<LagState> next(nc);
#pragma omp parallel for schedule(static) if (par)
    for (int c = 0; c < nc; ++c) {
        next[c] = LagState::from_vec(sys.state[c].vec() - dt / sys.mass[c] * acc[c]);
    }

    for (int p = 0; p < np; ++p) mesh.vertices[p] += dt * ph.v[p];
    for (int c = 0; c < nc; ++c) {
        if (!(mesh.volume(c) > 0.0)) {
            throw GeometryError("cell " + std::to_string(c) + " tangled during the Lagrangian step");
        }
    }
    const CornerGeometry g1 = corner_geometry(mesh);

    rep.min_tau = std::numeric_limits<double>::infinity();
    rep.min_eps = std::numeric_limits<double>::infinity();
    for (int c = 0; c < nc; ++c) {
        const double vol1 = mesh.volume(c);
        double flux_n = 0.0, flux_mid = 0.0;
        for (std::size_t k = 0; k < mesh.cells[c].size(); ++k) {
            const Vec2& v = ph.v[mesh.cells[c][k]];
            flux_n += g0.corners[c][k].ln.dot(v);
            flux_mid += 0.5 * (g0.corners[c][k].ln + g1.corners[c][k].ln).dot(v);
        }
        rep.gcl_current = std::max(rep.gcl_current, std::abs(vol1 - vol0[c] - dt * flux_n));
        rep.gcl_midpoint = std::max(rep.gcl_midpoint, std::abs(vol1 - vol0[c] - dt * flux_mid));
        check_domain(next[c], ("cell " + std::to_string(c)).c_str());
        rep.min_tau = std::min(rep.min_tau, next[c].tau);
        rep.min_eps = std::min(rep.min_eps, next[c].eps());
        rep.momentum_change += sys.mass[c] * (next[c].v - sys.state[c].v);
        rep.energy_change += sys.mass[c] * (next[c].e - sys.state[c].e);
    }
    sys.state = std::move(next);
    return rep;
}

HalfFaceCharacterization halfface_flux_characterization(const LagrangeSystem& sys, const NodePhase& ph, int node) {
    if (node < 0 || node >= sys.mesh.num_vertices()) throw ArgumentError("node index out of range");
    if (ph.boundary[node]) throw ArgumentError("node " + std::to_string(node) + " lies on the boundary");
    const auto& entries = ph.entries[node];
    const Vec2 v = ph.v[node];
    // next cell across the side-1 subface of each cell
    std::map<int, int> after;
    std::map<std::pair<int, int>, Vec4> flux;  // (cell, side) -> l f
    for (const SubfaceEntry& e : entries) flux[{e.cell, e.side}] = e.length * subface_flux(v, e.n, e.p_star);
    const auto nf = node_faces(sys.mesh)[node];
    for (const NodeFace& f : nf) after[f.cell] = f.nb_cell;

    HalfFaceCharacterization h;
    int c = nf.front().cell;
    do {
        h.cells.push_back(c);
        c = after.at(c);
    } while (c != h.cells.front() && h.cells.size() <= nf.size());
    const int k = static_cast<int>(h.cells.size());
    if (k != static_cast<int>(nf.size())) throw ArgumentError("node fan is not a single cycle");

    NodeCycleData data;
    for (int i = 0; i < k; ++i) {
        data.own.push_back(flux.at({h.cells[i], 0}));
        data.next.push_back(flux.at({h.cells[i], 1}));
    }
    for (int i = 0; i < k; ++i) h.physical.push_back(flux.at({h.cells[(i + k - 1) % k], 1}));
    h.fluxes = residuals_to_node_cycle(data);
    return h;
}

Vec2 total_momentum(const LagrangeSystem& sys) {
    Vec2 s = Vec2::Zero();
    for (std::size_t c = 0; c < sys.state.size(); ++c) s += sys.mass[c] * sys.state[c].v;
    return s;
}

double total_energy(const LagrangeSystem& sys) {
    double s = 0.0;
    for (std::size_t c = 0; c < sys.state.size(); ++c) s += sys.mass[c] * sys.state[c].e;
    return s;
}

}  // namespace rfv
