// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include "oracles.hpp"
#include "rfv/driver.hpp"
#include "rfv/entropyfix.hpp"
#include "rfv/fluxrec.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <sstream>
#include <string>

using namespace rfv;

namespace {

struct Verdict {
    bool pass = true;
    std::ostringstream detail;
    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

using Criterion = std::function<void(Verdict&)>;

bool report(int id, const char* name, double budget_s, const Criterion& body) {
    Verdict v;
    v.detail.precision(3);
    const auto t0 = std::chrono::steady_clock::now();
    try {
        body(v);
    } catch (const std::exception& e) {
        v.pass = false;
        v.detail << " [exception: " << e.what() << "]";
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (budget_s > 0.0 && secs > budget_s) {
        v.pass = false;
        v.detail << " [over the " << budget_s << " s budget]";
    }
    std::printf("%s criterion %d (%s):%s (%.2f s)\n", v.pass ? "PASS" : "FAIL", id, name, v.detail.str().c_str(), secs);
    std::fflush(stdout);
    return v.pass;
}

template <class D>
double vmax(const Eigen::MatrixBase<D>& a) {
    return a.cwiseAbs().maxCoeff();
}

// 1. periodic conservation
void conservation(Verdict& v) {
    const IdealGasEos eos(1.4);
    const int steps = 100;
    double worst = 0.0;

    const Grid1D grid = Grid1D::uniform(200, 0.0, 1.0);
    std::vector<Vec3> u0(200);
    for (int i = 0; i < 200; ++i) {
        const double x = grid.center(i);
        u0[i] = to_conserved(Prim1{1.0 + 0.5 * std::sin(2 * M_PI * x), 0.3, 1.0 + 0.3 * std::cos(2 * M_PI * x)}, eos);
    }
    auto total = [&](const std::vector<Vec3>& u) {
        Vec3 t = Vec3::Zero();
        for (int i = 0; i < grid.size(); ++i) t += grid.dx(i) * u[i];
        return t;
    };
    for (Scheme1D s : {Scheme1D::rusanov, Scheme1D::roe}) {
        std::vector<Vec3> u = u0;
        for (int k = 0; k < steps; ++k) u = fv1d_step(grid, u, stable_dt(grid, u, eos), s, Bc1D::periodic, eos);
        const double d = vmax(total(u) - total(u0));
        v.detail << (s == Scheme1D::roe ? " roe " : " rusanov ") << d;
        worst = std::max(worst, d);
    }
    {
        std::vector<LagState> u(200);
        std::vector<double> m(200);
        for (int i = 0; i < 200; ++i) {
            const Prim1 w = to_primitive(u0[i], eos);
            u[i] = LagState::from_prim({w.rho, Vec2(w.v, 0.0), w.p}, eos);
            m[i] = w.rho * grid.dx(i);
        }
        auto lag_total = [&] {
            Vec3 t = Vec3::Zero();
            for (int i = 0; i < 200; ++i) t += m[i] * Vec3(u[i].tau, u[i].v.x(), u[i].e);
            return t;
        };
        const Vec3 t0 = lag_total();
        for (int k = 0; k < steps; ++k) {
            u = lagrangian1d_step(m, u, lagrangian_stable_dt(m, u, Bc1D::periodic, eos), Bc1D::periodic, eos);
        }
        const double d = vmax(lag_total() - t0);
        v.detail << " simple " << d;
        worst = std::max(worst, d);
    }

    const TriMesh mesh = structured_tri_mesh(24, 1.0, true, 0.2, 3);
    const Vec2 a(1.0, 0.5);
    for (RdScheme s : {RdScheme::n, RdScheme::lxf, RdScheme::limited}) {
        std::vector<double> u(mesh.num_vertices());
        std::vector<Vec4> w(mesh.num_vertices());
        for (int i = 0; i < mesh.num_vertices(); ++i) {
            const Vec2& x = mesh.vertices[i];
            u[i] = advection_profile(x);
            const double sn = std::sin(2 * M_PI * (x.x() + x.y()));
            w[i] = to_conserved(Prim2{1.0 + 0.3 * sn, Vec2(0.5, -0.2), 1.0 + 0.2 * sn}, eos);
        }
        const double t0 = rd_total(mesh, u);
        const Vec4 w0 = rd_total(mesh, w);
        const double dt = rd_stable_dt(mesh, a);
        for (int k = 0; k < steps; ++k) {
            u = rd_step(mesh, a, u, dt, s);
            w = rd_step(mesh, w, rd_stable_dt(mesh, w, eos), s, eos);
        }
        const double d = std::max(std::abs(rd_total(mesh, u) - t0), vmax(rd_total(mesh, w) - w0));
        v.detail << " rd-" << to_string(s) << " " << d;
        worst = std::max(worst, d);
    }

    const CornerFvSetup cs = make_cornerfv_setup(cartesian_poly_mesh(20, 20, 1.0, 1.0, true, 0.2, 5));
    std::vector<Vec4> c(cs.mesh.num_cells());
    for (int i = 0; i < cs.mesh.num_cells(); ++i) {
        const Vec2 x = cs.mesh.centroid(i);
        c[i] = to_conserved(Prim2{1.0 + 0.2 * std::sin(2 * M_PI * (x.x() + x.y())), Vec2(1.0, 0.5), 1.0}, eos);
    }
    const Vec4 c0 = cornerfv_total(cs, c);
    for (int k = 0; k < steps; ++k) {
        c = cornerfv_step(cs, c, cornerfv_stable_dt(cs, c, CornerBc::transmissive, eos), CornerBc::transmissive, eos);
    }
    const double d = vmax(cornerfv_total(cs, c) - c0);
    v.detail << " corner " << d;
    worst = std::max(worst, d);
    v.require(worst <= 1e-12, "drift <= 1e-12");
}

// 2. flux recovery exactness
void flux_recovery(Verdict& v) {
    const SelftestResult r = flux_recovery_selftest(1000, 7);
    v.detail << " max |A f - psi| " << r.max_residual << ", circulant gap " << r.max_circulant_gap << ", graphs "
             << r.per_graph.size();
    v.require(r.per_graph.size() == 9, "P1, P2, quad-dG and cycles 3..8");
    v.require(r.max_residual <= 1e-12, "residual <= 1e-12");
    v.require(r.max_circulant_gap <= 1e-12, "circulant gap <= 1e-12");
}

// 3. recovered P1 dual normals
void dual_normals(Verdict& v) {
    std::mt19937_64 rng(3);
    const OrientedGraph g = element_graph(GraphKind::triangle_p1);
    double worst = 0.0, geo = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const auto x = oracle::random_triangle(rng);
        const TriMesh m = make_tri_mesh({x[0], x[1], x[2]}, {{0, 1, 2}});
        std::vector<Vec2> boundary(3);
        for (int k = 0; k < 3; ++k) boundary[k] = 0.5 * m.normals[0][k];
        const std::vector<Vec2> n = recover_normals(g, boundary);
        const Vec2 centroid = (x[0] + x[1] + x[2]) / 3.0;
        for (int e = 0; e < 3; ++e) {
            const int a = e, b = (e + 1) % 3;
            worst = std::max(worst, (n[e] - (m.normals[0][b] - m.normals[0][a]) / 6.0).norm());
            // segment from the edge midpoint to the centroid, turned to face from a to b
            const Vec2 s = centroid - 0.5 * (x[a] + x[b]);
            Vec2 ref(-s.y(), s.x());
            if (ref.dot(x[b] - x[a]) < 0.0) ref = -ref;
            geo = std::max(geo, (n[e] - ref).norm());
        }
    }
    v.detail << " formula " << worst << ", median dual " << geo;
    v.require(worst <= 1e-13 && geo <= 1e-13, "<= 1e-13");
}

// 4. scalar maximum principle
void max_principle(Verdict& v) {
    const TriMesh mesh = structured_tri_mesh(24, 1.0, true, 0.25, 9);
    const Vec2 a(1.0, 0.5);
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> d(0.0, 1.0);
    std::vector<double> u(mesh.num_vertices());
    for (double& x : u) x = d(rng);
    const double dt = rd_stable_dt(mesh, a, 0.4);
    for (int k = 0; k < 500; ++k) u = rd_step(mesh, a, u, dt, RdScheme::n);
    const double lo = *std::min_element(u.begin(), u.end()), hi = *std::max_element(u.begin(), u.end());
    v.detail << " min " << lo << ", max " << hi;
    v.require(lo >= -1e-12 && hi <= 1.0 + 1e-12, "bounds");
}

// 5. Eulerian Sod
void sod(Verdict& v) {
    const IdealGasEos eos(1.4);
    const Grid1D grid = Grid1D::uniform(400, 0.0, 1.0);
    for (Scheme1D s : {Scheme1D::rusanov, Scheme1D::roe}) {
        std::vector<Vec3> u(400);
        for (int i = 0; i < 400; ++i) u[i] = to_conserved(grid.center(i) < 0.5 ? kSodLeft : kSodRight, eos);
        double t = 0.0;
        while (t < 0.2 * (1.0 - 1e-14)) {
            const double dt = std::min(stable_dt(grid, u, eos), 0.2 - t);
            u = fv1d_step(grid, u, dt, s, Bc1D::transmissive, eos);
            t += dt;
        }
        const double l1 = sod_l1_error(grid, u, t, eos);
        const bool roe = s == Scheme1D::roe;
        v.detail << (roe ? " roe L1 " : " rusanov L1 ") << l1;
        v.require(l1 <= (roe ? 0.035 : 0.05), roe ? "roe L1" : "rusanov L1");
    }
    const ExactRiemann ex(kSodLeft, kSodRight, eos);
    const double ref = oracle::star_pressure_bisection(1.0, 0.0, 1.0, 0.125, 0.0, 0.1, 1.4);
    v.detail.precision(8);
    v.detail << ", p* " << ex.p_star() << " vs bisection " << ref;
    v.require(std::abs(ex.p_star() - ref) <= 1e-5 && std::abs(ex.p_star() - 0.30313) <= 1e-5, "star pressure");
}

// 6. Lagrangian Sod strip
void lagrangian_strip(Verdict& v) {
    const IdealGasEos eos(1.4);
    const int n = 400;
    PolyMesh mesh = cartesian_poly_mesh(n, 1, 1.0, 1.0 / n, false);
    std::vector<LagState> s(mesh.num_cells());
    for (int c = 0; c < mesh.num_cells(); ++c) {
        const Prim1 w = mesh.centroid(c).x() < 0.5 ? kSodLeft : kSodRight;
        s[c] = LagState::from_prim({w.rho, Vec2(w.v, 0.0), w.p}, eos);
    }
    LagrangeSystem sys = make_lagrange_system(std::move(mesh), std::move(s));
    const GclConvention conv = parse_gcl_convention(RunConfig{}.gcl_convention);
    double t = 0.0, gcl = 0.0, balance = 0.0, energy = 0.0, min_tau = 1e300, min_eps = 1e300;
    while (t < 0.2 * (1.0 - 1e-14)) {
        const NodePhase ph = lagrange_nodal_phase(sys, eos);
        const double dt = std::min(lagrange_stable_dt(sys, ph, 0.9), 0.2 - t);
        const LagStepReport r = lagrange_step(sys, dt, eos, Exec::parallel, &ph);
        t += dt;
        gcl = std::max(gcl, r.gcl(conv));
        balance = std::max(balance, (r.momentum_change - r.wall_impulse).norm());
        energy = std::max(energy, std::abs(r.energy_change));
        min_tau = std::min(min_tau, r.min_tau);
        min_eps = std::min(min_eps, r.min_eps);
    }
    const ExactRiemann exact(kSodLeft, kSodRight, eos);
    double l1 = 0.0;
    for (int c = 0; c < sys.mesh.num_cells(); ++c) {
        const double x = sys.mesh.centroid(c).x();
        l1 += std::abs(1.0 / sys.state[c].tau - exact.sample((x - 0.5) / t).rho) * sys.mesh.volume(c);
    }
    l1 *= n;  // per unit strip height
    v.detail << " L1 " << l1 << ", min tau " << min_tau << ", min eps " << min_eps << ", GCL " << gcl
             << ", momentum balance " << balance << ", energy balance " << energy;
    v.require(l1 <= 0.06, "L1");
    v.require(min_tau > 0.0 && min_eps > 0.0, "positivity");
    v.require(gcl <= 1e-11, "GCL");
    v.require(balance <= 1e-10 && energy <= 1e-10, "balance");
}

// 7. nodal solver
void nodal(Verdict& v) {
    const IdealGasEos eos(1.4);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> uni(0.0, 1.0), pos(0.2, 3.0), vel(-1.0, 1.0);
    double uniform = 0.0, defect = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const int k = 3 + trial % 6;
        std::vector<double> angle(k);
        for (double& a : angle) a = 2 * M_PI * uni(rng);
        std::sort(angle.begin(), angle.end());
        std::vector<LagState> cells(k);
        for (auto& c : cells) c = LagState::from_prim({pos(rng), Vec2(vel(rng), vel(rng)), pos(rng)}, eos);
        std::vector<HalfFace> faces(k), flat(k);
        for (int i = 0; i < k; ++i) {
            const Vec2 n(std::sin(angle[i]), -std::cos(angle[i]));
            const double l = 0.05 + uni(rng);
            faces[i] = {cells[(i + k - 1) % k], cells[i], n, l, false};
            flat[i] = {cells[0], cells[0], n, l, false};
        }
        defect = std::max(defect, node_conservation_defect(faces, nodal_solver(faces, eos)));
        // flat needs normals spanning the plane
        Eigen::Matrix2d mm = Eigen::Matrix2d::Zero();
        for (const HalfFace& f : flat) mm += f.n * f.n.transpose();
        if (mm.determinant() > 1e-6) uniform = std::max(uniform, (nodal_solver(flat, eos).v - cells[0].v).norm());
    }
    v.detail << " uniform flow " << uniform << ", max conservation defect " << defect;
    v.require(uniform <= 1e-13, "uniform flow");
    v.require(defect <= 1e-11, "defect");
}

// 8. entropy correction
void entropy(Verdict& v) {
    const IdealGasEos eos(1.4);
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> pos(0.5, 2.0), vel(-1.0, 1.0);
    std::normal_distribution<double> nd(0.0, 0.3);
    double post = -1e300, change = 0.0;
    int violating = 0, stable_touched = 0;
    for (int trial = 0; trial < 2000; ++trial) {
        const int k = 3 + trial % 6;
        std::vector<Vec2> ln(k);
        Vec2 sum = Vec2::Zero();
        for (int c = 0; c + 1 < k; ++c) {
            ln[c] = Vec2(nd(rng), nd(rng));
            sum += ln[c];
        }
        ln[k - 1] = -sum;
        std::vector<Vec4> u(k);
        Vec4 mean = Vec4::Zero();
        for (auto& s : u) {
            s = to_conserved(Prim2{pos(rng), Vec2(vel(rng), vel(rng)), pos(rng)}, eos);
            mean += s / k;
        }
        // odd trials anti-diffusive (violating), even trials strongly diffusive
        const double beta = trial % 2 ? -0.5 : 20.0;
        std::vector<Vec4> phi(k);
        for (int c = 0; c < k; ++c) {
            Vec4 lf = Vec4::Zero();
            for (const Vec4& s : u) lf += euler_flux(s, ln[c], eos) / k;
            phi[c] = lf + beta * (u[c] - mean) - euler_flux(u[c], ln[c], eos);
        }
        const std::vector<Vec4> phi0 = phi;
        const double g = node_entropy_flux(u, ln, eos, EntropyForm::eulerian);
        const NodeEntropyReport r = entropy_correct(u, phi, g, eos, EntropyForm::eulerian);
        Vec4 d = Vec4::Zero();
        for (int c = 0; c < k; ++c) d += phi[c] - phi0[c];
        change = std::max(change, vmax(d));
        if (r.e < 0.0) {
            ++violating;
            double p = -g;
            for (int c = 0; c < k; ++c) p += entropy_pair(u[c], eos).w.dot(phi[c]);
            post = std::max(post, p);
        } else if (r.alpha != 0.0 || phi != phi0) {
            ++stable_touched;
        }
    }
    v.detail << " violating " << violating << ", max post defect " << post << ", max sum change " << change
             << ", stable nodes modified " << stable_touched;
    v.require(violating >= 1000, "1000 violating neighbourhoods");
    v.require(post <= 1e-12, "post defect");
    v.require(change <= 1e-13, "conservation");
    v.require(stable_touched == 0, "alpha = 0 when stable");
}

// 9. convergence
void convergence_rates(Verdict& v) {
    std::ostringstream sink;
    RunConfig adv;
    adv.problem = "advection2d";
    adv.scheme = "n";
    adv.output_dir = (std::filesystem::temp_directory_path() / "rfv_acceptance").string();
    std::filesystem::create_directories(adv.output_dir);
    const auto rows = convergence(resolve_config(adv), {32, 64, 128}, sink);
    v.detail << " N scheme orders";
    for (std::size_t i = 1; i < rows.size(); ++i) {
        v.detail << " " << rows[i].order;
        v.require(rows[i].order >= 0.7 && rows[i].order <= 1.1, "order in [0.7, 1.1]");
    }
    RunConfig s;
    s.problem = "sod1d";
    s.output_dir = adv.output_dir;
    const auto sod = convergence(resolve_config(s), {100, 200, 400}, sink);
    v.detail << ", Sod L1";
    for (std::size_t i = 0; i < sod.size(); ++i) {
        v.detail << " " << sod[i].l1;
        if (i > 0) v.require(sod[i].l1 < sod[i - 1].l1, "Sod errors decrease");
    }
    std::filesystem::remove_all(adv.output_dir);
}

// 10. flux/residual duality
void duality(Verdict& v) {
    const IdealGasEos eos(1.4);
    std::mt19937_64 rng(10);
    std::uniform_real_distribution<double> pos(0.5, 2.0), vel(-1.0, 1.0);
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        PolyMesh m;
        if (trial % 2) {
            const TriMesh t = structured_tri_mesh(6, 1.0, true, 0.2, trial + 1);
            std::vector<std::vector<int>> cells;
            std::vector<std::vector<Vec2>> shifts;
            for (int i = 0; i < t.num_triangles(); ++i) {
                cells.push_back({t.triangles[i][0], t.triangles[i][1], t.triangles[i][2]});
                shifts.push_back({t.shifts[i][0], t.shifts[i][1], t.shifts[i][2]});
            }
            m = make_poly_mesh(t.vertices, cells, shifts);
        } else {
            m = cartesian_poly_mesh(7, 5, 1.0, 1.0, trial % 4 == 0, 0.25, trial + 1);
        }
        const CornerFvSetup s = make_cornerfv_setup(m);
        std::vector<Vec4> u(s.mesh.num_cells());
        for (auto& x : u) x = to_conserved(Prim2{pos(rng), Vec2(vel(rng), vel(rng)), pos(rng)}, eos);
        const double dt = cornerfv_stable_dt(s, u, CornerBc::wall, eos);
        for (CornerBc bc : {CornerBc::transmissive, CornerBc::wall}) {
            const auto a = cornerfv_step(s, u, dt, bc, eos, CornerPath::flux);
            const auto b = cornerfv_step(s, u, dt, bc, eos, CornerPath::residual);
            for (int c = 0; c < s.mesh.num_cells(); ++c) worst = std::max(worst, vmax(a[c] - b[c]));
        }
    }
    v.detail << " max componentwise difference " << worst;
    v.require(worst <= 1e-13, "<= 1e-13");
}

}  // namespace

int main() {
    configure_threads();
    bool ok = true;
    ok &= report(1, "periodic conservation", 10.0, conservation);
    ok &= report(2, "flux recovery exactness", 5.0, flux_recovery);
    ok &= report(3, "recovered P1 dual normals", 0.0, dual_normals);
    ok &= report(4, "scalar maximum principle", 0.0, max_principle);
    ok &= report(5, "Eulerian Sod", 5.0, sod);
    ok &= report(6, "Lagrangian Sod strip", 20.0, lagrangian_strip);
    ok &= report(7, "nodal solver", 0.0, nodal);
    ok &= report(8, "entropy correction", 0.0, entropy);
    ok &= report(9, "convergence", 0.0, convergence_rates);
    ok &= report(10, "flux/residual duality", 0.0, duality);
    return ok ? 0 : 1;
}
