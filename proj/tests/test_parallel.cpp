#include "rfv/driver.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <random>

using namespace rfv;

namespace {

void threads(int n) {
    setenv("RFV_THREADS", std::to_string(n).c_str(), 1);
    configure_threads();
}

template <class V>
double max_diff(const std::vector<V>& a, const std::vector<V>& b) {
    REQUIRE(a.size() == b.size());
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if constexpr (std::is_arithmetic_v<V>) {
            d = std::max(d, std::abs(a[i] - b[i]));
        } else {
            d = std::max(d, (a[i] - b[i]).cwiseAbs().maxCoeff());
        }
    }
    return d;
}

std::vector<Vec4> smooth_euler(const std::vector<Vec2>& x, const IdealGasEos& eos) {
    std::vector<Vec4> u(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double s = std::sin(2 * M_PI * (x[i].x() + 0.5 * x[i].y()));
        u[i] = to_conserved(Prim2{1.0 + 0.3 * s, Vec2(0.5, -0.3 * s), 1.0 + 0.2 * s}, eos);
    }
    return u;
}

}  // namespace

TEST_CASE("residual distribution: serial and parallel agree") {
    const IdealGasEos eos(1.4);
    const TriMesh mesh = structured_tri_mesh(24, 1.0, true, 0.2, 3);
    const Vec2 a(1.0, 0.5);
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::vector<double> u(mesh.num_vertices());
    for (double& v : u) v = uni(rng);
    const std::vector<Vec4> w = smooth_euler(mesh.vertices, eos);
    const double dt = rd_stable_dt(mesh, a);
    const double dtw = rd_stable_dt(mesh, w, eos);
    for (RdScheme s : {RdScheme::n, RdScheme::lxf, RdScheme::limited}) {
        threads(4);
        const auto par = rd_step(mesh, a, u, dt, s, Exec::parallel);
        const auto parw = rd_step(mesh, w, dtw, s, eos, Exec::parallel);
        const auto ser = rd_step(mesh, a, u, dt, s, Exec::serial);
        const auto serw = rd_step(mesh, w, dtw, s, eos, Exec::serial);
        CHECK(max_diff(par, ser) < 1e-13);
        CHECK(max_diff(parw, serw) < 1e-13);
        // gathers are deterministic for any thread count
        threads(1);
        CHECK(max_diff(rd_step(mesh, a, u, dt, s, Exec::parallel), par) == 0.0);
        CHECK(max_diff(rd_step(mesh, w, dtw, s, eos, Exec::parallel), parw) == 0.0);
    }
}

TEST_CASE("corner finite volumes: serial and parallel agree") {
    const IdealGasEos eos(1.4);
    const CornerFvSetup s = make_cornerfv_setup(cartesian_poly_mesh(16, 16, 1.0, 1.0, true, 0.2, 4));
    std::vector<Vec2> x(s.mesh.num_cells());
    for (int c = 0; c < s.mesh.num_cells(); ++c) x[c] = s.mesh.centroid(c);
    const std::vector<Vec4> u = smooth_euler(x, eos);
    const double dt = cornerfv_stable_dt(s, u, CornerBc::transmissive, eos);
    for (CornerPath path : {CornerPath::flux, CornerPath::residual}) {
        for (bool fix : {false, true}) {
            threads(4);
            const auto par = cornerfv_step(s, u, dt, CornerBc::transmissive, eos, path, Exec::parallel, fix);
            const auto ser = cornerfv_step(s, u, dt, CornerBc::transmissive, eos, path, Exec::serial, fix);
            CHECK(max_diff(par, ser) < 1e-13);
            threads(2);
            CHECK(max_diff(cornerfv_step(s, u, dt, CornerBc::transmissive, eos, path, Exec::parallel, fix), par) == 0.0);
        }
    }
}

TEST_CASE("Lagrangian step: serial and parallel agree") {
    const IdealGasEos eos(1.4);
    PolyMesh mesh = cartesian_poly_mesh(16, 16, 1.0, 1.0, true, 0.2, 5);
    std::vector<Vec2> x(mesh.num_cells());
    for (int c = 0; c < mesh.num_cells(); ++c) x[c] = mesh.centroid(c);
    std::vector<LagState> st(mesh.num_cells());
    const std::vector<Vec4> e = smooth_euler(x, eos);
    for (int c = 0; c < mesh.num_cells(); ++c) {
        const Prim2 p = to_primitive(e[c], eos);
        st[c] = LagState::from_prim(p, eos);
    }
    const LagrangeSystem sys0 = make_lagrange_system(mesh, st);
    threads(4);
    LagrangeSystem a = sys0, b = sys0;
    for (int step = 0; step < 10; ++step) {
        const NodePhase pa = lagrange_nodal_phase(a, eos, Exec::parallel);
        const NodePhase pb = lagrange_nodal_phase(b, eos, Exec::serial);
        // the cell gather sums in another order, so the paths drift by ulps after step 0
        if (step == 0) CHECK(max_diff(pa.v, pb.v) == 0.0);
        CHECK(max_diff(pa.v, pb.v) < 1e-13);
        const double dt = lagrange_stable_dt(a, pa);
        lagrange_step(a, dt, eos, Exec::parallel, &pa);
        lagrange_step(b, dt, eos, Exec::serial, &pb);
        std::vector<Vec4> va, vb;
        for (const LagState& s : a.state) va.push_back(s.vec());
        for (const LagState& s : b.state) vb.push_back(s.vec());
        CHECK(max_diff(va, vb) < 1e-13);
        CHECK(max_diff(a.mesh.vertices, b.mesh.vertices) < 1e-13);
    }
}

TEST_CASE("1D finite volumes: serial and parallel agree") {
    const IdealGasEos eos(1.4);
    const Grid1D grid = Grid1D::uniform(500, 0.0, 1.0);
    std::vector<Vec3> u(500);
    for (int i = 0; i < 500; ++i) u[i] = to_conserved(grid.center(i) < 0.5 ? kSodLeft : kSodRight, eos);
    threads(4);
    for (Scheme1D s : {Scheme1D::rusanov, Scheme1D::roe}) {
        const double dt = stable_dt(grid, u, eos);
        const auto par = fv1d_step(grid, u, dt, s, Bc1D::transmissive, eos, 0.5, Exec::parallel);
        const auto ser = fv1d_step(grid, u, dt, s, Bc1D::transmissive, eos, 0.5, Exec::serial);
        CHECK(max_diff(par, ser) == 0.0);
    }
    threads(0);
    CHECK(configure_threads() >= 1);
    setenv("RFV_THREADS", "four", 1);
    CHECK_THROWS_AS(configure_threads(), ConfigError);
    setenv("RFV_THREADS", "-2", 1);
    CHECK_THROWS_AS(configure_threads(), ConfigError);
    unsetenv("RFV_THREADS");
}
