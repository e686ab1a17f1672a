#include "oracles.hpp"
#include "rfv/rd2d.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace rfv;

namespace {

std::vector<Vec4> smooth_euler(const TriMesh& m, const IdealGasEos& eos) {
    std::vector<Vec4> u(m.num_vertices());
    for (int v = 0; v < m.num_vertices(); ++v) {
        const Vec2& x = m.vertices[v];
        const double s = std::sin(2 * M_PI * x.x()) * std::cos(2 * M_PI * x.y());
        u[v] = to_conserved(Prim2{1.0 + 0.3 * s, Vec2(0.5 + 0.1 * s, -0.3), 1.0 + 0.2 * s}, eos);
    }
    return u;
}

/// Steady a.grad u = 0 on the unit square with inflow Dirichlet data; returns
/// the L1 error after pseudo-time convergence to 1e-10.
double steady_error(int n, RdScheme scheme) {
    const Vec2 a(1.0, 0.5);
    auto exact = [](const Vec2& x) { return std::sin(2 * M_PI * (x.y() - 0.5 * x.x())); };
    const TriMesh m = structured_tri_mesh(n, 1.0, false);
    std::vector<double> u(m.num_vertices(), 0.0);
    std::vector<char> fixed(m.num_vertices(), 0);
    for (int i = 0; i < m.num_vertices(); ++i) {
        const Vec2& x = m.vertices[i];
        if (x.x() < 1e-12 || x.y() < 1e-12) {
            fixed[i] = 1;
            u[i] = exact(x);
        }
    }
    const double dt = rd_stable_dt(m, a, 0.9);
    double res = 1.0;
    for (int it = 0; it < 100000 && res > 1e-10; ++it) {
        const std::vector<double> v = rd_step(m, a, u, dt, scheme, Exec::serial, &fixed);
        res = 0.0;
        for (int i = 0; i < m.num_vertices(); ++i) res = std::max(res, std::abs(v[i] - u[i]) / dt);
        u = v;
    }
    REQUIRE(res <= 1e-10);
    double e = 0.0;
    for (int i = 0; i < m.num_vertices(); ++i) e += m.dual_area[i] * std::abs(u[i] - exact(m.vertices[i]));
    return e;
}

}  // namespace

TEST_CASE("scheme names") {
    CHECK(parse_rd_scheme("n") == RdScheme::n);
    CHECK(parse_rd_scheme("lxf") == RdScheme::lxf);
    CHECK(parse_rd_scheme("limited") == RdScheme::limited);
    CHECK(std::string(to_string(RdScheme::limited)) == "limited");
    CHECK_THROWS_AS(parse_rd_scheme("psi"), ConfigError);
}

TEST_CASE("scalar distributions are conservative and positive") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    for (int trial = 0; trial < 1000; ++trial) {
        const auto x = oracle::random_triangle(rng);
        const TriMesh m = make_tri_mesh({x[0], x[1], x[2]}, {{0, 1, 2}});
        const Vec2 a(d(rng), d(rng));
        const Res3<double> k = inflow_params(m, 0, a);
        CHECK(std::abs(k[0] + k[1] + k[2]) < 1e-14);
        const Res3<double> u{d(rng), d(rng), d(rng)};
        const double phi = total_residual(k, u);
        // Phi = oint (a u).n_out exactly for linear u: midpoint rule per edge
        double ref = 0.0;
        for (int e = 0; e < 3; ++e) {
            const Vec2 ed = x[(e + 2) % 3] - x[(e + 1) % 3];
            ref -= 0.5 * (u[(e + 1) % 3] + u[(e + 2) % 3]) * a.dot(Vec2(-ed.y(), ed.x()));
        }
        CHECK(phi == doctest::Approx(ref).epsilon(1e-12).scale(1.0));

        const Res3<double> n = n_scheme_scalar(k, u);
        CHECK(std::abs(n[0] + n[1] + n[2] - phi) < 1e-14);
        const auto c = n_scheme_coefficients(k);
        for (int s = 0; s < 3; ++s) {
            double from_c = 0.0;
            for (int r = 0; r < 3; ++r) {
                CHECK(c[s][r] >= 0.0);
                from_c += c[s][r] * (u[s] - u[r]);
            }
            CHECK(std::abs(from_c - n[s]) < 1e-14);
        }
        const Res3<double> l = lxf_distribution(phi, u, std::max({std::abs(k[0]), std::abs(k[1]), std::abs(k[2])}));
        CHECK(std::abs(l[0] + l[1] + l[2] - phi) < 1e-14);
        const Res3<double> b = beta_coefficients(n, phi);
        const Res3<double> lim = beta_limit(n, phi);
        if (phi != 0.0) {
            CHECK(std::abs(b[0] + b[1] + b[2] - 1.0) < 1e-14);
            for (double v : b) CHECK((v >= 0.0 && v <= 1.0));
        }
        CHECK(std::abs(lim[0] + lim[1] + lim[2] - phi) < 1e-14);
    }
    // roundoff-sized residual with no positive ratio
    const Res3<double> b = beta_coefficients({-1.0, -1.0, 1.0}, 1e-300);
    CHECK(b[0] + b[1] + b[2] == doctest::Approx(1.0));
}

TEST_CASE("uniform states give zero residuals") {
    const IdealGasEos eos(1.4);
    const TriMesh m = structured_tri_mesh(6, 1.0, true, 0.2, 4);
    for (RdScheme s : {RdScheme::n, RdScheme::lxf, RdScheme::limited}) {
        const auto r = rd_residuals(m, Vec2(1.0, 0.5), std::vector<double>(m.num_vertices(), 0.7), s);
        for (const auto& t : r) {
            for (double v : t) CHECK(std::abs(v) < 1e-14);
        }
        const Vec4 u = to_conserved(Prim2{1.0, Vec2(0.4, 0.2), 1.0}, eos);
        const auto re = rd_residuals(m, std::vector<Vec4>(m.num_vertices(), u), s, eos);
        for (const auto& t : re) {
            for (const Vec4& v : t) CHECK(v.cwiseAbs().maxCoeff() < 1e-13);
        }
    }
}

TEST_CASE("Euler total residual against a fine edge rule") {
    // Nearby states: two Gauss points per edge are accurate to O(du^4).
    const IdealGasEos eos(1.4);
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        const auto x = oracle::random_triangle(rng);
        const Vec4 base = to_conserved(Prim2{1.0, Vec2(0.3, -0.2), 1.0}, eos);
        Res3<Vec4> u;
        for (auto& s : u) s = base + 0.01 * Vec4(d(rng), d(rng), d(rng), d(rng));
        Vec4 ref = Vec4::Zero();
        for (int k = 0; k < 3; ++k) {
            const int kb = (k + 1) % 3;
            const Vec2 e = x[kb] - x[k];
            const Vec2 n(e.y(), -e.x());
            const int q = 4000;
            for (int i = 0; i < q; ++i) {
                const double t = (i + 0.5) / q;
                ref += oracle::flux((1.0 - t) * u[k] + t * u[kb], n, 1.4) / q;
            }
        }
        CHECK((total_residual(x, u, eos) - ref).cwiseAbs().maxCoeff() < 1e-7);
    }
}

TEST_CASE("system N scheme is conservative") {
    const IdealGasEos eos(1.4);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> d(0.5, 1.5), v(-0.8, 0.8);
    for (int trial = 0; trial < 300; ++trial) {
        const auto x = oracle::random_triangle(rng);
        const TriMesh m = make_tri_mesh({x[0], x[1], x[2]}, {{0, 1, 2}});
        Res3<Vec4> u;
        for (auto& s : u) s = to_conserved(Prim2{d(rng), Vec2(v(rng), v(rng)), d(rng)}, eos);
        bool fallback = true;
        const Res3<Vec4> r = n_scheme_system(x, m.normals[0], u, eos, &fallback);
        const Vec4 phi = total_residual(x, u, eos);
        CHECK((r[0] + r[1] + r[2] - phi).cwiseAbs().maxCoeff() < 1e-13 * (1.0 + phi.norm()));
        CHECK_FALSE(fallback);
    }
}

TEST_CASE("periodic residual distribution conserves the total") {
    const TriMesh m = structured_tri_mesh(16, 1.0, true, 0.2, 7);
    const Vec2 a(1.0, 0.5);
    for (RdScheme s : {RdScheme::n, RdScheme::lxf, RdScheme::limited}) {
        std::vector<double> u(m.num_vertices());
        for (int v = 0; v < m.num_vertices(); ++v) u[v] = std::sin(2 * M_PI * m.vertices[v].x()) + m.vertices[v].y();
        const double t0 = rd_total(m, u), dt = rd_stable_dt(m, a);
        for (int step = 0; step < 100; ++step) u = rd_step(m, a, u, dt, s);
        CHECK(std::abs(rd_total(m, u) - t0) < 1e-12);
    }
    const IdealGasEos eos(1.4);
    for (RdScheme s : {RdScheme::n, RdScheme::lxf, RdScheme::limited}) {
        std::vector<Vec4> u = smooth_euler(m, eos);
        const Vec4 t0 = rd_total(m, u);
        for (int step = 0; step < 100; ++step) u = rd_step(m, u, rd_stable_dt(m, u, eos), s, eos);
        CHECK((rd_total(m, u) - t0).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("scalar schemes keep random data inside its bounds") {
    const TriMesh m = structured_tri_mesh(16, 1.0, true, 0.25, 9);
    const Vec2 a(1.0, 0.5);
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> d(0.0, 1.0);
    for (RdScheme s : {RdScheme::n, RdScheme::lxf, RdScheme::limited}) {
        std::vector<double> u(m.num_vertices());
        for (double& v : u) v = d(rng);
        const double dt = rd_stable_dt(m, a, 0.4);
        for (int step = 0; step < 500; ++step) u = rd_step(m, a, u, dt, s);
        CHECK(*std::min_element(u.begin(), u.end()) >= -1e-12);
        CHECK(*std::max_element(u.begin(), u.end()) <= 1.0 + 1e-12);
    }
}

TEST_CASE("steady advection: limited scheme is second order, N first order") {
    const double lim16 = steady_error(16, RdScheme::limited);
    const double lim32 = steady_error(32, RdScheme::limited);
    const double lim64 = steady_error(64, RdScheme::limited);
    CHECK(std::log2(lim16 / lim32) >= 1.7);
    CHECK(std::log2(lim32 / lim64) >= 1.7);
    const double n32 = steady_error(32, RdScheme::n), n64 = steady_error(64, RdScheme::n);
    const double order = std::log2(n32 / n64);
    CHECK(order > 0.7);
    CHECK(order < 1.3);
}

TEST_CASE("fixed vertices are not updated") {
    const TriMesh m = structured_tri_mesh(4, 1.0, false);
    std::vector<double> u(m.num_vertices());
    for (int v = 0; v < m.num_vertices(); ++v) u[v] = m.vertices[v].x();
    std::vector<char> fixed(m.num_vertices(), 1);
    const auto out = rd_step(m, Vec2(1.0, 0.0), u, 0.01, RdScheme::n, Exec::parallel, &fixed);
    CHECK(out == u);
}

TEST_CASE("Euler step reports the vertex that leaves the domain") {
    const IdealGasEos eos(1.4);
    const TriMesh m = structured_tri_mesh(8, 1.0, true);
    std::vector<Vec4> u(m.num_vertices(), to_conserved(Prim2{1.0, Vec2::Zero(), 1.0}, eos));
    u[10] = to_conserved(Prim2{100.0, Vec2(20.0, 0.0), 1000.0}, eos);
    const double dt = rd_stable_dt(m, u, eos);
    try {
        rd_step(m, u, 50.0 * dt, RdScheme::lxf, eos);
        FAIL("expected DomainError");
    } catch (const DomainError& e) {
        CHECK(std::string(e.what()).find("vertex") != std::string::npos);
    }
    CHECK_THROWS_AS(rd_step(m, std::vector<Vec4>(3, u[0]), dt, RdScheme::n, eos), ArgumentError);
}
