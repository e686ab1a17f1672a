#include "oracles.hpp"
#include "rfv/fluxrec.hpp"

#include <doctest.h>

#include <random>

using namespace rfv;

namespace {

std::vector<OrientedGraph> graph_library() {
    std::vector<OrientedGraph> g{element_graph(GraphKind::triangle_p1), element_graph(GraphKind::triangle_p2),
                                 element_graph(GraphKind::quad_dg)};
    for (int k = 3; k <= 8; ++k) g.push_back(element_graph(GraphKind::node_cycle, k));
    return g;
}

Eigen::MatrixXd random_compatible(int rows, int cols, std::mt19937_64& rng) {
    std::normal_distribution<double> d;
    Eigen::MatrixXd psi(rows, cols);
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) psi(i, j) = d(rng);
    }
    psi.rowwise() -= psi.colwise().mean();
    return psi;
}

}  // namespace

TEST_CASE("Laplacian pseudoinverse properties") {
    for (const OrientedGraph& g : graph_library()) {
        const Eigen::MatrixXd l = g.laplacian();
        const Eigen::MatrixXd p = graph_laplacian_pinv(g);
        CHECK((l * p * l - l).norm() < 1e-12);
        CHECK((p * l * p - p).norm() < 1e-12);
        CHECK((p - p.transpose()).norm() < 1e-13);
        CHECK((p * Eigen::VectorXd::Ones(g.num_nodes)).norm() < 1e-13);
        // independent pseudoinverse
        const Eigen::MatrixXd ref = l.completeOrthogonalDecomposition().pseudoInverse();
        CHECK((p - ref).norm() < 1e-12);
    }
}

TEST_CASE("quad-dG pseudoinverse reproduces the published matrix") {
    // 72 L^+ for the 9-node lattice
    Eigen::Matrix<double, 9, 9> ref;
    ref << 39, -6, -15, -6, 7, -11, -11, 7, -4,
           -6, 39, -6, -15, 7, 7, -11, -11, -4,
           -15, -6, 39, -6, -11, 7, 7, -11, -4,
           -6, -15, -6, 39, -11, -11, 7, 7, -4,
           7, 7, -11, -11, 26, -4, -10, -4, 0,
           -11, 7, 7, -11, -4, 26, -4, -10, 0,
           -11, -11, 7, 7, -10, -4, 26, -4, 0,
           7, -11, -11, 7, -4, -10, -4, 26, 0,
           -4, -4, -4, -4, 0, 0, 0, 0, 16;
    const Eigen::MatrixXd p = graph_laplacian_pinv(element_graph(GraphKind::quad_dg));
    CHECK((72.0 * p - ref).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("circulant closed form equals the generic pseudoinverse") {
    for (int k = 3; k <= 12; ++k) {
        const Eigen::MatrixXd a = circulant_laplacian_pinv(k);
        const Eigen::MatrixXd b = graph_laplacian_pinv(element_graph(GraphKind::node_cycle, k));
        CHECK((a - b).cwiseAbs().maxCoeff() < 1e-12);
    }
    CHECK_THROWS_AS(circulant_laplacian_pinv(2), ArgumentError);
}

TEST_CASE("recovered fluxes solve A f = psi with minimum norm") {
    std::mt19937_64 rng(3);
    for (const OrientedGraph& g : graph_library()) {
        const Eigen::MatrixXd a = g.incidence();
        const Eigen::MatrixXd a_pinv = a.completeOrthogonalDecomposition().pseudoInverse();
        for (int trial = 0; trial < 200; ++trial) {
            const Eigen::MatrixXd psi = random_compatible(g.num_nodes, 2, rng);
            const RecoveredFluxes r = recover_fluxes(g, psi);
            CHECK(r.residual(psi) < 1e-12);
            CHECK((r.values - a_pinv * psi).cwiseAbs().maxCoeff() < 1e-12);
            if (g.circulant) {
                const RecoveredFluxes c = recover_fluxes_circulant(g, psi);
                CHECK((c.values - r.values).cwiseAbs().maxCoeff() < 1e-12);
            }
        }
    }
}

TEST_CASE("P1 flux for psi = (1, 0, -1)") {
    Eigen::MatrixXd psi(3, 1);
    psi << 1.0, 0.0, -1.0;
    const RecoveredFluxes r = recover_fluxes(element_graph(GraphKind::triangle_p1), psi);
    CHECK(r.values(0, 0) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(r.values(1, 0) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(r.values(2, 0) == doctest::Approx(-2.0 / 3.0).epsilon(1e-14));
    CHECK(r.flux(1, 0)(0) == doctest::Approx(-1.0 / 3.0));
    CHECK(r.flux(0, 2)(0) == doctest::Approx(2.0 / 3.0));
    CHECK_THROWS_AS(r.flux(0, 0), ArgumentError);
}

TEST_CASE("incompatible residuals and disconnected graphs are rejected") {
    Eigen::MatrixXd psi(3, 1);
    psi << 1.0, 0.0, 0.0;
    CHECK(compatibility_defect(psi) == doctest::Approx(1.0));
    try {
        recover_fluxes(element_graph(GraphKind::triangle_p1), psi);
        FAIL("expected ConservationError");
    } catch (const ConservationError& e) {
        CHECK(e.defect() == doctest::Approx(1.0));
    }
    OrientedGraph split;
    split.name = "split";
    split.num_nodes = 4;
    split.edges = {{0, 1}, {2, 3}};
    CHECK_THROWS_AS(graph_laplacian_pinv(split), ArgumentError);
    CHECK_THROWS_AS(recover_fluxes(element_graph(GraphKind::triangle_p1), Eigen::MatrixXd::Zero(4, 1)),
                    ArgumentError);
}

TEST_CASE("pseudoinverse cache shares one matrix per topology") {
    const OrientedGraph g = element_graph(GraphKind::node_cycle, 6);
    const auto a = cached_pinv(g);
    const auto b = cached_pinv(element_graph(GraphKind::node_cycle, 6));
    CHECK(a.get() == b.get());
    CHECK(cached_pinv(element_graph(GraphKind::node_cycle, 7)).get() != a.get());
}

TEST_CASE("node cycle: half-face fluxes from cell totals") {
    std::mt19937_64 rng(4);
    std::normal_distribution<double> d;
    for (int k = 3; k <= 8; ++k) {
        NodeCycleData data;
        Eigen::VectorXd sum = Eigen::VectorXd::Zero(4);
        for (int i = 0; i < k; ++i) {
            Eigen::VectorXd a(4), b(4);
            for (int c = 0; c < 4; ++c) {
                a(c) = d(rng);
                b(c) = d(rng);
            }
            data.own.push_back(a);
            data.next.push_back(b);
            sum += a + b;
        }
        data.own[0] -= sum;
        const NodeCycleFluxes fast = residuals_to_node_cycle(data, true);
        const NodeCycleFluxes slow = residuals_to_node_cycle(data, false);
        CHECK((fast.fstar.values - slow.fstar.values).cwiseAbs().maxCoeff() < 1e-12);
        CHECK(fast.fstar.residual(fast.s) < 1e-12);
    }
    NodeCycleData bad;
    for (int i = 0; i < 4; ++i) {
        bad.own.push_back(Eigen::VectorXd::Ones(1));
        bad.next.push_back(Eigen::VectorXd::Zero(1));
    }
    CHECK_THROWS_AS(residuals_to_node_cycle(bad), ConservationError);
}

TEST_CASE("dG P1 residuals and edge fluxes") {
    std::mt19937_64 rng(5);
    // Burgers in x, linear advection in y: quadratic flux, integrated exactly
    // by the element rules.
    const FluxFn f = [](const Eigen::VectorXd& u, const Vec2& n) {
        Eigen::VectorXd r(1);
        r(0) = 0.5 * u(0) * u(0) * n.x() + 0.7 * u(0) * n.y();
        return r;
    };
    const OrientedGraph g = element_graph(GraphKind::triangle_p1);
    for (int trial = 0; trial < 50; ++trial) {
        DgP1Data k;
        k.x = oracle::random_triangle(rng);
        std::uniform_real_distribution<double> d(-1.0, 1.0);
        for (auto& u : k.u) u = Eigen::VectorXd::Constant(1, d(rng));
        const double c0 = d(rng), c1 = d(rng);
        // outer trace: a smooth field, quadratic in x so the edge rule is exact
        const BoundaryFluxFn fb = [&](int, const Vec2& x, const Vec2& n) {
            Eigen::VectorXd r(1);
            const double u = c0 + c1 * x.x();
            r(0) = 0.5 * u * u * n.x() + 0.7 * u * n.y();
            return r;
        };
        const DgP1Residuals r = dg_p1_residuals(k, f, fb);
        // sum of residuals equals the boundary integral
        CHECK(std::abs(r.phi.sum() - r.boundary_total(0)) < 1e-13);

        // volume term against a high-order rule
        std::vector<Vec2> pts;
        std::vector<double> w;
        oracle::triangle_rule(k.x, 6, pts, w);
        const double area = oracle::shoelace({k.x[0], k.x[1], k.x[2]});
        for (int s = 0; s < 3; ++s) {
            const Vec2 e = k.x[(s + 2) % 3] - k.x[(s + 1) % 3];
            const Vec2 grad(-e.y() / (2.0 * area), e.x() / (2.0 * area));
            double vol = 0.0;
            for (std::size_t q = 0; q < pts.size(); ++q) {
                // barycentric coordinates of the point
                std::array<double, 3> b;
                for (int j = 0; j < 3; ++j) {
                    const Vec2 a1 = k.x[(j + 1) % 3], a2 = k.x[(j + 2) % 3];
                    b[j] = 0.5 * ((a1 - pts[q]).x() * (a2 - pts[q]).y() - (a1 - pts[q]).y() * (a2 - pts[q]).x()) / area;
                }
                const double uq = b[0] * k.u[0](0) + b[1] * k.u[1](0) + b[2] * k.u[2](0);
                vol += w[q] * (grad.x() * 0.5 * uq * uq + grad.y() * 0.7 * uq);
            }
            CHECK(r.phi(s, 0) == doctest::Approx(r.boundary_moment(s, 0) - vol).epsilon(1e-12));
        }

        // edge fluxes recover Phi - Phi^K/3
        const Eigen::MatrixXd fe = dg_p1_edge_flux(k, f, fb);
        Eigen::MatrixXd psi = r.phi;
        psi.array() -= r.boundary_total(0) / 3.0;
        CHECK((g.incidence() * fe - psi).cwiseAbs().maxCoeff() < 1e-13);
        CHECK((fe - recover_fluxes(g, psi).values).cwiseAbs().maxCoeff() < 1e-13);
    }
    DgP1Data cw;
    cw.x = {Vec2(0, 0), Vec2(0, 1), Vec2(1, 0)};
    for (auto& u : cw.u) u = Eigen::VectorXd::Zero(1);
    CHECK_THROWS_AS(dg_p1_residuals(cw, f, [](int, const Vec2&, const Vec2&) { return Eigen::VectorXd::Zero(1); }),
                    GeometryError);
}
