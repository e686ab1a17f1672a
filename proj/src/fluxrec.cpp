#include "rfv/fluxrec.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>

namespace rfv {

Eigen::MatrixXd graph_laplacian_pinv(const OrientedGraph& graph) {
    const auto comps = graph.components();
    if (comps.size() != 1) {
        std::ostringstream msg;
        msg << "graph '" << graph.name << "' is disconnected:";
        for (const auto& c : comps) {
            msg << " {";
            for (std::size_t i = 0; i < c.size(); ++i) msg << (i ? "," : "") << c[i];
            msg << "}";
        }
        throw ArgumentError(msg.str());
    }
    const int n = graph.num_nodes;
    const Eigen::MatrixXd j = Eigen::MatrixXd::Constant(n, n, 1.0 / n);
    const Eigen::MatrixXd m = graph.laplacian() + j;
    return Eigen::MatrixXd(m.llt().solve(Eigen::MatrixXd::Identity(n, n))) - j;
}

Eigen::MatrixXd circulant_laplacian_pinv(int k) {
    if (k < 3) throw ArgumentError("circulant_laplacian_pinv needs K >= 3");
    const double two_pi = 2.0 * std::numbers::pi;
    // First row only; the matrix is circulant and symmetric.
    Eigen::VectorXd row = Eigen::VectorXd::Zero(k);
    for (int d = 0; d < k; ++d) {
        double s = 0.0;
        for (int l = 1; l < k; ++l) {
            const double lambda = 2.0 - 2.0 * std::cos(two_pi * l / k);
            s += std::cos(two_pi * l * d / k) / lambda;
        }
        row(d) = s / k;
    }
    Eigen::MatrixXd p(k, k);
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j) p(i, j) = row((i - j + k) % k);
    }
    return p;
}

std::shared_ptr<const Eigen::MatrixXd> cached_pinv(const OrientedGraph& graph) {
    using Key = std::pair<int, std::vector<std::pair<int, int>>>;
    static std::mutex mutex;
    static std::map<Key, std::shared_ptr<const Eigen::MatrixXd>> cache;
    Key key{graph.num_nodes, graph.edges};
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    auto p = std::make_shared<const Eigen::MatrixXd>(graph_laplacian_pinv(graph));
    cache.emplace(std::move(key), p);
    return p;
}

Eigen::VectorXd RecoveredFluxes::flux(int a, int b) const {
    for (int e = 0; e < graph.num_edges(); ++e) {
        if (graph.edges[e] == std::make_pair(a, b)) return values.row(e).transpose();
        if (graph.edges[e] == std::make_pair(b, a)) return -values.row(e).transpose();
    }
    throw ArgumentError("no edge between nodes " + std::to_string(a) + " and " + std::to_string(b));
}

double RecoveredFluxes::residual(const Eigen::MatrixXd& psi) const {
    return (graph.incidence() * values - psi).cwiseAbs().maxCoeff();
}

double compatibility_defect(const Eigen::MatrixXd& psi) {
    double worst = 0.0;
    for (int c = 0; c < psi.cols(); ++c) {
        worst = std::max(worst, std::abs(psi.col(c).sum()));
    }
    return worst;
}

namespace {

void require_compatible(const OrientedGraph& graph, const Eigen::MatrixXd& psi) {
    if (psi.rows() != graph.num_nodes) throw ArgumentError("residual count does not match the graph size");
    for (int c = 0; c < psi.cols(); ++c) {
        const double defect = std::abs(psi.col(c).sum());
        const double tol = kCompatAbsTol + kCompatRelTol * psi.col(c).cwiseAbs().sum();
        if (!(defect <= tol)) {
            std::ostringstream msg;
            msg << "incompatible residuals on graph '" << graph.name << "': component " << c << " sums to " << defect;
            throw ConservationError(msg.str(), defect);
        }
    }
}

}  // namespace

RecoveredFluxes recover_fluxes(const OrientedGraph& graph, const Eigen::MatrixXd& psi) {
    require_compatible(graph, psi);
    const auto p = cached_pinv(graph);
    return {graph, graph.incidence().transpose() * (*p * psi)};
}

RecoveredFluxes recover_fluxes_circulant(const OrientedGraph& graph, const Eigen::MatrixXd& psi) {
    if (!graph.circulant) throw ArgumentError("graph '" + graph.name + "' is not a node cycle");
    require_compatible(graph, psi);
    return {graph, graph.incidence().transpose() * (circulant_laplacian_pinv(graph.num_nodes) * psi)};
}

std::vector<Vec2> recover_normals(const OrientedGraph& graph, const std::vector<Vec2>& boundary_normals) {
    if (static_cast<int>(boundary_normals.size()) != graph.num_nodes) {
        throw ArgumentError("one boundary normal per node is required");
    }
    Eigen::MatrixXd psi(graph.num_nodes, 2);
    for (int i = 0; i < graph.num_nodes; ++i) psi.row(i) = -boundary_normals[i].transpose();
    const RecoveredFluxes r = recover_fluxes(graph, psi);
    std::vector<Vec2> n(graph.num_edges());
    for (int e = 0; e < graph.num_edges(); ++e) n[e] = r.values.row(e).transpose();
    return n;
}

NodeCycleFluxes residuals_to_node_cycle(const NodeCycleData& data, bool circulant_path) {
    const int k = static_cast<int>(data.own.size());
    if (k < 3 || static_cast<int>(data.next.size()) != k) throw ArgumentError("node cycle needs K >= 3 matching entries");
    const int m = static_cast<int>(data.own[0].size());
    NodeCycleFluxes out;
    out.s.resize(k, m);
    for (int i = 0; i < k; ++i) out.s.row(i) = (data.own[i] + data.next[i]).transpose();
    const OrientedGraph g = element_graph(GraphKind::node_cycle, k);
    out.fstar = circulant_path ? recover_fluxes_circulant(g, out.s) : recover_fluxes(g, out.s);
    return out;
}

// ---------------------------------------------------------------------------
// dG P1
// ---------------------------------------------------------------------------

namespace {

struct EdgePoint {
    int edge;
    Vec2 x, n;
    double weight;
    std::array<double, 3> phi;
};

std::vector<EdgePoint> edge_quadrature(const std::array<Vec2, 3>& x) {
    const double g = 0.5 / std::sqrt(3.0);
    std::vector<EdgePoint> pts;
    for (int k = 0; k < 3; ++k) {
        const Vec2 a = x[k], b = x[(k + 1) % 3];
        const Vec2 d = b - a;
        const double len = d.norm();
        for (double t : {0.5 - g, 0.5 + g}) {
            EdgePoint p{k, a + t * d, cross_ez(d) / len, 0.5 * len, {0.0, 0.0, 0.0}};
            p.phi[k] = 1.0 - t;
            p.phi[(k + 1) % 3] = t;
            pts.push_back(p);
        }
    }
    return pts;
}

}  // namespace

DgP1Residuals dg_p1_residuals(const DgP1Data& k, const FluxFn& f, const BoundaryFluxFn& fb) {
    const double area = 0.5 * cross(k.x[1] - k.x[0], k.x[2] - k.x[0]);
    if (!(area > 0.0)) throw GeometryError("dG element must be counterclockwise with positive area");
    const int m = static_cast<int>(k.u[0].size());
    DgP1Residuals r;
    r.u_mean = (k.u[0] + k.u[1] + k.u[2]) / 3.0;

    // Degree-2 interior rule.
    r.mean_flux_x = Eigen::VectorXd::Zero(m);
    r.mean_flux_y = Eigen::VectorXd::Zero(m);
    for (int q = 0; q < 3; ++q) {
        std::array<double, 3> b{1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0};
        b[q] = 2.0 / 3.0;
        const Eigen::VectorXd uq = b[0] * k.u[0] + b[1] * k.u[1] + b[2] * k.u[2];
        r.mean_flux_x += f(uq, Vec2(1.0, 0.0)) / 3.0;
        r.mean_flux_y += f(uq, Vec2(0.0, 1.0)) / 3.0;
    }

    r.boundary_moment = Eigen::MatrixXd::Zero(3, m);
    r.boundary_total = Eigen::VectorXd::Zero(m);
    for (const EdgePoint& p : edge_quadrature(k.x)) {
        const Eigen::VectorXd fh = fb(p.edge, p.x, p.n);
        r.boundary_total += p.weight * fh;
        for (int s = 0; s < 3; ++s) r.boundary_moment.row(s) += p.weight * p.phi[s] * fh.transpose();
    }

    r.phi.resize(3, m);
    for (int s = 0; s < 3; ++s) {
        const Vec2 e = k.x[(s + 2) % 3] - k.x[(s + 1) % 3];
        const Vec2 grad = Vec2(-e.y(), e.x()) / (2.0 * area);  // inward normal / (2|K|)
        const Eigen::VectorXd vol = area * (grad.x() * r.mean_flux_x + grad.y() * r.mean_flux_y);
        r.phi.row(s) = (r.boundary_moment.row(s).transpose() - vol).transpose();
    }
    return r;
}

Eigen::MatrixXd dg_p1_edge_flux(const DgP1Data& k, const FluxFn& f, const BoundaryFluxFn& fb) {
    const DgP1Residuals r = dg_p1_residuals(k, f, fb);
    const int m = static_cast<int>(k.u[0].size());
    std::array<Vec2, 3> n;
    for (int s = 0; s < 3; ++s) {
        const Vec2 e = k.x[(s + 2) % 3] - k.x[(s + 1) % 3];
        n[s] = Vec2(-e.y(), e.x());
    }
    Eigen::MatrixXd out(3, m);
    for (int e = 0; e < 3; ++e) {
        const int s = e, t = (e + 1) % 3;
        const Vec2 nss = -0.5 * (n[s] - n[t]);
        const Eigen::VectorXd v = nss.x() * r.mean_flux_x + nss.y() * r.mean_flux_y +
                                  (r.boundary_moment.row(s) - r.boundary_moment.row(t)).transpose();
        out.row(e) = (v / 3.0).transpose();
    }
    return out;
}

}  // namespace rfv
