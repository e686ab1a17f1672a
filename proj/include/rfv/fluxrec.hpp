/// @file fluxrec.hpp
/// @brief Conservative flux recovery on oriented graphs: f = A^T L^+ psi.
#pragma once

#include "rfv/mesh.hpp"

#include <array>
#include <functional>
#include <memory>
#include <vector>

namespace rfv {

/// Pseudoinverse of the graph Laplacian: (L + 11^T/n)^{-1} - 11^T/n.
/// Throws ArgumentError listing the components if the graph is disconnected.
Eigen::MatrixXd graph_laplacian_pinv(const OrientedGraph& graph);

/// Closed form for the K-cycle: sum over l = 1..K-1 of e_l e_l^* / (2 - 2 cos(2 pi l / K)).
Eigen::MatrixXd circulant_laplacian_pinv(int k);

/// Shared read-only pseudoinverse for a graph topology (computed once).
std::shared_ptr<const Eigen::MatrixXd> cached_pinv(const OrientedGraph& graph);

/// Absolute + relative tolerance on the sum of residuals.
inline constexpr double kCompatAbsTol = 1e-10;
inline constexpr double kCompatRelTol = 1e-10;

/// Edge fluxes, one row per directed edge, one column per component.
/// flux(a, b) returns the value for the edge a -> b and its negative for b -> a.
struct RecoveredFluxes {
    OrientedGraph graph;
    Eigen::MatrixXd values;

    Eigen::VectorXd flux(int a, int b) const;
    /// max |A f - psi| over all entries.
    double residual(const Eigen::MatrixXd& psi) const;
};

/// Largest |sum psi| over the components.
double compatibility_defect(const Eigen::MatrixXd& psi);

/// Minimum-norm solution of A f = psi. psi has one row per node.
/// Throws ConservationError when psi does not sum to zero.
RecoveredFluxes recover_fluxes(const OrientedGraph& graph, const Eigen::MatrixXd& psi);

/// Same on a node cycle using circulant_laplacian_pinv.
RecoveredFluxes recover_fluxes_circulant(const OrientedGraph& graph, const Eigen::MatrixXd& psi);

/// Normals of the recovered control volumes from the outward boundary
/// normals N_sigma: n = A^T L^+ (-N). Result has one entry per edge.
std::vector<Vec2> recover_normals(const OrientedGraph& graph, const std::vector<Vec2>& boundary_normals);

// ---------------------------------------------------------------------------
// Node cycles
// ---------------------------------------------------------------------------

/// Half-face data around a node with K cells in cyclic order. Face k separates
/// cell k-1 and cell k. own[k] = l_k f_{k,k} (flux of cell k on face k),
/// next[k] = l_{k+1} f_{k+1,k} (flux of cell k on face k+1); lengths included.
struct NodeCycleData {
    std::vector<Eigen::VectorXd> own, next;
};

struct NodeCycleFluxes {
    Eigen::MatrixXd s;       ///< S_k = own[k] + next[k]
    RecoveredFluxes fstar;   ///< f*_k on face k, oriented from cell k-1 to cell k
};

/// Recovers the unique half-face fluxes f* = A^T L^+ S. Throws
/// ConservationError when sum_k S_k does not vanish.
NodeCycleFluxes residuals_to_node_cycle(const NodeCycleData& data, bool circulant_path = true);

// ---------------------------------------------------------------------------
// dG P1 on a triangle
// ---------------------------------------------------------------------------

/// f(u).n for a (not necessarily unit) vector n.
using FluxFn = std::function<Eigen::VectorXd(const Eigen::VectorXd& u, const Vec2& n)>;
/// Numerical normal flux on edge k (from vertex k to k+1) at point x with unit outward normal.
using BoundaryFluxFn = std::function<Eigen::VectorXd(int edge, const Vec2& x, const Vec2& n)>;

struct DgP1Data {
    std::array<Vec2, 3> x;                ///< counterclockwise vertices
    std::array<Eigen::VectorXd, 3> u;     ///< nodal values
};

/// Residuals Phi_sigma = -int grad(phi_sigma).f(u_h) + oint phi_sigma fhat_n, and
/// the boundary moments oint phi_sigma fhat_n and oint fhat_n (one row per vertex).
struct DgP1Residuals {
    Eigen::MatrixXd phi;
    Eigen::MatrixXd boundary_moment;
    Eigen::VectorXd boundary_total;
    Eigen::VectorXd mean_flux_x, mean_flux_y;  ///< int_K f(u_h) / |K|, per direction
    Eigen::VectorXd u_mean;
};

DgP1Residuals dg_p1_residuals(const DgP1Data& k, const FluxFn& f, const BoundaryFluxFn& fb);

/// Edge fluxes for edges (12, 23, 31), one row per edge:
/// [(int_K f / |K|).n_{ss'} + oint (phi_s - phi_s') fhat_n] / 3 with
/// n_{ss'} = -|K| grad(phi_s - phi_s'). This is (Phi_s - Phi_s')/3, the
/// minimum-norm solution of A f = Phi - Phi^K/3.
Eigen::MatrixXd dg_p1_edge_flux(const DgP1Data& k, const FluxFn& f, const BoundaryFluxFn& fb);

}  // namespace rfv
