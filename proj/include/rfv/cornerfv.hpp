/// @file cornerfv.hpp
/// @brief Eulerian finite volumes on polygons with corner fluxes.
#pragma once

#include "rfv/entropyfix.hpp"
#include "rfv/mesh.hpp"
#include "rfv/physics.hpp"

#include <vector>

namespace rfv {

enum class CornerBc { transmissive, wall };
enum class CornerPath { flux, residual };

/// Cells around one node. Boundary fans get a ghost corner with
/// l n = -sum l_pc n_pc so that the fan closes.
struct NodeFan {
    std::vector<std::pair<int, int>> corners;  ///< (cell, local vertex)
    std::vector<Vec2> ln;                      ///< l_pc n_pc, ghost last when boundary
    bool boundary = false;
};

struct CornerFvSetup {
    PolyMesh mesh;
    CornerGeometry geometry;
    std::vector<NodeFan> fans;
    std::vector<double> volume;
};

/// Throws GeometryError for bad meshes.
CornerFvSetup make_cornerfv_setup(PolyMesh mesh);

/// Fluxes of one node: lf[c] = l_pc fhat_pc for every entry of the fan.
struct NodeFluxes {
    std::vector<Vec4> lf;
    double alpha = 0.0;
};

/// l fhat = mean_c f(u_c).(l n) + alpha_p (u_c - u_mean),
/// alpha_p = max_c (|v_c.n_pc| + a_c) * max_c l_pc.
NodeFluxes dissipative_corner_flux(const std::vector<Vec4>& u, const std::vector<Vec2>& ln, const IdealGasEos& eos);

struct CornerResiduals {
    std::vector<Vec4> phi;  ///< Phi_c^p = l fhat - f(u_c).(l n)
    Vec4 total;             ///< Phi^{omega_p} = sum_c f(u_c).(-l n)
};

/// Throws ConservationError naming the node when |sum lf| > 1e-10 (scaled).
CornerResiduals corner_residuals(int node, const std::vector<Vec4>& u, const std::vector<Vec2>& ln,
                                 const std::vector<Vec4>& lf, const IdealGasEos& eos);

/// Fan states including the ghost for boundary fans.
std::vector<Vec4> fan_states(const NodeFan& fan, const std::vector<Vec4>& u, CornerBc bc);

/// dt = cfl min_c |omega_c| / sum_{p in c} alpha_p.
double cornerfv_stable_dt(const CornerFvSetup& s, const std::vector<Vec4>& u, CornerBc bc, const IdealGasEos& eos,
                          double cfl = 0.5);

struct CornerStepInfo {
    std::vector<NodeEntropyReport> entropy;  ///< one per node; alpha stays 0 without the correction
};

/// Forward Euler: |omega_c| du_c/dt = -sum_p l fhat_pc (flux path) or
/// -sum_p Phi_c^p (residual path). Throws DomainError naming the first
/// out-of-domain cell.
std::vector<Vec4> cornerfv_step(const CornerFvSetup& s, const std::vector<Vec4>& u, double dt, CornerBc bc,
                                const IdealGasEos& eos, CornerPath path = CornerPath::flux,
                                Exec exec = Exec::parallel, bool entropy_fix = false,
                                CornerStepInfo* info = nullptr);

Vec4 cornerfv_total(const CornerFvSetup& s, const std::vector<Vec4>& u);

}  // namespace rfv
