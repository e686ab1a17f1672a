/// @file lagrange.hpp
/// @brief Cell-centered Lagrangian hydrodynamics on moving polygons with a
/// node-based solver for the grid velocity.
#pragma once

#include "rfv/fluxrec.hpp"
#include "rfv/mesh.hpp"
#include "rfv/physics.hpp"
#include "rfv/riemann.hpp"

#include <vector>

namespace rfv {

/// Half-face seen from a node: left cell state, right cell state (ignored on
/// walls), unit normal out of the left cell and the half-face length.
struct HalfFace {
    LagState left, right;
    Vec2 n;
    double length = 0.0;
    bool wall = false;
};

struct NodalSolution {
    Vec2 v = Vec2::Zero();
    std::vector<double> lambda_l, lambda_r;
    std::vector<double> p_star_l, p_star_r;  ///< p*_c = p_c - lambda_c (v.n_c - v_c.n_c)
    double cond = 1.0;                       ///< condition number of the nodal matrix (1 at walls)
    int refreshes = 0;
};

/// Solves [sum l (lambda_l + lambda_r) n n^T] v = sum l (lambda_l v_l.n + lambda_r v_r.n - (p_r - p_l)) n.
/// The wave speeds start from v = mean neighbour velocity and get one
/// refresh, then more while the positivity rule fails (at most `max_refresh`).
/// Wall faces are closed by v.n_wall = 0: tangent projection on a straight
/// wall, v = 0 at a corner. Throws SolverError for a singular interior matrix.
NodalSolution nodal_solver(const std::vector<HalfFace>& faces, const IdealGasEos& eos, double k = kWaveSpeedSafety,
                           int max_refresh = 8);

/// |sum_f l (p*_l - p*_r) n| over the interior faces.
double node_conservation_defect(const std::vector<HalfFace>& faces, const NodalSolution& s);

/// f = (-v.n, p* n, p* v.n).
Vec4 subface_flux(const Vec2& v_node, const Vec2& n, double p_star);

/// DIV_c(q) = 1/|omega_c| sum_p l_pc n_pc . q_p.
double discrete_divergence(const PolyMesh& mesh, const CornerGeometry& g, int c, const std::vector<Vec2>& q);

enum class GclConvention { current, midpoint };
GclConvention parse_gcl_convention(const std::string& name);

struct LagrangeSystem {
    PolyMesh mesh;
    std::vector<double> mass;
    std::vector<LagState> state;
};

/// m_c = |omega_c| / tau_c. Throws DomainError for out-of-domain states.
LagrangeSystem make_lagrange_system(PolyMesh mesh, std::vector<LagState> state);

/// Subface entry of a node: cell corner, side and the values used in the update.
struct SubfaceEntry {
    int cell = -1, local = -1, side = -1;
    double length = 0.0;
    Vec2 n;
    double lambda = 0.0;
    double p_star = 0.0;
};

struct NodePhase {
    std::vector<Vec2> v;                             ///< node velocities
    std::vector<std::vector<SubfaceEntry>> entries;  ///< per node
    std::vector<std::vector<HalfFace>> faces;        ///< per node, nodal solver input
    std::vector<NodalSolution> solutions;
    std::vector<char> boundary;
};

/// All nodal solves. Parallel over nodes.
NodePhase lagrange_nodal_phase(const LagrangeSystem& sys, const IdealGasEos& eos, Exec exec = Exec::parallel);

/// cfl * min_c m_c / sum l lambda_c.
double lagrange_stable_dt(const LagrangeSystem& sys, const NodePhase& ph, double cfl = 0.9);

struct LagStepReport {
    double dt = 0.0;
    double gcl_current = 0.0;   ///< max ||omega^{n+1}| - |omega^n| - dt sum ln^n.v_p|
    double gcl_midpoint = 0.0;  ///< max ||omega^{n+1}| - |omega^n| - dt sum ½(ln^n + ln^{n+1}).v_p|
    double max_node_defect = 0.0;
    Vec2 momentum_change = Vec2::Zero();
    Vec2 wall_impulse = Vec2::Zero();  ///< sum over boundary nodes of -dt sum l p* n
    double energy_change = 0.0;
    double min_tau = 0.0, min_eps = 0.0;
    double gcl(GclConvention c) const { return c == GclConvention::current ? gcl_current : gcl_midpoint; }
};

/// One explicit step with geometry at t^n. Throws TimeStepError if dt is above
/// the bound at cfl 1, GeometryError on tangled cells and DomainError on loss
/// of positivity. `ph` may be passed when the nodal phase is already known.
LagStepReport lagrange_step(LagrangeSystem& sys, double dt, const IdealGasEos& eos, Exec exec = Exec::parallel,
                            const NodePhase* ph = nullptr);

/// Unique half-face fluxes around an interior node from the cell totals S_k,
/// cells in counterclockwise order. Throws ArgumentError at boundary nodes.
struct HalfFaceCharacterization {
    std::vector<int> cells;  ///< cyclic order
    NodeCycleFluxes fluxes;
    std::vector<Vec4> physical;  ///< flux of cell k-1 through face k
};
HalfFaceCharacterization halfface_flux_characterization(const LagrangeSystem& sys, const NodePhase& ph, int node);

Vec2 total_momentum(const LagrangeSystem& sys);
double total_energy(const LagrangeSystem& sys);

}  // namespace rfv
