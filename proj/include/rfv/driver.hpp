/// @file driver.hpp
/// @brief Batch driver: run configuration, problem setup, time loops, logs and snapshots.
#pragma once

#include "rfv/cornerfv.hpp"
#include "rfv/lagrange.hpp"
#include "rfv/rd2d.hpp"
#include "rfv/riemann.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace rfv {

struct RunConfig {
    std::string problem;               ///< sod1d, advection2d, sod-lagrangian-strip, corner-fv-periodic, flux-recovery-selftest
    std::string scheme;                ///< empty: problem default
    double cfl = 0.0;                  ///< 0: problem default
    double t_end = 0.0;                ///< 0: problem default
    double gamma = 1.4;
    int n = 0;                         ///< resolution, 0: problem default
    int ny = 1;                        ///< cells across the Lagrangian strip
    std::string mesh;                  ///< optional mesh file (advection2d, corner-fv-periodic)
    double jitter = 0.0;
    std::uint64_t seed = 1;
    std::string initial;               ///< advection2d: sine or random
    double ax = 1.0, ay = 0.5;         ///< advection velocity
    std::string integrator = "euler";  ///< euler or rk2 (sod1d)
    int output_every = 0;              ///< snapshot cadence in steps, 0: final only
    std::string output_dir = ".";
    bool entropy_fix = false;
    std::string gcl_convention = "midpoint";
    int max_steps = 1000000;
};

/// Parses a flat JSON object. Unknown keys and out-of-range values raise
/// ConfigError naming the field.
RunConfig parse_config(const std::string& json_text);
/// Reads a config file; a relative mesh path is taken relative to the file.
RunConfig load_config(const std::string& path);
/// Fills problem defaults and validates; throws ConfigError.
RunConfig resolve_config(RunConfig cfg);

struct RunResult {
    int steps = 0;
    double t = 0.0;
    double l1 = -1.0;     ///< error against the exact solution when one exists
    bool passed = true;   ///< selftest verdict
    std::map<std::string, double> summary;
};

/// Runs the problem, writing solution.csv, invariants.csv and VTK snapshots
/// into output_dir. The invariant log is flushed line by line; on solver
/// errors the last valid state is written before rethrowing.
RunResult run(const RunConfig& cfg, std::ostream& out);

struct ConvergenceRow {
    int n = 0;
    double h = 0.0;
    double l1 = 0.0;
    double order = 0.0;  ///< 0 on the first level
};

/// Runs the problem on every level and returns the table (also written to
/// convergence.csv). Throws ArgumentError for fewer than 2 levels.
std::vector<ConvergenceRow> convergence(RunConfig cfg, const std::vector<int>& levels, std::ostream& out);

/// Flux recovery on every element graph with random compatible data;
/// returns the largest |A f - psi| and the largest circulant/generic difference.
struct SelftestResult {
    double max_residual = 0.0;
    double max_circulant_gap = 0.0;
    std::map<std::string, double> per_graph;
};
SelftestResult flux_recovery_selftest(int samples = 1000, std::uint64_t seed = 7);

// -- Problem data shared with the tests ---------------------------------------

/// Sod data on [0,1] with the diaphragm at 0.5.
inline constexpr Prim1 kSodLeft{1.0, 0.0, 1.0};
inline constexpr Prim1 kSodRight{0.125, 0.0, 0.1};

/// Cell-averaged-free L1 error sum |rho_i - rho_exact(x_i)| dx_i.
double sod_l1_error(const Grid1D& grid, const std::vector<Vec3>& u, double t, const IdealGasEos& eos);

/// Smooth periodic profile on the unit square.
double advection_profile(const Vec2& x);

// -- Output ---------------------------------------------------------------------

/// Legacy VTK ASCII with one point per cell corner (periodic meshes stay unwrapped).
void write_vtk(const std::string& path, const PolyMesh& mesh, const std::map<std::string, std::vector<double>>& cell_data,
               const std::vector<Vec2>& node_vectors = {}, const std::string& vector_name = "v");
void write_vtk(const std::string& path, const TriMesh& mesh, const std::vector<double>& node_data,
               const std::string& name = "u");

}  // namespace rfv
