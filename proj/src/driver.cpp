#include "rfv/driver.hpp"

#include "rfv/entropyfix.hpp"
#include "rfv/fluxrec.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <memory>
#include <numbers>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

namespace rfv {

namespace fs = std::filesystem;
using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

namespace {

const std::set<std::string> kProblems{"sod1d", "advection2d", "sod-lagrangian-strip", "corner-fv-periodic",
                                      "flux-recovery-selftest"};

template <class T>
T field(const json& j, const char* key) {
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(std::string("field '") + key + "' has the wrong type");
    }
}

double number(const json& j, const char* key) {
    if (!j.at(key).is_number()) throw ConfigError(std::string("field '") + key + "' must be a number");
    return j.at(key).get<double>();
}

int integer(const json& j, const char* key) {
    if (!j.at(key).is_number_integer()) throw ConfigError(std::string("field '") + key + "' must be an integer");
    return j.at(key).get<int>();
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    RunConfig c;
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string& k = it.key();
        const char* key = k.c_str();
        if (k == "problem") c.problem = field<std::string>(j, key);
        else if (k == "scheme") c.scheme = field<std::string>(j, key);
        else if (k == "cfl") c.cfl = number(j, key);
        else if (k == "t_end") c.t_end = number(j, key);
        else if (k == "gamma") c.gamma = number(j, key);
        else if (k == "n") c.n = integer(j, key);
        else if (k == "ny") c.ny = integer(j, key);
        else if (k == "mesh") c.mesh = field<std::string>(j, key);
        else if (k == "jitter") c.jitter = number(j, key);
        else if (k == "seed") c.seed = field<std::uint64_t>(j, key);
        else if (k == "initial") c.initial = field<std::string>(j, key);
        else if (k == "ax") c.ax = number(j, key);
        else if (k == "ay") c.ay = number(j, key);
        else if (k == "integrator") c.integrator = field<std::string>(j, key);
        else if (k == "output_every") c.output_every = integer(j, key);
        else if (k == "output_dir") c.output_dir = field<std::string>(j, key);
        else if (k == "entropy_fix") c.entropy_fix = field<bool>(j, key);
        else if (k == "gcl_convention") c.gcl_convention = field<std::string>(j, key);
        else if (k == "max_steps") c.max_steps = integer(j, key);
        else throw ConfigError("unknown config key '" + k + "'");
    }
    if (c.problem.empty()) throw ConfigError("field 'problem' is required");
    return resolve_config(c);
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    RunConfig c = parse_config(ss.str());
    // mesh paths are relative to the config file
    if (!c.mesh.empty() && fs::path(c.mesh).is_relative()) {
        c.mesh = (fs::path(path).parent_path() / c.mesh).string();
    }
    return c;
}

RunConfig resolve_config(RunConfig c) {
    if (!kProblems.count(c.problem)) throw ConfigError("field 'problem': unknown problem '" + c.problem + "'");
    auto defaults = [&](const char* scheme, double cfl, double t_end, int n) {
        if (c.scheme.empty()) c.scheme = scheme;
        if (c.cfl == 0.0) c.cfl = cfl;
        if (c.t_end == 0.0) c.t_end = t_end;
        if (c.n == 0) c.n = n;
    };
    std::set<std::string> schemes;
    if (c.problem == "sod1d") {
        defaults("rusanov", 0.5, 0.2, 400);
        schemes = {"rusanov", "roe", "simple"};
    } else if (c.problem == "advection2d") {
        defaults("n", 0.4, 0.5, 32);
        schemes = {"n", "lxf", "limited"};
        if (c.initial.empty()) c.initial = "sine";
        if (c.initial != "sine" && c.initial != "random") {
            throw ConfigError("field 'initial' must be 'sine' or 'random'");
        }
    } else if (c.problem == "sod-lagrangian-strip") {
        defaults("nodal", 0.9, 0.2, 400);
        schemes = {"nodal"};
    } else if (c.problem == "corner-fv-periodic") {
        defaults("corner", 0.5, 0.25, 32);
        schemes = {"corner", "corner-residual"};
    } else {
        defaults("pinv", 1.0, 1.0, 1000);
        schemes = {"pinv"};
    }
    if (!schemes.count(c.scheme)) {
        throw ConfigError("field 'scheme': '" + c.scheme + "' is not available for " + c.problem);
    }
    if (!(c.gamma > 1.0)) throw ConfigError("field 'gamma' must be > 1");
    if (!(c.cfl > 0.0) || c.cfl > 1.0) throw ConfigError("field 'cfl' must be in (0, 1]");
    if (!(c.t_end > 0.0)) throw ConfigError("field 't_end' must be positive");
    if (c.n < 2) throw ConfigError("field 'n' must be at least 2");
    if (c.ny < 1) throw ConfigError("field 'ny' must be at least 1");
    if (!(c.jitter >= 0.0) || c.jitter >= 0.45) throw ConfigError("field 'jitter' must be in [0, 0.45)");
    if (c.output_every < 0) throw ConfigError("field 'output_every' must be nonnegative");
    if (c.max_steps < 1) throw ConfigError("field 'max_steps' must be positive");
    if (c.integrator != "euler" && c.integrator != "rk2") throw ConfigError("field 'integrator' must be euler or rk2");
    if (c.integrator == "rk2" && (c.problem != "sod1d" || c.scheme == "simple")) {
        throw ConfigError("field 'integrator': rk2 is only available for the Eulerian sod1d schemes");
    }
    parse_gcl_convention(c.gcl_convention);
    return c;
}

// ---------------------------------------------------------------------------
// Output helpers
// ---------------------------------------------------------------------------

namespace {

class CsvWriter {
public:
    CsvWriter(const fs::path& path, const std::vector<std::string>& header) : out_(path) {
        if (!out_) throw ConfigError("cannot write '" + path.string() + "'");
        out_ << std::setprecision(17);
        for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
        out_ << '\n';
    }
    void row(const std::vector<double>& v) {
        for (std::size_t i = 0; i < v.size(); ++i) out_ << (i ? "," : "") << v[i];
        out_ << '\n';
        out_.flush();
    }

private:
    std::ofstream out_;
};

const std::vector<std::string> kInvariantHeader{"step", "t", "dt", "mass", "momentum_x", "momentum_y", "energy",
                                                "min_tau", "min_eps", "max_entropy_defect", "gcl_defect"};

struct Invariants {
    double mass = 0.0;
    Vec2 momentum = Vec2::Zero();
    double energy = 0.0;
    double min_tau = 0.0, min_eps = 0.0;
    double entropy_defect = 0.0, gcl = 0.0;
    std::vector<double> row(int step, double t, double dt) const {
        return {double(step), t, dt, mass, momentum.x(), momentum.y(), energy, min_tau, min_eps, entropy_defect, gcl};
    }
};

template <class Body, class Snapshot>
void guarded(Body&& body, Snapshot&& snapshot) {
    try {
        body();
    } catch (const Error&) {
        snapshot();
        throw;
    }
}

Vec4 embed(const Vec3& u) { return Vec4(u(0), u(1), 0.0, u(2)); }

/// max(0, w_l.phi_l + w_r.phi_r - [[g]]) over the interfaces.
double fv1d_entropy_defect(const std::vector<Vec3>& u, const InterfaceData<Vec3>& d, Bc1D bc,
                           const IdealGasEos& eos) {
    const int n = static_cast<int>(u.size());
    double worst = 0.0;
    for (int i = 1; i < n; ++i) {
        const EntropyEval el = entropy_pair(embed(u[i - 1]), eos), er = entropy_pair(embed(u[i]), eos);
        const double prod = el.w.dot(embed(d.fluct[i].phi_left)) + er.w.dot(embed(d.fluct[i].phi_right)) -
                            (er.g.x() - el.g.x());
        worst = std::max(worst, prod);
    }
    (void)bc;
    return worst;
}

// ---------------------------------------------------------------------------
// sod1d
// ---------------------------------------------------------------------------

RunResult run_sod1d(const RunConfig& c, const IdealGasEos& eos, std::ostream& out) {
    const fs::path dir(c.output_dir);
    const Grid1D grid = Grid1D::uniform(c.n, 0.0, 1.0);
    CsvWriter log(dir / "invariants.csv", kInvariantHeader);
    RunResult res;
    const Bc1D bc = Bc1D::transmissive;

    auto write_eulerian = [&](const std::vector<Vec3>& u) {
        CsvWriter sol(dir / "solution.csv", {"x", "rho", "v", "p"});
        for (int i = 0; i < grid.size(); ++i) {
            const Prim1 w = to_primitive(u[i], eos);
            sol.row({grid.center(i), w.rho, w.v, w.p});
        }
    };

    if (c.scheme == "simple") {
        std::vector<LagState> u(c.n);
        std::vector<double> mass(c.n);
        for (int i = 0; i < c.n; ++i) {
            const Prim1 w = grid.center(i) < 0.5 ? kSodLeft : kSodRight;
            u[i] = LagState::from_prim({w.rho, Vec2(w.v, 0.0), w.p}, eos);
            mass[i] = w.rho * grid.dx(i);
        }
        auto write_lag = [&](const std::vector<LagState>& s) {
            CsvWriter sol(dir / "solution.csv", {"x", "rho", "v", "p"});
            double x = 0.0;
            for (int i = 0; i < c.n; ++i) {
                const double dx = mass[i] * s[i].tau;
                sol.row({x + 0.5 * dx, 1.0 / s[i].tau, s[i].v.x(), pressure(s[i], eos)});
                x += dx;
            }
        };
        std::vector<LagState> last = u;
        guarded(
            [&] {
                while (res.t < c.t_end * (1.0 - 1e-14) && res.steps < c.max_steps) {
                    const double dt = std::min(lagrangian_stable_dt(mass, u, bc, eos, c.cfl), c.t_end - res.t);
                    last = u;
                    u = lagrangian1d_step(mass, u, dt, bc, eos, c.cfl);
                    res.t += dt;
                    ++res.steps;
                    Invariants inv;
                    inv.min_tau = inv.min_eps = std::numeric_limits<double>::infinity();
                    for (int i = 0; i < c.n; ++i) {
                        inv.mass += mass[i];
                        inv.momentum += mass[i] * u[i].v;
                        inv.energy += mass[i] * u[i].e;
                        inv.min_tau = std::min(inv.min_tau, u[i].tau);
                        inv.min_eps = std::min(inv.min_eps, u[i].eps());
                    }
                    log.row(inv.row(res.steps, res.t, dt));
                }
            },
            [&] { write_lag(last); });
        write_lag(u);
        double l1 = 0.0, x = 0.0;
        const ExactRiemann exact(kSodLeft, kSodRight, eos);
        for (int i = 0; i < c.n; ++i) {
            const double dx = mass[i] * u[i].tau;
            l1 += std::abs(1.0 / u[i].tau - exact.sample((x + 0.5 * dx - 0.5) / res.t).rho) * dx;
            x += dx;
        }
        res.l1 = l1;
    } else {
        const Scheme1D scheme = c.scheme == "roe" ? Scheme1D::roe : Scheme1D::rusanov;
        std::vector<Vec3> u(c.n);
        for (int i = 0; i < c.n; ++i) u[i] = to_conserved(grid.center(i) < 0.5 ? kSodLeft : kSodRight, eos);
        std::vector<Vec3> last = u;
        guarded(
            [&] {
                while (res.t < c.t_end * (1.0 - 1e-14) && res.steps < c.max_steps) {
                    const double dt = std::min(stable_dt(grid, u, eos, c.cfl), c.t_end - res.t);
                    last = u;
                    const double ent = fv1d_entropy_defect(u, interface_fluxes(u, scheme, bc, eos), bc, eos);
                    u = c.integrator == "rk2" ? fv1d_step_rk2(grid, u, dt, scheme, bc, eos, c.cfl)
                                              : fv1d_step(grid, u, dt, scheme, bc, eos, c.cfl);
                    res.t += dt;
                    ++res.steps;
                    Invariants inv;
                    inv.min_tau = inv.min_eps = std::numeric_limits<double>::infinity();
                    for (int i = 0; i < c.n; ++i) {
                        inv.mass += grid.dx(i) * u[i](0);
                        inv.momentum.x() += grid.dx(i) * u[i](1);
                        inv.energy += grid.dx(i) * u[i](2);
                        const Prim1 w = to_primitive(u[i], eos);
                        inv.min_tau = std::min(inv.min_tau, 1.0 / w.rho);
                        inv.min_eps = std::min(inv.min_eps, eos.internal_energy(w.rho, w.p));
                    }
                    inv.entropy_defect = ent;
                    log.row(inv.row(res.steps, res.t, dt));
                }
            },
            [&] { write_eulerian(last); });
        write_eulerian(u);
        res.l1 = sod_l1_error(grid, u, res.t, eos);
    }
    out << std::setprecision(17) << "L1(rho) = " << res.l1 << " at t = " << res.t << " after " << res.steps
        << " steps\n";
    return res;
}

// ---------------------------------------------------------------------------
// advection2d
// ---------------------------------------------------------------------------

RunResult run_advection2d(const RunConfig& c, std::ostream& out) {
    const fs::path dir(c.output_dir);
    const TriMesh mesh = c.mesh.empty() ? structured_tri_mesh(c.n, 1.0, true, c.jitter, c.seed) : read_tri_mesh(c.mesh);
    const Vec2 a(c.ax, c.ay);
    const RdScheme scheme = parse_rd_scheme(c.scheme);
    std::vector<double> u(mesh.num_vertices());
    std::mt19937_64 rng(c.seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int v = 0; v < mesh.num_vertices(); ++v) {
        u[v] = c.initial == "random" ? uni(rng) : advection_profile(mesh.vertices[v]);
    }
    CsvWriter log(dir / "invariants.csv", kInvariantHeader);
    RunResult res;
    const double dt0 = rd_stable_dt(mesh, a, c.cfl);
    double umin = *std::min_element(u.begin(), u.end()), umax = *std::max_element(u.begin(), u.end());
    auto write = [&](const std::vector<double>& s, const std::string& name) {
        CsvWriter sol(dir / "solution.csv", {"x", "y", "u"});
        for (int v = 0; v < mesh.num_vertices(); ++v) sol.row({mesh.vertices[v].x(), mesh.vertices[v].y(), s[v]});
        write_vtk((dir / name).string(), mesh, s, "u");
    };
    std::vector<double> last = u;
    guarded(
        [&] {
            while (res.t < c.t_end * (1.0 - 1e-14) && res.steps < c.max_steps) {
                const double dt = std::min(dt0, c.t_end - res.t);
                last = u;
                u = rd_step(mesh, a, u, dt, scheme);
                res.t += dt;
                ++res.steps;
                Invariants inv;
                inv.mass = rd_total(mesh, u);
                umin = std::min(umin, *std::min_element(u.begin(), u.end()));
                umax = std::max(umax, *std::max_element(u.begin(), u.end()));
                log.row(inv.row(res.steps, res.t, dt));
                if (c.output_every > 0 && res.steps % c.output_every == 0) {
                    std::ostringstream name;
                    name << "snapshot_" << std::setw(6) << std::setfill('0') << res.steps << ".vtk";
                    write_vtk((dir / name.str()).string(), mesh, u, "u");
                }
            }
        },
        [&] { write(last, "solution.vtk"); });
    write(u, "solution.vtk");
    res.summary["min"] = umin;
    res.summary["max"] = umax;
    if (c.initial == "sine") {
        double l1 = 0.0;
        for (int v = 0; v < mesh.num_vertices(); ++v) {
            l1 += mesh.dual_area[v] * std::abs(u[v] - advection_profile(mesh.vertices[v] - res.t * a));
        }
        res.l1 = l1;
        out << std::setprecision(17) << "L1(u) = " << l1 << " at t = " << res.t << " after " << res.steps << " steps\n";
    } else {
        out << std::setprecision(17) << "min = " << umin << ", max = " << umax << " after " << res.steps << " steps\n";
    }
    return res;
}

// ---------------------------------------------------------------------------
// sod-lagrangian-strip
// ---------------------------------------------------------------------------

/// Lagrangian residuals of every node, entropy defect max(0, -E_p).
double lagrange_entropy_defect(const LagrangeSystem& sys, const NodePhase& ph, const IdealGasEos& eos) {
    const CornerGeometry g = corner_geometry(sys.mesh);
    double worst = 0.0;
    for (int p = 0; p < sys.mesh.num_vertices(); ++p) {
        std::map<int, Vec4> phi;
        for (const SubfaceEntry& e : ph.entries[p]) phi[e.cell] += e.length * subface_flux(ph.v[p], e.n, e.p_star);
        std::vector<Vec4> us, ps;
        for (const auto& [cell, k] : sys.mesh.node_cells[p]) {
            const LagState& s = sys.state[cell];
            us.push_back(s.vec());
            ps.push_back(phi[cell] - lag_flux(s, g.corners[cell][k].ln, pressure(s, eos)));
        }
        const NodeEntropyReport r = node_entropy_defect(us, ps, 0.0, eos, EntropyForm::lagrangian);
        worst = std::max(worst, -r.e);
    }
    return worst;
}

RunResult run_lagrange_strip(const RunConfig& c, const IdealGasEos& eos, std::ostream& out) {
    const fs::path dir(c.output_dir);
    const GclConvention conv = parse_gcl_convention(c.gcl_convention);
    const double height = 1.0 / c.n * c.ny;
    PolyMesh mesh = cartesian_poly_mesh(c.n, c.ny, 1.0, height, false);
    std::vector<LagState> state(mesh.num_cells());
    for (int cell = 0; cell < mesh.num_cells(); ++cell) {
        const Prim1 w = mesh.centroid(cell).x() < 0.5 ? kSodLeft : kSodRight;
        state[cell] = LagState::from_prim({w.rho, Vec2(w.v, 0.0), w.p}, eos);
    }
    LagrangeSystem sys = make_lagrange_system(std::move(mesh), std::move(state));
    CsvWriter log(dir / "invariants.csv", kInvariantHeader);
    RunResult res;
    double max_gcl = 0.0, max_balance = 0.0, max_energy = 0.0, min_tau = 1e300, min_eps = 1e300;

    auto write = [&](const LagrangeSystem& s, const std::vector<Vec2>& v, const std::string& name) {
        CsvWriter sol(dir / "solution.csv", {"x", "y", "rho", "vx", "vy", "p"});
        std::map<std::string, std::vector<double>> cd;
        for (int cell = 0; cell < s.mesh.num_cells(); ++cell) {
            const Vec2 x = s.mesh.centroid(cell);
            const double p = pressure(s.state[cell], eos);
            sol.row({x.x(), x.y(), 1.0 / s.state[cell].tau, s.state[cell].v.x(), s.state[cell].v.y(), p});
            cd["rho"].push_back(1.0 / s.state[cell].tau);
            cd["p"].push_back(p);
            cd["eps"].push_back(s.state[cell].eps());
        }
        write_vtk((dir / name).string(), s.mesh, cd, v, "v");
    };

    LagrangeSystem last = sys;
    std::vector<Vec2> last_v(sys.mesh.num_vertices(), Vec2::Zero());
    guarded(
        [&] {
            while (res.t < c.t_end * (1.0 - 1e-14) && res.steps < c.max_steps) {
                const NodePhase ph = lagrange_nodal_phase(sys, eos);
                const double dt = std::min(lagrange_stable_dt(sys, ph, c.cfl), c.t_end - res.t);
                const double ent = lagrange_entropy_defect(sys, ph, eos);
                last = sys;
                last_v = ph.v;
                const LagStepReport rep = lagrange_step(sys, dt, eos, Exec::parallel, &ph);
                res.t += dt;
                ++res.steps;
                max_gcl = std::max(max_gcl, rep.gcl(conv));
                max_balance = std::max(max_balance, (rep.momentum_change - rep.wall_impulse).norm());
                max_energy = std::max(max_energy, std::abs(rep.energy_change));
                min_tau = std::min(min_tau, rep.min_tau);
                min_eps = std::min(min_eps, rep.min_eps);
                Invariants inv;
                for (double m : sys.mass) inv.mass += m;
                inv.momentum = total_momentum(sys);
                inv.energy = total_energy(sys);
                inv.min_tau = rep.min_tau;
                inv.min_eps = rep.min_eps;
                inv.entropy_defect = ent;
                inv.gcl = rep.gcl(conv);
                log.row(inv.row(res.steps, res.t, dt));
                if (c.output_every > 0 && res.steps % c.output_every == 0) {
                    std::ostringstream name;
                    name << "snapshot_" << std::setw(6) << std::setfill('0') << res.steps << ".vtk";
                    std::map<std::string, std::vector<double>> cd;
                    for (const LagState& s : sys.state) {
                        cd["rho"].push_back(1.0 / s.tau);
                        cd["p"].push_back(pressure(s, eos));
                        cd["eps"].push_back(s.eps());
                    }
                    write_vtk((dir / name.str()).string(), sys.mesh, cd, ph.v, "v");
                }
            }
        },
        [&] { write(last, last_v, "solution.vtk"); });
    write(sys, lagrange_nodal_phase(sys, eos).v, "solution.vtk");

    const ExactRiemann exact(kSodLeft, kSodRight, eos);
    double l1 = 0.0;
    for (int cell = 0; cell < sys.mesh.num_cells(); ++cell) {
        const double xc = sys.mesh.centroid(cell).x();
        l1 += std::abs(1.0 / sys.state[cell].tau - exact.sample((xc - 0.5) / res.t).rho) * sys.mesh.volume(cell);
    }
    res.l1 = l1 / height;
    res.summary["max_gcl_defect"] = max_gcl;
    res.summary["max_momentum_balance"] = max_balance;
    res.summary["max_energy_change"] = max_energy;
    res.summary["min_tau"] = min_tau;
    res.summary["min_eps"] = min_eps;
    out << std::setprecision(17) << "L1(rho) = " << res.l1 << " at t = " << res.t << " after " << res.steps
        << " steps; max GCL defect (" << c.gcl_convention << ") = " << max_gcl << "\n";
    return res;
}

// ---------------------------------------------------------------------------
// corner-fv-periodic
// ---------------------------------------------------------------------------

double density_wave(const Vec2& x) { return 1.0 + 0.2 * std::sin(2.0 * std::numbers::pi * (x.x() + x.y())); }

RunResult run_corner_fv(const RunConfig& c, const IdealGasEos& eos, std::ostream& out) {
    const fs::path dir(c.output_dir);
    PolyMesh mesh = c.mesh.empty() ? cartesian_poly_mesh(c.n, c.n, 1.0, 1.0, true, c.jitter, c.seed)
                                   : read_poly_mesh(c.mesh);
    const CornerFvSetup setup = make_cornerfv_setup(std::move(mesh));
    const Vec2 vel(c.ax, c.ay);
    std::vector<Vec4> u(setup.mesh.num_cells());
    for (int cell = 0; cell < setup.mesh.num_cells(); ++cell) {
        u[cell] = to_conserved(Prim2{density_wave(setup.mesh.centroid(cell)), vel, 1.0}, eos);
    }
    const CornerPath path = c.scheme == "corner-residual" ? CornerPath::residual : CornerPath::flux;
    CsvWriter log(dir / "invariants.csv", kInvariantHeader);
    std::unique_ptr<CsvWriter> elog;
    if (c.entropy_fix) elog = std::make_unique<CsvWriter>(dir / "entropy.csv",
                                                          std::vector<std::string>{"step", "node", "E", "D", "alpha",
                                                                                   "post_defect"});
    RunResult res;
    auto write = [&](const std::vector<Vec4>& s, const std::string& name) {
        CsvWriter sol(dir / "solution.csv", {"x", "y", "rho", "vx", "vy", "p"});
        std::map<std::string, std::vector<double>> cd;
        for (int cell = 0; cell < setup.mesh.num_cells(); ++cell) {
            const Vec2 x = setup.mesh.centroid(cell);
            const Prim2 w = to_primitive(s[cell], eos);
            sol.row({x.x(), x.y(), w.rho, w.v.x(), w.v.y(), w.p});
            cd["rho"].push_back(w.rho);
            cd["p"].push_back(w.p);
            cd["eps"].push_back(eos.internal_energy(w.rho, w.p));
        }
        write_vtk((dir / name).string(), setup.mesh, cd);
    };
    std::vector<Vec4> last = u;
    guarded(
        [&] {
            while (res.t < c.t_end * (1.0 - 1e-14) && res.steps < c.max_steps) {
                const double dt =
                    std::min(cornerfv_stable_dt(setup, u, CornerBc::transmissive, eos, c.cfl), c.t_end - res.t);
                last = u;
                CornerStepInfo info;
                u = cornerfv_step(setup, u, dt, CornerBc::transmissive, eos, path, Exec::parallel, c.entropy_fix,
                                  &info);
                res.t += dt;
                ++res.steps;
                Invariants inv;
                const Vec4 tot = cornerfv_total(setup, u);
                inv.mass = tot(0);
                inv.momentum = Vec2(tot(1), tot(2));
                inv.energy = tot(3);
                inv.min_tau = inv.min_eps = std::numeric_limits<double>::infinity();
                for (const Vec4& s : u) {
                    const Prim2 w = to_primitive(s, eos);
                    inv.min_tau = std::min(inv.min_tau, 1.0 / w.rho);
                    inv.min_eps = std::min(inv.min_eps, eos.internal_energy(w.rho, w.p));
                }
                for (const NodeEntropyReport& r : info.entropy) {
                    inv.entropy_defect = std::max(inv.entropy_defect, r.post_defect);
                    if (elog && r.alpha > 0.0) {
                        elog->row({double(res.steps), double(r.node), r.e, r.d, r.alpha, r.post_defect});
                    }
                }
                log.row(inv.row(res.steps, res.t, dt));
                if (c.output_every > 0 && res.steps % c.output_every == 0) {
                    std::ostringstream name;
                    name << "snapshot_" << std::setw(6) << std::setfill('0') << res.steps << ".vtk";
                    std::map<std::string, std::vector<double>> cd;
                    for (const Vec4& s : u) cd["rho"].push_back(s(0));
                    write_vtk((dir / name.str()).string(), setup.mesh, cd);
                }
            }
        },
        [&] { write(last, "solution.vtk"); });
    write(u, "solution.vtk");
    double l1 = 0.0;
    for (int cell = 0; cell < setup.mesh.num_cells(); ++cell) {
        l1 += setup.volume[cell] * std::abs(u[cell](0) - density_wave(setup.mesh.centroid(cell) - res.t * vel));
    }
    res.l1 = l1;
    out << std::setprecision(17) << "L1(rho) = " << l1 << " at t = " << res.t << " after " << res.steps << " steps\n";
    return res;
}

}  // namespace

// ---------------------------------------------------------------------------
// Selftest
// ---------------------------------------------------------------------------

SelftestResult flux_recovery_selftest(int samples, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    std::vector<std::pair<std::string, OrientedGraph>> graphs{
        {"p1", element_graph(GraphKind::triangle_p1)},
        {"p2", element_graph(GraphKind::triangle_p2)},
        {"quad-dg", element_graph(GraphKind::quad_dg)}};
    for (int k = 3; k <= 8; ++k) graphs.emplace_back("cycle-" + std::to_string(k), element_graph(GraphKind::node_cycle, k));
    SelftestResult r;
    for (const auto& [name, g] : graphs) {
        double worst = 0.0;
        for (int s = 0; s < samples; ++s) {
            Eigen::MatrixXd psi(g.num_nodes, 4);
            for (int i = 0; i < psi.size(); ++i) psi.data()[i] = uni(rng);
            psi.rowwise() -= psi.colwise().mean();
            const RecoveredFluxes f = recover_fluxes(g, psi);
            worst = std::max(worst, f.residual(psi));
            if (g.circulant) {
                const RecoveredFluxes fc = recover_fluxes_circulant(g, psi);
                worst = std::max(worst, fc.residual(psi));
                r.max_circulant_gap = std::max(r.max_circulant_gap, (fc.values - f.values).cwiseAbs().maxCoeff());
            }
        }
        if (g.circulant) {
            const double gap = (circulant_laplacian_pinv(g.num_nodes) - graph_laplacian_pinv(g)).cwiseAbs().maxCoeff();
            r.max_circulant_gap = std::max(r.max_circulant_gap, gap);
        }
        r.per_graph[name] = worst;
        r.max_residual = std::max(r.max_residual, worst);
    }
    return r;
}

// ---------------------------------------------------------------------------
// Entry points
// ---------------------------------------------------------------------------

RunResult run(const RunConfig& cfg, std::ostream& out) {
    const RunConfig c = resolve_config(cfg);
    const IdealGasEos eos(c.gamma);
    if (c.problem != "flux-recovery-selftest") fs::create_directories(c.output_dir);
    if (c.problem == "sod1d") return run_sod1d(c, eos, out);
    if (c.problem == "advection2d") return run_advection2d(c, out);
    if (c.problem == "sod-lagrangian-strip") return run_lagrange_strip(c, eos, out);
    if (c.problem == "corner-fv-periodic") return run_corner_fv(c, eos, out);

    const SelftestResult st = flux_recovery_selftest(c.n, c.seed);
    RunResult res;
    out << std::setprecision(17);
    for (const auto& [name, v] : st.per_graph) out << name << ": max |A f - psi| = " << v << "\n";
    out << "circulant vs generic: " << st.max_circulant_gap << "\n";
    res.passed = st.max_residual <= 1e-12 && st.max_circulant_gap <= 1e-12;
    res.summary["max_residual"] = st.max_residual;
    res.summary["max_circulant_gap"] = st.max_circulant_gap;
    out << "flux recovery selftest " << (res.passed ? "PASS" : "FAIL") << " (max residual " << st.max_residual
        << ")\n";
    return res;
}

std::vector<ConvergenceRow> convergence(RunConfig cfg, const std::vector<int>& levels, std::ostream& out) {
    if (levels.size() < 2) throw ArgumentError("convergence needs at least 2 levels");
    cfg = resolve_config(cfg);
    if (cfg.problem == "flux-recovery-selftest" || (cfg.problem == "advection2d" && cfg.initial != "sine")) {
        throw ConfigError("problem '" + cfg.problem + "' has no exact solution for a convergence study");
    }
    const std::string base = cfg.output_dir;
    std::vector<ConvergenceRow> rows;
    std::ostringstream sink;
    for (int n : levels) {
        RunConfig c = cfg;
        c.n = n;
        c.output_dir = (fs::path(base) / ("level_" + std::to_string(n))).string();
        const RunResult r = run(c, sink);
        ConvergenceRow row{n, 1.0 / n, r.l1, 0.0};
        if (!rows.empty()) row.order = std::log(rows.back().l1 / row.l1) / std::log(rows.back().h / row.h);
        rows.push_back(row);
    }
    fs::create_directories(base);
    CsvWriter csv(fs::path(base) / "convergence.csv", {"n", "h", "l1", "order"});
    out << std::setprecision(17);
    for (const ConvergenceRow& r : rows) {
        csv.row({double(r.n), r.h, r.l1, r.order});
        out << "n = " << r.n << "  L1 = " << r.l1 << "  order = " << r.order << "\n";
    }
    return rows;
}

double sod_l1_error(const Grid1D& grid, const std::vector<Vec3>& u, double t, const IdealGasEos& eos) {
    const ExactRiemann exact(kSodLeft, kSodRight, eos);
    double l1 = 0.0;
    for (int i = 0; i < grid.size(); ++i) {
        l1 += std::abs(u[i](0) - exact.sample((grid.center(i) - 0.5) / t).rho) * grid.dx(i);
    }
    return l1;
}

double advection_profile(const Vec2& x) {
    const double tp = 2.0 * std::numbers::pi;
    return 0.5 + 0.5 * std::sin(tp * x.x()) * std::sin(tp * x.y());
}

// ---------------------------------------------------------------------------
// VTK
// ---------------------------------------------------------------------------

void write_vtk(const std::string& path, const PolyMesh& mesh, const std::map<std::string, std::vector<double>>& cell_data,
               const std::vector<Vec2>& node_vectors, const std::string& vector_name) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write '" + path + "'");
    out << std::setprecision(17);
    std::size_t npts = 0, conn = 0;
    for (const auto& cell : mesh.cells) {
        npts += cell.size();
        conn += cell.size() + 1;
    }
    out << "# vtk DataFile Version 2.0\nrfv polygonal mesh\nASCII\nDATASET UNSTRUCTURED_GRID\n";
    out << "POINTS " << npts << " double\n";
    for (int c = 0; c < mesh.num_cells(); ++c) {
        for (std::size_t k = 0; k < mesh.cells[c].size(); ++k) {
            const Vec2 x = mesh.position(c, static_cast<int>(k));
            out << x.x() << " " << x.y() << " 0\n";
        }
    }
    out << "CELLS " << mesh.num_cells() << " " << conn << "\n";
    std::size_t next = 0;
    for (const auto& cell : mesh.cells) {
        out << cell.size();
        for (std::size_t k = 0; k < cell.size(); ++k) out << " " << next++;
        out << "\n";
    }
    out << "CELL_TYPES " << mesh.num_cells() << "\n";
    for (int c = 0; c < mesh.num_cells(); ++c) out << "7\n";
    if (!cell_data.empty()) {
        out << "CELL_DATA " << mesh.num_cells() << "\n";
        for (const auto& [name, values] : cell_data) {
            out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
            for (double v : values) out << v << "\n";
        }
    }
    if (!node_vectors.empty()) {
        out << "POINT_DATA " << npts << "\nVECTORS " << vector_name << " double\n";
        for (const auto& cell : mesh.cells) {
            for (int p : cell) out << node_vectors[p].x() << " " << node_vectors[p].y() << " 0\n";
        }
    }
}

void write_vtk(const std::string& path, const TriMesh& mesh, const std::vector<double>& node_data,
               const std::string& name) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write '" + path + "'");
    out << std::setprecision(17);
    const int nt = mesh.num_triangles();
    out << "# vtk DataFile Version 2.0\nrfv triangulation\nASCII\nDATASET UNSTRUCTURED_GRID\n";
    out << "POINTS " << 3 * nt << " double\n";
    for (int t = 0; t < nt; ++t) {
        for (int k = 0; k < 3; ++k) {
            const Vec2 x = mesh.position(t, k);
            out << x.x() << " " << x.y() << " 0\n";
        }
    }
    out << "CELLS " << nt << " " << 4 * nt << "\n";
    for (int t = 0; t < nt; ++t) out << "3 " << 3 * t << " " << 3 * t + 1 << " " << 3 * t + 2 << "\n";
    out << "CELL_TYPES " << nt << "\n";
    for (int t = 0; t < nt; ++t) out << "5\n";
    out << "POINT_DATA " << 3 * nt << "\nSCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (int t = 0; t < nt; ++t) {
        for (int k = 0; k < 3; ++k) out << node_data[mesh.triangles[t][k]] << "\n";
    }
}

}  // namespace rfv
