/// @file riemann.hpp
/// @brief 1D fluctuation machinery: the parametrized simple solver, Roe,
/// dissipative fluxes and the finite volume step.
#pragma once

#include "rfv/mesh.hpp"
#include "rfv/physics.hpp"

#include <vector>

namespace rfv {

/// Safety factor applied to the positivity bound on the wave speeds.
inline constexpr double kWaveSpeedSafety = 1.01;

/// Intermediate states of the three-wave solver (-lambda_l, 0, +lambda_r)
/// written in the direction n.
struct SimpleSolverState {
    LagState u_l, u_r;
    LagState u_l_star, u_r_star;
    Vec2 n = Vec2(1.0, 0.0);
    double lambda_l = 0.0, lambda_r = 0.0;
    double v_n_star = 0.0;
    double p_l = 0.0, p_r = 0.0;
    double p_l_star = 0.0, p_r_star = 0.0;

    Vec4 flux_left() const;   ///< f_n(u_l)
    Vec4 flux_right() const;  ///< f_n(u_r)
    Vec4 flux_left_star() const;
    Vec4 flux_right_star() const;
};

/// Smallest admissible wave speeds times `k`: lambda_l = k max(a_l/tau_l,
/// -(v* - v_l)/tau_l), lambda_r = k max(a_r/tau_r, (v* - v_r)/tau_r).
void positivity_wave_speeds(const LagState& u_l, const LagState& u_r, const Vec2& n, double v_n_star,
                            const IdealGasEos& eos, double k, double& lambda_l, double& lambda_r);

/// Closed-form solution of the two wave systems for given v*, with the wave
/// speeds chosen by the positivity rule.
SimpleSolverState simple_solver(const LagState& u_l, const LagState& u_r, const Vec2& n, double v_n_star,
                                const IdealGasEos& eos, double k = kWaveSpeedSafety);

/// Same with prescribed wave speeds.
SimpleSolverState simple_solver(const LagState& u_l, const LagState& u_r, const Vec2& n, double v_n_star,
                                double lambda_l, double lambda_r, const IdealGasEos& eos);

/// v = (lambda_l v_l + lambda_r v_r - (p_r - p_l)) / (lambda_l + lambda_r).
double face_velocity(double v_l, double v_r, double p_l, double p_r, double lambda_l, double lambda_r);
double face_velocity(const LagState& u_l, const LagState& u_r, const Vec2& n, double lambda_l,
                     double lambda_r, const IdealGasEos& eos);

/// Simple solver at v* = face velocity. The wave speeds start from the
/// acoustic impedances and are refreshed until the positivity rule holds at
/// the final v* (at most `max_refresh` refreshes).
SimpleSolverState simple_solver_at_face(const LagState& u_l, const LagState& u_r, const Vec2& n,
                                        const IdealGasEos& eos, int max_refresh = 8);

/// Fluctuations sent to the left and right cells.
template <class V>
struct FluctuationPair {
    V phi_left;
    V phi_right;
};

/// phi_left = -lambda_l (u_l* - u_l), phi_right = lambda_r (u_r - u_r*);
/// `zero_wave` receives f_r* - f_l*, the flux jump carried by the contact.
FluctuationPair<Vec4> fluctuations_from_simple(const SimpleSolverState& s, Vec4* zero_wave = nullptr);

/// Square-root-density averaged Roe state: (rho, v, H).
Vec3 roe_average(const Vec3& u_l, const Vec3& u_r, const IdealGasEos& eos);
EigenSystem<3> roe_eigensystem(const Vec3& u_l, const Vec3& u_r, const IdealGasEos& eos);
Vec3 roe_flux(const Vec3& u_l, const Vec3& u_r, const IdealGasEos& eos);
FluctuationPair<Vec3> roe_fluctuations(const Vec3& u_l, const Vec3& u_r, const IdealGasEos& eos);

/// f = ½ [f_l + f_r - Q (u_r - u_l)] and the matching fluctuations.
struct DissipativeResult {
    Vec3 flux;
    FluctuationPair<Vec3> fluct;
};
DissipativeResult dissipative_flux(const Vec3& u_l, const Vec3& u_r, const Mat3& q, const IdealGasEos& eos);
/// Q = alpha I with alpha the largest local signal speed.
DissipativeResult rusanov_flux(const Vec3& u_l, const Vec3& u_r, const IdealGasEos& eos);

// ---------------------------------------------------------------------------
// Finite volume update
// ---------------------------------------------------------------------------

enum class Scheme1D { rusanov, roe };
enum class Bc1D { periodic, transmissive, wall };

/// Interface data of one step: flux at every interface and the fluctuations
/// sent to the adjacent cells. Index i is interface i-1/2 (size N+1).
template <class V>
struct InterfaceData {
    std::vector<V> flux;
    std::vector<FluctuationPair<V>> fluct;
    std::vector<double> lambda_l, lambda_r;  ///< Lagrangian only
};

InterfaceData<Vec3> interface_fluxes(const std::vector<Vec3>& u, Scheme1D scheme, Bc1D bc, const IdealGasEos& eos);

/// Largest stable time step for the Eulerian scheme: cfl * min dx / max speed.
double stable_dt(const Grid1D& grid, const std::vector<Vec3>& u, const IdealGasEos& eos, double cfl = 0.5);

/// u_i -= dt/dx_i (f_{i+1/2} - f_{i-1/2}). Throws TimeStepError if dt exceeds
/// stable_dt(cfl) and DomainError naming the first out-of-domain cell.
std::vector<Vec3> fv1d_step(const Grid1D& grid, const std::vector<Vec3>& u, double dt, Scheme1D scheme,
                            Bc1D bc, const IdealGasEos& eos, double cfl = 0.5, Exec exec = Exec::parallel);

/// Same update written with fluctuations: u_i -= dt/dx_i (phi_right^{i-1/2} + phi_left^{i+1/2}).
std::vector<Vec3> fv1d_step_fluctuation(const Grid1D& grid, const std::vector<Vec3>& u, double dt,
                                        Scheme1D scheme, Bc1D bc, const IdealGasEos& eos);

/// SSP-RK2 built from two Euler steps.
std::vector<Vec3> fv1d_step_rk2(const Grid1D& grid, const std::vector<Vec3>& u, double dt, Scheme1D scheme,
                                Bc1D bc, const IdealGasEos& eos, double cfl = 0.5);

/// Lagrangian 1D (mass coordinates): m_i du_i/dt + f*_{i+1/2} - f*_{i-1/2} = 0
/// with the simple solver at v* = face velocity. States are (tau, v, 0, e).
InterfaceData<Vec4> lagrangian_interface_fluxes(const std::vector<LagState>& u, Bc1D bc, const IdealGasEos& eos);
double lagrangian_stable_dt(const std::vector<double>& mass, const std::vector<LagState>& u, Bc1D bc,
                            const IdealGasEos& eos, double cfl = 0.5);
std::vector<LagState> lagrangian1d_step(const std::vector<double>& mass, const std::vector<LagState>& u,
                                        double dt, Bc1D bc, const IdealGasEos& eos, double cfl = 0.5);

}  // namespace rfv
