/// @file entropyfix.hpp
/// @brief Entropy diagnostics: Tadmor production, node entropy defect and the
/// conservative alpha correction.
#pragma once

#include "rfv/physics.hpp"

#include <functional>
#include <vector>

namespace rfv {

/// Which entropy pair the states use. Lagrangian states are (tau, v, e).
enum class EntropyForm { eulerian, lagrangian };

/// f.[[w]] - [[psi]] for a 1D Lagrangian interface with normal n; psi = -p v.n / eps.
/// Nonnegative (up to roundoff) for an entropy-stable flux.
double tadmor_production(const LagState& u_l, const LagState& u_r, const Vec4& fhat, const Vec2& n,
                         const IdealGasEos& eos);

/// w_l.phi_l + w_r.phi_r - [[g]] for phi_l = fhat - f_l, phi_r = f_r - fhat.
double fluctuation_entropy_defect(const LagState& u_l, const LagState& u_r, const Vec4& fhat, const Vec2& n,
                                  const IdealGasEos& eos);

/// Lagrangian Rusanov flux with coefficient alpha (in mass units).
Vec4 lagrangian_rusanov_flux(const LagState& u_l, const LagState& u_r, const Vec2& n, double alpha,
                             const IdealGasEos& eos);

struct NodeEntropyReport {
    int node = -1;
    double e = 0.0;            ///< E_p
    double d = 0.0;            ///< D_p
    double alpha = 0.0;        ///< applied alpha_p
    double post_defect = 0.0;  ///< sum w.Phi - oint g.n after correction
};

/// oint g.n over the node cell with frozen states: sum_c g(u_c).(-l_pc n_pc).
double node_entropy_flux(const std::vector<Vec4>& u, const std::vector<Vec2>& ln, const IdealGasEos& eos,
                         EntropyForm form);

/// E_p = oint g.n - sum w_c.Phi_c and D_p = sum A0(u_mean)(w_c - w_mean).(w_c - w_mean).
NodeEntropyReport node_entropy_defect(const std::vector<Vec4>& u, const std::vector<Vec4>& phi,
                                      double boundary_flux, const IdealGasEos& eos, EntropyForm form);

/// Phi_c += alpha A0(u_mean)(w_c - w_mean) with alpha = max(0, E/D) when D < 0.
/// E within roundoff of its own terms and w deviations within roundoff of w
/// count as zero, so uniform neighbourhoods are left alone.
NodeEntropyReport entropy_correct(const std::vector<Vec4>& u, std::vector<Vec4>& phi, double boundary_flux,
                                  const IdealGasEos& eos, EntropyForm form);

/// Builds residuals for the perturbed states u0 + s du at every scale s and
/// returns |E/D| (0 when D = 0).
using NodeResidualFn = std::function<std::vector<Vec4>(const std::vector<Vec4>& u)>;
std::vector<double> alpha_boundedness_probe(const std::vector<Vec4>& u0, const std::vector<Vec4>& du,
                                            const std::vector<Vec2>& ln, const std::vector<double>& scales,
                                            const NodeResidualFn& residuals, const IdealGasEos& eos,
                                            EntropyForm form);

}  // namespace rfv
