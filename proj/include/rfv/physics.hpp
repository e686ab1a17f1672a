/// @file physics.hpp
/// @brief Ideal-gas EOS, Euler fluxes (Eulerian and Lagrangian), entropy pair,
/// entropy variables and the exact Riemann solver used as a test oracle.
#pragma once

#include "rfv/core.hpp"

namespace rfv {

class IdealGasEos {
public:
    /// Throws ConfigError unless gamma > 1.
    explicit IdealGasEos(double gamma = 1.4);
    double gamma() const { return gamma_; }

    /// p = (gamma-1) rho eps; DomainError for rho <= 0 or eps <= 0.
    double pressure(double rho, double eps) const;
    /// a = sqrt(gamma p / rho); DomainError for rho <= 0 or p <= 0.
    double sound_speed(double rho, double p) const;
    double internal_energy(double rho, double p) const;

private:
    double gamma_;
};

/// Primitive variables, 1D.
struct Prim1 {
    double rho, v, p;
};

/// Primitive variables, 2D.
struct Prim2 {
    double rho;
    Vec2 v;
    double p;
};

// -- Eulerian: u = (rho, rho v, E) ------------------------------------------

Vec3 to_conserved(const Prim1& w, const IdealGasEos& eos);
Prim1 to_primitive(const Vec3& u, const IdealGasEos& eos);
Vec4 to_conserved(const Prim2& w, const IdealGasEos& eos);
Prim2 to_primitive(const Vec4& u, const IdealGasEos& eos);

Vec3 euler_flux(const Vec3& u, const IdealGasEos& eos);
/// f(u) n for any (not necessarily unit) vector n.
Vec4 euler_flux(const Vec4& u, const Vec2& n, const IdealGasEos& eos);
/// Largest |v.n| + a|n|.
double euler_max_speed(const Vec4& u, const Vec2& n, const IdealGasEos& eos);
double euler_max_speed(const Vec3& u, const IdealGasEos& eos);

/// Right/left eigenvectors and eigenvalues of a flux Jacobian: A = R diag(lambda) L.
template <int N>
struct EigenSystem {
    Eigen::Matrix<double, N, N> R, L;
    Eigen::Matrix<double, N, 1> lambda;

    Eigen::Matrix<double, N, N> plus() const { return R * lambda.cwiseMax(0.0).asDiagonal() * L; }
    Eigen::Matrix<double, N, N> minus() const { return R * lambda.cwiseMin(0.0).asDiagonal() * L; }
    Eigen::Matrix<double, N, N> abs() const { return R * lambda.cwiseAbs().asDiagonal() * L; }
    Eigen::Matrix<double, N, N> matrix() const { return R * lambda.asDiagonal() * L; }
};

/// Eigen-decomposition of d(f.n)/du at u; n need not be unit.
EigenSystem<4> euler_eigensystem(const Vec4& u, const Vec2& n, const IdealGasEos& eos);
/// Same, 1D, from primitive quantities (used for Roe-averaged states).
EigenSystem<3> euler_eigensystem(double rho, double v, double h, const IdealGasEos& eos);
/// Analytic Jacobian d(f.n)/du.
Mat4 euler_jacobian(const Vec4& u, const Vec2& n, const IdealGasEos& eos);

// -- Lagrangian: u = (tau, v, e) --------------------------------------------

struct LagState {
    double tau = 1.0;
    Vec2 v = Vec2::Zero();
    double e = 1.0;

    double eps() const { return e - 0.5 * v.squaredNorm(); }
    Vec4 vec() const { return Vec4(tau, v.x(), v.y(), e); }
    static LagState from_vec(const Vec4& u) { return {u(0), Vec2(u(1), u(2)), u(3)}; }
    static LagState from_prim(const Prim2& w, const IdealGasEos& eos);
};

double pressure(const LagState& s, const IdealGasEos& eos);
double sound_speed(const LagState& s, const IdealGasEos& eos);
/// Throws DomainError unless tau > 0 and eps > 0.
void check_domain(const LagState& s, const char* where);

/// f_n(u) = (-v.n, p n, p v.n).
Vec4 lag_flux(const LagState& s, const Vec2& n, double p);

// -- Entropy -----------------------------------------------------------------

/// eta is the specific entropy ln p - gamma ln rho; `entropy` is the concave
/// function of the conserved variables whose gradient is w (rho*eta in the
/// Eulerian form, eta in the Lagrangian one); g is the entropy flux.
struct EntropyEval {
    double eta = 0.0;
    double entropy = 0.0;
    Vec4 w = Vec4::Zero();
    Vec2 g = Vec2::Zero();
};

EntropyEval entropy_pair(const LagState& s, const IdealGasEos& eos);
EntropyEval entropy_pair(const Vec4& u, const IdealGasEos& eos);

/// A0 = dw/du, the Hessian of the entropy (negative definite).
Mat4 entropy_hessian(const LagState& s, const IdealGasEos& eos);
Mat4 entropy_hessian(const Vec4& u, const IdealGasEos& eos);

// -- Exact Riemann solver ----------------------------------------------------

class ExactRiemann {
public:
    /// Throws VacuumError when the data generate vacuum and DomainError for
    /// out-of-domain input.
    ExactRiemann(const Prim1& left, const Prim1& right, const IdealGasEos& eos);

    double p_star() const { return p_star_; }
    double v_star() const { return v_star_; }
    int iterations() const { return iterations_; }
    /// Density on each side of the contact.
    double rho_star_left() const;
    double rho_star_right() const;
    /// Self-similar solution at xi = x/t.
    Prim1 sample(double xi) const;

private:
    double wave_function(double p, const Prim1& k, double a, double& derivative) const;

    Prim1 l_, r_;
    double g_, al_, ar_;
    double p_star_ = 0.0, v_star_ = 0.0;
    int iterations_ = 0;
};

}  // namespace rfv
