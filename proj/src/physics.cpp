#include "rfv/physics.hpp"

#include <cmath>
#include <sstream>

namespace rfv {

namespace {

[[noreturn]] void domain_fail(const char* what, double a, double b) {
    std::ostringstream msg;
    msg.precision(17);
    msg << what << " (" << a << ", " << b << ")";
    throw DomainError(msg.str());
}

}  // namespace

IdealGasEos::IdealGasEos(double gamma) : gamma_(gamma) {
    if (!(gamma > 1.0) || !std::isfinite(gamma)) {
        std::ostringstream msg;
        msg << "gamma must be > 1, got " << gamma;
        throw ConfigError(msg.str());
    }
}

double IdealGasEos::pressure(double rho, double eps) const {
    if (!(rho > 0.0) || !(eps > 0.0)) domain_fail("pressure: need rho > 0 and eps > 0, got (rho, eps) =", rho, eps);
    return (gamma_ - 1.0) * rho * eps;
}

double IdealGasEos::sound_speed(double rho, double p) const {
    if (!(rho > 0.0) || !(p > 0.0)) domain_fail("sound_speed: need rho > 0 and p > 0, got (rho, p) =", rho, p);
    return std::sqrt(gamma_ * p / rho);
}

double IdealGasEos::internal_energy(double rho, double p) const {
    if (!(rho > 0.0) || !(p > 0.0)) domain_fail("internal_energy: need rho > 0 and p > 0, got (rho, p) =", rho, p);
    return p / ((gamma_ - 1.0) * rho);
}

// ---------------------------------------------------------------------------
// Eulerian variables
// ---------------------------------------------------------------------------

Vec3 to_conserved(const Prim1& w, const IdealGasEos& eos) {
    const double eps = eos.internal_energy(w.rho, w.p);
    return Vec3(w.rho, w.rho * w.v, w.rho * (eps + 0.5 * w.v * w.v));
}

Prim1 to_primitive(const Vec3& u, const IdealGasEos& eos) {
    const double rho = u(0);
    if (!(rho > 0.0)) domain_fail("state outside the invariant domain: (rho, E) =", rho, u(2));
    const double v = u(1) / rho;
    const double eps = u(2) / rho - 0.5 * v * v;
    return {rho, v, eos.pressure(rho, eps)};
}

Vec4 to_conserved(const Prim2& w, const IdealGasEos& eos) {
    const double eps = eos.internal_energy(w.rho, w.p);
    return Vec4(w.rho, w.rho * w.v.x(), w.rho * w.v.y(), w.rho * (eps + 0.5 * w.v.squaredNorm()));
}

Prim2 to_primitive(const Vec4& u, const IdealGasEos& eos) {
    const double rho = u(0);
    if (!(rho > 0.0)) domain_fail("state outside the invariant domain: (rho, E) =", rho, u(3));
    const Vec2 v(u(1) / rho, u(2) / rho);
    const double eps = u(3) / rho - 0.5 * v.squaredNorm();
    return {rho, v, eos.pressure(rho, eps)};
}

Vec3 euler_flux(const Vec3& u, const IdealGasEos& eos) {
    const Prim1 w = to_primitive(u, eos);
    return Vec3(u(1), u(1) * w.v + w.p, (u(2) + w.p) * w.v);
}

Vec4 euler_flux(const Vec4& u, const Vec2& n, const IdealGasEos& eos) {
    const Prim2 w = to_primitive(u, eos);
    const double un = w.v.dot(n);
    return Vec4(u(0) * un, u(1) * un + w.p * n.x(), u(2) * un + w.p * n.y(), (u(3) + w.p) * un);
}

double euler_max_speed(const Vec4& u, const Vec2& n, const IdealGasEos& eos) {
    const Prim2 w = to_primitive(u, eos);
    return std::abs(w.v.dot(n)) + eos.sound_speed(w.rho, w.p) * n.norm();
}

double euler_max_speed(const Vec3& u, const IdealGasEos& eos) {
    const Prim1 w = to_primitive(u, eos);
    return std::abs(w.v) + eos.sound_speed(w.rho, w.p);
}

Mat4 euler_jacobian(const Vec4& u, const Vec2& n, const IdealGasEos& eos) {
    const Prim2 w = to_primitive(u, eos);
    const double gm = eos.gamma() - 1.0;
    const double vx = w.v.x(), vy = w.v.y(), nx = n.x(), ny = n.y();
    const double un = vx * nx + vy * ny;
    const double q = 0.5 * w.v.squaredNorm();
    const double h = (u(3) + w.p) / w.rho;
    Mat4 a;
    a << 0.0, nx, ny, 0.0,
        -vx * un + gm * q * nx, un + vx * nx - gm * vx * nx, vx * ny - gm * vy * nx, gm * nx,
        -vy * un + gm * q * ny, vy * nx - gm * vx * ny, un + vy * ny - gm * vy * ny, gm * ny,
        un * (gm * q - h), -gm * vx * un + h * nx, -gm * vy * un + h * ny, eos.gamma() * un;
    return a;
}

EigenSystem<4> euler_eigensystem(const Vec4& u, const Vec2& n, const IdealGasEos& eos) {
    const Prim2 w = to_primitive(u, eos);
    const double nn = n.norm();
    if (!(nn > 0.0)) throw ArgumentError("euler_eigensystem: zero normal");
    const Vec2 nh = n / nn;
    const double c = eos.sound_speed(w.rho, w.p);
    const double vx = w.v.x(), vy = w.v.y();
    const double un = w.v.dot(nh), ut = -vx * nh.y() + vy * nh.x();
    const double q = 0.5 * w.v.squaredNorm();
    const double h = (u(3) + w.p) / w.rho;
    EigenSystem<4> s;
    s.R << 1.0, 1.0, 0.0, 1.0,
        vx - c * nh.x(), vx, -nh.y(), vx + c * nh.x(),
        vy - c * nh.y(), vy, nh.x(), vy + c * nh.y(),
        h - un * c, q, ut, h + un * c;
    s.lambda << (un - c) * nn, un * nn, un * nn, (un + c) * nn;
    s.L = s.R.inverse();
    return s;
}

EigenSystem<3> euler_eigensystem(double rho, double v, double h, const IdealGasEos& eos) {
    const double c2 = (eos.gamma() - 1.0) * (h - 0.5 * v * v);
    if (!(rho > 0.0) || !(c2 > 0.0)) domain_fail("euler_eigensystem: degenerate sound speed, (rho, c^2) =", rho, c2);
    const double c = std::sqrt(c2);
    EigenSystem<3> s;
    s.R << 1.0, 1.0, 1.0,
        v - c, v, v + c,
        h - v * c, 0.5 * v * v, h + v * c;
    s.lambda << v - c, v, v + c;
    s.L = s.R.inverse();
    return s;
}

// ---------------------------------------------------------------------------
// Lagrangian variables
// ---------------------------------------------------------------------------

LagState LagState::from_prim(const Prim2& w, const IdealGasEos& eos) {
    const double eps = eos.internal_energy(w.rho, w.p);
    return {1.0 / w.rho, w.v, eps + 0.5 * w.v.squaredNorm()};
}

void check_domain(const LagState& s, const char* where) {
    if (!(s.tau > 0.0) || !(s.eps() > 0.0)) {
        std::ostringstream msg;
        msg.precision(17);
        msg << where << ": state outside the invariant domain (tau, eps) = (" << s.tau << ", " << s.eps() << ")";
        throw DomainError(msg.str());
    }
}

double pressure(const LagState& s, const IdealGasEos& eos) {
    check_domain(s, "pressure");
    return eos.pressure(1.0 / s.tau, s.eps());
}

double sound_speed(const LagState& s, const IdealGasEos& eos) {
    const double p = pressure(s, eos);
    return eos.sound_speed(1.0 / s.tau, p);
}

Vec4 lag_flux(const LagState& s, const Vec2& n, double p) {
    const double vn = s.v.dot(n);
    return Vec4(-vn, p * n.x(), p * n.y(), p * vn);
}

// ---------------------------------------------------------------------------
// Entropy (c_v = 1, additive constant 0)
// ---------------------------------------------------------------------------

EntropyEval entropy_pair(const LagState& s, const IdealGasEos& eos) {
    const double p = pressure(s, eos);
    const double theta = s.eps();
    EntropyEval r;
    r.eta = std::log(p) + eos.gamma() * std::log(s.tau);
    r.entropy = r.eta;
    r.w = Vec4(p, -s.v.x(), -s.v.y(), 1.0) / theta;
    r.g = Vec2::Zero();
    return r;
}

EntropyEval entropy_pair(const Vec4& u, const IdealGasEos& eos) {
    const Prim2 w = to_primitive(u, eos);
    const double eps = eos.internal_energy(w.rho, w.p);
    EntropyEval r;
    r.eta = std::log(w.p) - eos.gamma() * std::log(w.rho);
    r.entropy = w.rho * r.eta;
    r.w = Vec4(r.eta - eos.gamma() + 0.5 * w.v.squaredNorm() / eps, -w.v.x() / eps, -w.v.y() / eps, 1.0 / eps);
    r.g = r.entropy * w.v;
    return r;
}

Mat4 entropy_hessian(const LagState& s, const IdealGasEos& eos) {
    check_domain(s, "entropy_hessian");
    const double g = eos.gamma(), eps = s.eps(), e2 = eps * eps;
    const double vx = s.v.x(), vy = s.v.y();
    Mat4 a;
    a << -(g - 1.0) / (s.tau * s.tau), 0.0, 0.0, 0.0,
        0.0, -1.0 / eps - vx * vx / e2, -vx * vy / e2, vx / e2,
        0.0, -vy * vx / e2, -1.0 / eps - vy * vy / e2, vy / e2,
        0.0, vx / e2, vy / e2, -1.0 / e2;
    return a;
}

Mat4 entropy_hessian(const Vec4& u, const IdealGasEos& eos) {
    const Prim2 w = to_primitive(u, eos);
    using Row = Eigen::RowVector4d;
    const double rho = w.rho, g = eos.gamma();
    const double vx = w.v.x(), vy = w.v.y();
    const double q = 0.5 * w.v.squaredNorm();
    const double eps = u(3) / rho - q;

    const Row d_rho(1.0, 0.0, 0.0, 0.0);
    const Row d_vx(-vx / rho, 1.0 / rho, 0.0, 0.0);
    const Row d_vy(-vy / rho, 0.0, 1.0 / rho, 0.0);
    const Row d_q(-2.0 * q / rho, vx / rho, vy / rho, 0.0);
    const Row d_eps((q - eps) / rho, -vx / rho, -vy / rho, 1.0 / rho);
    const Row d_eta = (1.0 - g) / rho * d_rho + d_eps / eps;

    Mat4 a;
    a.row(0) = d_eta + d_q / eps - q * d_eps / (eps * eps);
    a.row(1) = -d_vx / eps + vx * d_eps / (eps * eps);
    a.row(2) = -d_vy / eps + vy * d_eps / (eps * eps);
    a.row(3) = -d_eps / (eps * eps);
    return a;
}

// ---------------------------------------------------------------------------
// Exact Riemann solver
// ---------------------------------------------------------------------------

ExactRiemann::ExactRiemann(const Prim1& left, const Prim1& right, const IdealGasEos& eos)
    : l_(left), r_(right), g_(eos.gamma()) {
    al_ = eos.sound_speed(l_.rho, l_.p);
    ar_ = eos.sound_speed(r_.rho, r_.p);
    const double du = r_.v - l_.v;
    if (2.0 / (g_ - 1.0) * (al_ + ar_) <= du) {
        std::ostringstream msg;
        msg << "exact Riemann problem generates vacuum (critical velocity "
            << 2.0 / (g_ - 1.0) * (al_ + ar_) << " <= " << du << ")";
        throw VacuumError(msg.str());
    }
    const double ppv = 0.5 * (l_.p + r_.p) - 0.125 * du * (l_.rho + r_.rho) * (al_ + ar_);
    double p = std::max(1e-8 * std::min(l_.p, r_.p), ppv);
    const double scale = std::max({std::abs(du), al_, ar_});
    for (iterations_ = 1; iterations_ <= 200; ++iterations_) {
        double dl = 0.0, dr = 0.0;
        const double f = wave_function(p, l_, al_, dl) + wave_function(p, r_, ar_, dr) + du;
        double pn = p - f / (dl + dr);
        if (pn <= 0.0) pn = 0.5 * p;
        const double change = std::abs(pn - p) / (0.5 * (pn + p));
        p = pn;
        if (std::abs(f) <= 1e-13 * scale && change < 1e-15) break;
        if (change < 1e-16) break;
    }
    double dl = 0.0, dr = 0.0;
    const double fl = wave_function(p, l_, al_, dl), fr = wave_function(p, r_, ar_, dr);
    if (std::abs(fl + fr + du) > 1e-12 * std::max(1.0, scale)) {
        throw SolverError("exact Riemann Newton iteration did not converge");
    }
    p_star_ = p;
    v_star_ = 0.5 * (l_.v + r_.v) + 0.5 * (fr - fl);
}

double ExactRiemann::wave_function(double p, const Prim1& k, double a, double& derivative) const {
    if (p > k.p) {
        const double A = 2.0 / ((g_ + 1.0) * k.rho);
        const double B = (g_ - 1.0) / (g_ + 1.0) * k.p;
        const double s = std::sqrt(A / (p + B));
        derivative = s * (1.0 - 0.5 * (p - k.p) / (B + p));
        return (p - k.p) * s;
    }
    const double ratio = p / k.p;
    derivative = std::pow(ratio, -0.5 * (g_ + 1.0) / g_) / (k.rho * a);
    return 2.0 * a / (g_ - 1.0) * (std::pow(ratio, 0.5 * (g_ - 1.0) / g_) - 1.0);
}

double ExactRiemann::rho_star_left() const {
    const double ratio = p_star_ / l_.p;
    if (ratio > 1.0) {
        const double gr = (g_ - 1.0) / (g_ + 1.0);
        return l_.rho * (ratio + gr) / (gr * ratio + 1.0);
    }
    return l_.rho * std::pow(ratio, 1.0 / g_);
}

double ExactRiemann::rho_star_right() const {
    const double ratio = p_star_ / r_.p;
    if (ratio > 1.0) {
        const double gr = (g_ - 1.0) / (g_ + 1.0);
        return r_.rho * (ratio + gr) / (gr * ratio + 1.0);
    }
    return r_.rho * std::pow(ratio, 1.0 / g_);
}

Prim1 ExactRiemann::sample(double xi) const {
    const double g = g_;
    if (xi <= v_star_) {
        // left of the contact
        if (p_star_ > l_.p) {
            const double s = l_.v - al_ * std::sqrt((g + 1.0) / (2.0 * g) * p_star_ / l_.p + (g - 1.0) / (2.0 * g));
            if (xi <= s) return l_;
            return {rho_star_left(), v_star_, p_star_};
        }
        const double head = l_.v - al_;
        if (xi <= head) return l_;
        const double a_star = al_ * std::pow(p_star_ / l_.p, 0.5 * (g - 1.0) / g);
        const double tail = v_star_ - a_star;
        if (xi >= tail) return {rho_star_left(), v_star_, p_star_};
        const double c = 2.0 / (g + 1.0) + (g - 1.0) / ((g + 1.0) * al_) * (l_.v - xi);
        return {l_.rho * std::pow(c, 2.0 / (g - 1.0)),
                2.0 / (g + 1.0) * (al_ + 0.5 * (g - 1.0) * l_.v + xi),
                l_.p * std::pow(c, 2.0 * g / (g - 1.0))};
    }
    if (p_star_ > r_.p) {
        const double s = r_.v + ar_ * std::sqrt((g + 1.0) / (2.0 * g) * p_star_ / r_.p + (g - 1.0) / (2.0 * g));
        if (xi >= s) return r_;
        return {rho_star_right(), v_star_, p_star_};
    }
    const double head = r_.v + ar_;
    if (xi >= head) return r_;
    const double a_star = ar_ * std::pow(p_star_ / r_.p, 0.5 * (g - 1.0) / g);
    const double tail = v_star_ + a_star;
    if (xi <= tail) return {rho_star_right(), v_star_, p_star_};
    const double c = 2.0 / (g + 1.0) - (g - 1.0) / ((g + 1.0) * ar_) * (r_.v - xi);
    return {r_.rho * std::pow(c, 2.0 / (g - 1.0)),
            2.0 / (g + 1.0) * (-ar_ + 0.5 * (g - 1.0) * r_.v + xi),
            r_.p * std::pow(c, 2.0 * g / (g - 1.0))};
}

}  // namespace rfv
