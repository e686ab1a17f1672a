#include "rfv/entropyfix.hpp"

#include <algorithm>
#include <cmath>

namespace rfv {

namespace {

double lag_potential(const LagState& s, const Vec2& n, const IdealGasEos& eos) {
    return -pressure(s, eos) * s.v.dot(n) / s.eps();
}

Vec4 entropy_variables(const Vec4& u, const IdealGasEos& eos, EntropyForm form) {
    return form == EntropyForm::eulerian ? entropy_pair(u, eos).w : entropy_pair(LagState::from_vec(u), eos).w;
}

Mat4 hessian(const Vec4& u, const IdealGasEos& eos, EntropyForm form) {
    return form == EntropyForm::eulerian ? entropy_hessian(u, eos) : entropy_hessian(LagState::from_vec(u), eos);
}

}  // namespace

double tadmor_production(const LagState& u_l, const LagState& u_r, const Vec4& fhat, const Vec2& n,
                         const IdealGasEos& eos) {
    check_domain(u_l, "tadmor_production (left)");
    check_domain(u_r, "tadmor_production (right)");
    const Vec4 jump_w = entropy_pair(u_r, eos).w - entropy_pair(u_l, eos).w;
    return fhat.dot(jump_w) - (lag_potential(u_r, n, eos) - lag_potential(u_l, n, eos));
}

double fluctuation_entropy_defect(const LagState& u_l, const LagState& u_r, const Vec4& fhat, const Vec2& n,
                                  const IdealGasEos& eos) {
    const Vec4 f_l = lag_flux(u_l, n, pressure(u_l, eos));
    const Vec4 f_r = lag_flux(u_r, n, pressure(u_r, eos));
    // g = 0 in Lagrangian variables
    return entropy_pair(u_l, eos).w.dot(fhat - f_l) + entropy_pair(u_r, eos).w.dot(f_r - fhat);
}

Vec4 lagrangian_rusanov_flux(const LagState& u_l, const LagState& u_r, const Vec2& n, double alpha,
                             const IdealGasEos& eos) {
    const Vec4 f_l = lag_flux(u_l, n, pressure(u_l, eos));
    const Vec4 f_r = lag_flux(u_r, n, pressure(u_r, eos));
    return 0.5 * (f_l + f_r) - 0.5 * alpha * (u_r.vec() - u_l.vec());
}

double node_entropy_flux(const std::vector<Vec4>& u, const std::vector<Vec2>& ln, const IdealGasEos& eos,
                         EntropyForm form) {
    if (form == EntropyForm::lagrangian) return 0.0;
    double s = 0.0;
    for (std::size_t c = 0; c < u.size(); ++c) s -= entropy_pair(u[c], eos).g.dot(ln[c]);
    return s;
}

namespace {

struct NodeQuadratic {
    std::vector<Vec4> w, dw;  // entropy variables and their deviation from the mean
    Mat4 a0;
    double e_scale = 0.0;     // sum of |terms| in E, for the roundoff test
};

NodeQuadratic node_quadratic(const std::vector<Vec4>& u, const std::vector<Vec4>& phi, double boundary_flux,
                             const IdealGasEos& eos, EntropyForm form) {
    if (u.size() != phi.size() || u.empty()) throw ArgumentError("node_entropy_defect: one residual per state");
    const std::size_t n = u.size();
    NodeQuadratic q;
    q.w.resize(n);
    q.dw.resize(n);
    Vec4 u_mean = Vec4::Zero(), w_mean = Vec4::Zero();
    double w_max = 0.0;
    q.e_scale = std::abs(boundary_flux);
    for (std::size_t c = 0; c < n; ++c) {
        q.w[c] = entropy_variables(u[c], eos, form);
        u_mean += u[c] / static_cast<double>(n);
        w_mean += q.w[c] / static_cast<double>(n);
        w_max = std::max(w_max, q.w[c].cwiseAbs().maxCoeff());
        q.e_scale += std::abs(q.w[c].dot(phi[c]));
    }
    q.a0 = hessian(u_mean, eos, form);
    // deviations at roundoff level count as a uniform neighbourhood
    double dev = 0.0;
    for (std::size_t c = 0; c < n; ++c) {
        q.dw[c] = q.w[c] - w_mean;
        dev = std::max(dev, q.dw[c].cwiseAbs().maxCoeff());
    }
    if (dev <= 1e-13 * w_max) {
        for (Vec4& d : q.dw) d.setZero();
    }
    return q;
}

}  // namespace

NodeEntropyReport node_entropy_defect(const std::vector<Vec4>& u, const std::vector<Vec4>& phi,
                                      double boundary_flux, const IdealGasEos& eos, EntropyForm form) {
    const NodeQuadratic q = node_quadratic(u, phi, boundary_flux, eos, form);
    NodeEntropyReport r;
    r.e = boundary_flux;
    for (std::size_t c = 0; c < u.size(); ++c) {
        r.e -= q.w[c].dot(phi[c]);
        r.d += (q.a0 * q.dw[c]).dot(q.dw[c]);
    }
    r.post_defect = -r.e;
    return r;
}

NodeEntropyReport entropy_correct(const std::vector<Vec4>& u, std::vector<Vec4>& phi, double boundary_flux,
                                  const IdealGasEos& eos, EntropyForm form) {
    const NodeQuadratic q = node_quadratic(u, phi, boundary_flux, eos, form);
    NodeEntropyReport r;
    r.e = boundary_flux;
    for (std::size_t c = 0; c < u.size(); ++c) {
        r.e -= q.w[c].dot(phi[c]);
        r.d += (q.a0 * q.dw[c]).dot(q.dw[c]);
    }
    r.post_defect = -r.e;
    if (!(r.d < 0.0) || r.e >= -1e-14 * q.e_scale) return r;
    r.alpha = r.e / r.d;
    double post = -boundary_flux;
    for (std::size_t c = 0; c < u.size(); ++c) {
        phi[c] += r.alpha * (q.a0 * q.dw[c]);
        post += q.w[c].dot(phi[c]);
    }
    r.post_defect = post;
    return r;
}

std::vector<double> alpha_boundedness_probe(const std::vector<Vec4>& u0, const std::vector<Vec4>& du,
                                            const std::vector<Vec2>& ln, const std::vector<double>& scales,
                                            const NodeResidualFn& residuals, const IdealGasEos& eos,
                                            EntropyForm form) {
    std::vector<double> ratios;
    for (double s : scales) {
        std::vector<Vec4> u(u0.size());
        for (std::size_t c = 0; c < u0.size(); ++c) u[c] = u0[c] + s * du[c];
        const NodeEntropyReport r =
            node_entropy_defect(u, residuals(u), node_entropy_flux(u, ln, eos, form), eos, form);
        ratios.push_back(r.d == 0.0 ? 0.0 : std::abs(r.e / r.d));
    }
    return ratios;
}

}  // namespace rfv
