#include "model.hpp"

#include <algorithm>
#include <cmath>

namespace ptbec {

cplx external_potential(const PhysicalParams& p, double x, double y, double z) {
    const double yz = y * y / (2.0 * p.ly * p.ly) + z * z / (2.0 * p.lz * p.lz);
    const double gp = std::exp(-(x + 0.5 * p.l) * (x + 0.5 * p.l) / (2.0 * p.lx * p.lx) - yz);
    const double gm = std::exp(-(x - 0.5 * p.l) * (x - 0.5 * p.l) / (2.0 * p.lx * p.lx) - yz);
    return -cplx(p.v0, -p.gamma) * gp - cplx(p.v0, p.gamma) * gm;
}

cplx evaluate_wavefunction(const VariationalState& s, double x, double y, double z) {
    return gauss_value(ket_exponent(s.g1), x, y, z) +
           gauss_value(ket_exponent(s.g2), x, y, z);
}

cplx overlap(const GaussianParams& bra, const GaussianParams& ket) {
    return gauss_integral(pair_exponent(bra, ket));
}

double norm_squared(const VariationalState& s) {
    const cplx n = overlap(s.g1, s.g1) + overlap(s.g2, s.g2) + overlap(s.g1, s.g2) +
                   overlap(s.g2, s.g1);
    return n.real();
}

GaussianParams pt_of(const GaussianParams& g) {
    GaussianParams r = g;
    r.a_xx = std::conj(g.a_xx);
    r.a_yy = std::conj(g.a_yy);
    r.a_zz = std::conj(g.a_zz);
    r.a_xz = std::conj(g.a_xz);
    r.q_x = -g.q_x;
    r.q_z = -g.q_z;
    r.gamma_c = std::conj(g.gamma_c);
    return r;
}

VariationalState apply_pt(const VariationalState& s) {
    VariationalState r = s;
    r.g1 = pt_of(s.g1);
    r.g2 = pt_of(s.g2);
    canonical_order(r);
    return r;
}

double pt_residual(const VariationalState& s) {
    const VariationalState t = apply_pt(s);
    const cplx cross = overlap(s.g1, t.g1) + overlap(s.g1, t.g2) + overlap(s.g2, t.g1) +
                       overlap(s.g2, t.g2);
    const double n2 = norm_squared(s);
    if (!(n2 > 0.0)) throw invalid_state_error("pt_residual: state has zero norm");
    // ||PT Psi|| = ||Psi||, so the optimal-phase distance reduces to the
    // magnitude of the cross overlap.
    const double arg = 2.0 * std::max(0.0, 1.0 - std::abs(cross) / n2);
    return std::sqrt(arg);
}

VariationalState normalized(const VariationalState& s) {
    const double n2 = norm_squared(s);
    if (!(n2 > 0.0) || !std::isfinite(n2))
        throw invalid_state_error("normalized: state norm is not positive and finite");
    VariationalState r = s;
    const double shift = 0.5 * std::log(n2);
    r.g1.gamma_c += shift;
    r.g2.gamma_c += shift;
    return r;
}

void canonical_order(VariationalState& s) {
    const bool swap = (s.g1.q_x > s.g2.q_x) ||
                      (s.g1.q_x == s.g2.q_x &&
                       s.g1.gamma_c.real() > s.g2.gamma_c.real());
    if (swap) std::swap(s.g1, s.g2);
}

VariationalState gauge_fixed(const VariationalState& s) {
    VariationalState r = normalized(s);
    canonical_order(r);
    const double phi = r.g1.gamma_c.imag();
    r.g1.gamma_c -= cplx(0.0, phi);
    r.g2.gamma_c -= cplx(0.0, phi);
    // Im gamma is 2pi-periodic; wrap the relative phase into (-pi, pi].
    double rel = r.g2.gamma_c.imag();
    rel = std::remainder(rel, 2.0 * M_PI);
    if (rel <= -M_PI) rel += 2.0 * M_PI;
    r.g2.gamma_c = cplx(r.g2.gamma_c.real(), rel);
    return r;
}

double state_distance(const VariationalState& a, const VariationalState& b) {
    const ParamVector va = gauge_fixed(a).to_vector();
    const ParamVector vb = gauge_fixed(b).to_vector();
    return param_distance(va, vb);
}

}  // namespace ptbec
