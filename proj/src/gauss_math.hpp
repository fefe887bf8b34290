#ifndef PTBEC_GAUSS_MATH_HPP
#define PTBEC_GAUSS_MATH_HPP

// Closed-form Gaussian integral machinery shared by the element tables and the
// variational equations of motion.
//
// Every integrand that appears is (monomial) * exp(-x^T M x + b^T x + c) with
// M complex symmetric carrying an (x,z) block plus a decoupled y entry, and
// b_y = 0 throughout (the y direction is frozen). Integrals and moments are
// evaluated blockwise; the complex square roots stay on the principal branch
// because every eigenvalue of M has positive real part.

#include <array>
#include <cmath>

#include "quadrature.hpp"
#include "types.hpp"

namespace ptbec {

// Complex symmetric 2x2 over (x,z).
struct Block2 {
    cplx xx{}, zz{}, xz{};
};

inline cplx det2(const Block2& m) { return m.xx * m.zz - m.xz * m.xz; }

inline Block2 inverse(const Block2& m) {
    const cplx d = det2(m);
    return {m.zz / d, m.xx / d, -m.xz / d};
}

// exp(-x^T M x + b^T x + c) with M = [xz block, myy], b = (bx, 0, bz).
struct GaussExponent {
    Block2 m;
    cplx myy{};
    cplx bx{}, bz{};
    cplx c{};

    GaussExponent& operator+=(const GaussExponent& o) {
        m.xx += o.m.xx;
        m.zz += o.m.zz;
        m.xz += o.m.xz;
        myy += o.myy;
        bx += o.bx;
        bz += o.bz;
        c += o.c;
        return *this;
    }
};

inline GaussExponent operator+(GaussExponent a, const GaussExponent& b) { return a += b; }

// Exponent of a ket Gaussian: -(x-q)^T A (x-q) + i p.(x-q) - gamma expanded
// around the origin.
inline GaussExponent ket_exponent(const GaussianParams& g) {
    GaussExponent e;
    e.m = {g.a_xx, g.a_zz, g.a_xz};
    e.myy = g.a_yy;
    e.bx = 2.0 * (g.a_xx * g.q_x + g.a_xz * g.q_z) + I * g.p_x;
    e.bz = 2.0 * (g.a_zz * g.q_z + g.a_xz * g.q_x) + I * g.p_z;
    e.c = -(g.a_xx * g.q_x * g.q_x + 2.0 * g.a_xz * g.q_x * g.q_z +
            g.a_zz * g.q_z * g.q_z) -
          I * (g.p_x * g.q_x + g.p_z * g.q_z) - g.gamma_c;
    return e;
}

inline GaussExponent bra_exponent(const GaussianParams& g) {
    GaussExponent e = ket_exponent(g);
    e.m = {std::conj(e.m.xx), std::conj(e.m.zz), std::conj(e.m.xz)};
    e.myy = std::conj(e.myy);
    e.bx = std::conj(e.bx);
    e.bz = std::conj(e.bz);
    e.c = std::conj(e.c);
    return e;
}

inline GaussExponent pair_exponent(const GaussianParams& bra, const GaussianParams& ket) {
    return bra_exponent(bra) + ket_exponent(ket);
}

// Exponent of one real trap Gaussian g^{+/-} (sign = +1 selects g^+, the well
// centered at x = -l/2).
inline GaussExponent well_exponent(const PhysicalParams& p, int sign) {
    GaussExponent e;
    e.m = {cplx(1.0 / (2.0 * p.lx * p.lx), 0.0), cplx(1.0 / (2.0 * p.lz * p.lz), 0.0),
           cplx(0.0, 0.0)};
    e.myy = cplx(1.0 / (2.0 * p.ly * p.ly), 0.0);
    e.bx = cplx(-sign * p.l / (2.0 * p.lx * p.lx), 0.0);
    e.bz = 0.0;
    e.c = cplx(-p.l * p.l / (8.0 * p.lx * p.lx), 0.0);
    return e;
}

inline cplx gauss_value(const GaussExponent& e, double x, double y, double z) {
    const cplx quad = e.m.xx * x * x + e.m.zz * z * z + 2.0 * e.m.xz * x * z +
                      e.myy * y * y;
    return std::exp(-quad + e.bx * x + e.bz * z + e.c);
}

// \int exp(-x^T M x + b^T x + c) d3x. Throws if the combined exponent is not
// normalizable (Re M not positive definite).
inline cplx gauss_integral(const GaussExponent& e) {
    const double rxx = e.m.xx.real(), rzz = e.m.zz.real(), rxz = e.m.xz.real();
    if (!(rxx > 0.0 && e.myy.real() > 0.0 && rzz > 0.0 && rxx * rzz - rxz * rxz > 0.0))
        throw invalid_state_error("combined Gaussian exponent is not normalizable");
    const Block2 mi = inverse(e.m);
    const cplx quad = 0.25 * (mi.xx * e.bx * e.bx + 2.0 * mi.xz * e.bx * e.bz +
                              mi.zz * e.bz * e.bz);
    return M_PI / std::sqrt(det2(e.m)) * std::sqrt(M_PI / e.myy) * std::exp(e.c + quad);
}

// ---------------------------------------------------------------------------
// Moments of the normalized Gaussian behind an exponent, plus the plain
// integral s0 = \int exp(...). Degree <= 4 in (x,z), <= y^4 in y.
// ---------------------------------------------------------------------------

struct PairMoments {
    cplx s0{};
    cplx mxz[5][5]{};  // E[x^a z^b], valid for a + b <= 4
    cplx my[3]{};      // E[y^{2m}]
};

inline PairMoments compute_moments(const GaussExponent& e) {
    PairMoments pm;
    const double rxx = e.m.xx.real(), rzz = e.m.zz.real(), rxz = e.m.xz.real();
    if (!(rxx > 0.0 && e.myy.real() > 0.0 && rzz > 0.0 && rxx * rzz - rxz * rxz > 0.0))
        throw invalid_state_error("combined Gaussian exponent is not normalizable");
    const cplx d2 = det2(e.m);
    const Block2 minv = inverse(e.m);
    const cplx quad = 0.25 * (minv.xx * e.bx * e.bx + 2.0 * minv.xz * e.bx * e.bz +
                              minv.zz * e.bz * e.bz);
    const double pi = M_PI;
    pm.s0 = pi / std::sqrt(d2) * std::sqrt(pi / e.myy) * std::exp(e.c + quad);

    const cplx mux = 0.5 * (minv.xx * e.bx + minv.xz * e.bz);
    const cplx muz = 0.5 * (minv.xz * e.bx + minv.zz * e.bz);
    const cplx sxx = 0.5 * minv.xx, szz = 0.5 * minv.zz, sxz = 0.5 * minv.xz;

    // Stein recursion E[x^a z^b]; valid for complex mean/covariance.
    pm.mxz[0][0] = 1.0;
    for (int b = 1; b <= 4; ++b)
        pm.mxz[0][b] = muz * pm.mxz[0][b - 1] +
                       (b >= 2 ? double(b - 1) * szz * pm.mxz[0][b - 2] : cplx(0.0));
    for (int a = 1; a <= 4; ++a)
        for (int b = 0; a + b <= 4; ++b)
            pm.mxz[a][b] = mux * pm.mxz[a - 1][b] +
                           (a >= 2 ? double(a - 1) * sxx * pm.mxz[a - 2][b] : cplx(0.0)) +
                           (b >= 1 ? double(b) * sxz * pm.mxz[a - 1][b - 1] : cplx(0.0));

    const cplx syy = 0.5 / e.myy;
    pm.my[0] = 1.0;
    pm.my[1] = syy;
    pm.my[2] = 3.0 * syy * syy;
    return pm;
}

// ---------------------------------------------------------------------------
// Polynomials over the monomial basis B = {1, x, z, x^2, z^2, xz, y^2}, which
// is closed under everything the tangent-space derivatives and the kinetic
// operator produce.
// ---------------------------------------------------------------------------

inline constexpr int basis_size = 7;
inline constexpr int basis_ax[basis_size] = {0, 1, 0, 2, 0, 1, 0};
inline constexpr int basis_az[basis_size] = {0, 0, 1, 0, 2, 1, 0};
inline constexpr int basis_ay[basis_size] = {0, 0, 0, 0, 0, 0, 1};

using Poly7 = std::array<cplx, basis_size>;
using Vec7 = std::array<cplx, basis_size>;

inline Poly7 operator*(cplx s, const Poly7& p) {
    Poly7 r{};
    for (int i = 0; i < basis_size; ++i) r[i] = s * p[i];
    return r;
}

inline Poly7& operator+=(Poly7& a, const Poly7& b) {
    for (int i = 0; i < basis_size; ++i) a[i] += b[i];
    return a;
}

inline Poly7 poly_one() { return {cplx(1.0), 0, 0, 0, 0, 0, 0}; }
inline Poly7 poly_x(double qx) { return {cplx(-qx), 1, 0, 0, 0, 0, 0}; }
inline Poly7 poly_z(double qz) { return {cplx(-qz), 0, 1, 0, 0, 0, 0}; }
inline Poly7 poly_x2(double qx) { return {cplx(qx * qx), -2 * qx, 0, 1, 0, 0, 0}; }
inline Poly7 poly_z2(double qz) { return {cplx(qz * qz), 0, -2 * qz, 0, 1, 0, 0}; }
inline Poly7 poly_xz(double qx, double qz) {
    return {cplx(qx * qz), -qz, -qx, 0, 0, 1, 0};
}
inline Poly7 poly_y2() { return {0, 0, 0, 0, 0, 0, cplx(1.0)}; }

// -(1/2) Laplacian applied to a Gaussian, divided by the Gaussian: a basis
// polynomial with coefficients from the packet parameters.
inline Poly7 kinetic_poly(const GaussianParams& g) {
    // Collected from -(1/2)[(grad u)^2 + lap u] with u the packet exponent;
    // p holds the terms scaled by -1/(-2), final result is -2 p.
    Poly7 p{};
    p += (g.a_xx * g.a_xx + g.a_xz * g.a_xz) * poly_x2(g.q_x);
    p += (g.a_zz * g.a_zz + g.a_xz * g.a_xz) * poly_z2(g.q_z);
    p += (2.0 * g.a_xz * (g.a_xx + g.a_zz)) * poly_xz(g.q_x, g.q_z);
    p += (g.a_yy * g.a_yy) * poly_y2();
    p += (-I * (g.a_xx * g.p_x + g.a_xz * g.p_z)) * poly_x(g.q_x);
    p += (-I * (g.a_zz * g.p_z + g.a_xz * g.p_x)) * poly_z(g.q_z);
    p += (-0.25 * (g.p_x * g.p_x + g.p_z * g.p_z) -
          0.5 * (g.a_xx + g.a_yy + g.a_zz)) *
         poly_one();
    return (-2.0) * p;
}

// d g / d z_slot = P(x) g for the real parameter slot (per-Gaussian index).
inline Poly7 derivative_poly(const GaussianParams& g, int slot) {
    switch (slot) {
        case slot_re_axx: return cplx(-1.0) * poly_x2(g.q_x);
        case slot_im_axx: return (-I) * poly_x2(g.q_x);
        case slot_re_ayy: return cplx(-1.0) * poly_y2();
        case slot_im_ayy: return (-I) * poly_y2();
        case slot_re_azz: return cplx(-1.0) * poly_z2(g.q_z);
        case slot_im_azz: return (-I) * poly_z2(g.q_z);
        case slot_re_axz: return cplx(-2.0) * poly_xz(g.q_x, g.q_z);
        case slot_im_axz: return (-2.0 * I) * poly_xz(g.q_x, g.q_z);
        case slot_qx: {
            Poly7 p = 2.0 * g.a_xx * poly_x(g.q_x);
            p += 2.0 * g.a_xz * poly_z(g.q_z);
            p += (-I * g.p_x) * poly_one();
            return p;
        }
        case slot_qz: {
            Poly7 p = 2.0 * g.a_zz * poly_z(g.q_z);
            p += 2.0 * g.a_xz * poly_x(g.q_x);
            p += (-I * g.p_z) * poly_one();
            return p;
        }
        case slot_px: return I * poly_x(g.q_x);
        case slot_pz: return I * poly_z(g.q_z);
        case slot_re_gamma: return cplx(-1.0) * poly_one();
        case slot_im_gamma: return (-I) * poly_one();
        default: throw invalid_argument_error("derivative_poly: frozen slot");
    }
}

// <B_i B_j> entry of the moment table (integral, not normalized).
inline cplx table_entry(const PairMoments& pm, int i, int j) {
    return pm.s0 * pm.mxz[basis_ax[i] + basis_ax[j]][basis_az[i] + basis_az[j]] *
           pm.my[basis_ay[i] + basis_ay[j]];
}

// <B_i> vector of plain basis moments (integral).
inline Vec7 basis_vector(const PairMoments& pm) {
    Vec7 v{};
    for (int i = 0; i < basis_size; ++i)
        v[i] = pm.s0 * pm.mxz[basis_ax[i]][basis_az[i]] * pm.my[basis_ay[i]];
    return v;
}

// ---------------------------------------------------------------------------
// Dipole-dipole double integrals.
//
// For rho1, rho2 complex Gaussians, evaluates for every basis monomial B_i
//   D_i = \iint B_i(r) rho1(r) K(r-r') rho2(r') d3r d3r'
// with the bare dipolar kernel K(r) = (1 - 3 cos^2 theta)/r^3. In Fourier
// space K~(k) = (4pi/3)(3 k_d^2/k^2 - 1); the 1/k^2 is lifted with
// 1/k^2 = \int_0^inf exp(-s k^2) ds, which turns each term into Gaussian
// k-moments and leaves a single absolutely convergent 1d integral over s.
// ---------------------------------------------------------------------------

namespace detail {

// Quadratic polynomial in (k_x, k_z).
struct KPoly {
    cplx c0{}, cx{}, cz{}, cxx{}, czz{}, cxz{};
};

struct DdiPrep {
    cplx s10_s20{};        // product of the two plain Gaussian integrals
    Block2 cmat{};         // C = M1^-1 + M2^-1 (x,z block)
    cplx cyy{};
    cplx nux{}, nuz{};     // nu = (M1^-1 b1 - M2^-1 b2)/2
    cplx nuy{};            // zero for pair integrals, r_y for pointwise potentials
    KPoly ep[basis_size];  // (x,z) part of E_i(k)
    cplx eyy[basis_size];  // coefficient of k_y^2 in E_i(k)
};

inline DdiPrep ddi_prepare(const GaussExponent& r1, const GaussExponent& r2) {
    DdiPrep d;
    const Block2 i1 = inverse(r1.m), i2 = inverse(r2.m);
    const cplx i1yy = 1.0 / r1.myy, i2yy = 1.0 / r2.myy;
    d.cmat = {i1.xx + i2.xx, i1.zz + i2.zz, i1.xz + i2.xz};
    d.cyy = i1yy + i2yy;
    const cplx a1x = i1.xx * r1.bx + i1.xz * r1.bz;  // M1^-1 b1
    const cplx a1z = i1.xz * r1.bx + i1.zz * r1.bz;
    const cplx a2x = i2.xx * r2.bx + i2.xz * r2.bz;
    const cplx a2z = i2.xz * r2.bx + i2.zz * r2.bz;
    d.nux = 0.5 * (a1x - a2x);
    d.nuz = 0.5 * (a1z - a2z);

    const double pi = M_PI;
    auto plain = [&pi](const GaussExponent& e) {
        const Block2 mi = inverse(e.m);
        const cplx quad = 0.25 * (mi.xx * e.bx * e.bx + 2.0 * mi.xz * e.bx * e.bz +
                                  mi.zz * e.bz * e.bz);
        return pi / std::sqrt(det2(e.m)) * std::sqrt(pi / e.myy) * std::exp(e.c + quad);
    };
    d.s10_s20 = plain(r1) * plain(r2);

    // rho1's k-shifted mean is m(k) = alpha + L k with alpha = M1^-1 b1 / 2 and
    // L = (i/2) M1^-1; its covariance is Sigma1 = M1^-1 / 2.
    const cplx alx = 0.5 * a1x, alz = 0.5 * a1z;
    const cplx lxx = 0.5 * I * i1.xx, lzz = 0.5 * I * i1.zz, lxz = 0.5 * I * i1.xz;
    const cplx lyy = 0.5 * I * i1yy;
    const cplx s1xx = 0.5 * i1.xx, s1zz = 0.5 * i1.zz, s1xz = 0.5 * i1.xz;
    const cplx s1yy = 0.5 * i1yy;

    // E_1
    d.ep[0].c0 = 1.0;
    // E_x, E_z (means are linear in k)
    d.ep[1] = {alx, lxx, lxz, 0, 0, 0};
    d.ep[2] = {alz, lxz, lzz, 0, 0, 0};
    // E_{x^2} = m_x^2 + Sigma1_xx
    d.ep[3] = {alx * alx + s1xx, 2.0 * alx * lxx, 2.0 * alx * lxz,
               lxx * lxx, lxz * lxz, 2.0 * lxx * lxz};
    // E_{z^2}
    d.ep[4] = {alz * alz + s1zz, 2.0 * alz * lxz, 2.0 * alz * lzz,
               lxz * lxz, lzz * lzz, 2.0 * lxz * lzz};
    // E_{xz} = m_x m_z + Sigma1_xz
    d.ep[5] = {alx * alz + s1xz, alx * lxz + alz * lxx, alx * lzz + alz * lxz,
               lxx * lxz, lxz * lzz, lxx * lzz + lxz * lxz};
    // E_{y^2} = (L_yy k_y)^2 + Sigma1_yy
    d.ep[6].c0 = s1yy;
    for (int i = 0; i < basis_size; ++i) d.eyy[i] = 0.0;
    d.eyy[6] = lyy * lyy;
    return d;
}

// Gaussian k-moment data at damping s (the s = 0 entry with B = C/4 serves the
// isotropic subtraction term).
struct KGauss {
    cplx w{};                     // det(B)^{-1/2} exp(-nu^T B^-1 nu / 4)
    cplx mux{}, muz{};            // k-mean (i/2) B^-1 nu
    cplx sxx{}, szz{}, sxz{};     // k-covariance B^-1 / 2 (x,z block)
    cplx syy{};
    cplx y2{}, y4{};              // E[k_y^2], E[k_y^4]
    cplx m2[5][5]{};              // E[kx^a kz^b], a+b <= 4
};

inline KGauss kgauss_at(const DdiPrep& d, double s, int max_deg) {
    KGauss k;
    Block2 b{0.25 * d.cmat.xx + s, 0.25 * d.cmat.zz + s, 0.25 * d.cmat.xz};
    const cplx byy = 0.25 * d.cyy + s;
    const Block2 bi = inverse(b);
    const cplx quad = 0.25 * (bi.xx * d.nux * d.nux + 2.0 * bi.xz * d.nux * d.nuz +
                              bi.zz * d.nuz * d.nuz + d.nuy * d.nuy / byy);
    k.w = 1.0 / (std::sqrt(det2(b)) * std::sqrt(byy)) * std::exp(-quad);
    k.mux = 0.5 * I * (bi.xx * d.nux + bi.xz * d.nuz);
    k.muz = 0.5 * I * (bi.xz * d.nux + bi.zz * d.nuz);
    k.sxx = 0.5 * bi.xx;
    k.szz = 0.5 * bi.zz;
    k.sxz = 0.5 * bi.xz;
    k.syy = 0.5 / byy;
    const cplx muy = 0.5 * I * d.nuy / byy;
    k.y2 = muy * muy + k.syy;
    k.y4 = muy * muy * muy * muy + 6.0 * muy * muy * k.syy + 3.0 * k.syy * k.syy;
    k.m2[0][0] = 1.0;
    for (int bb = 1; bb <= max_deg; ++bb)
        k.m2[0][bb] = k.muz * k.m2[0][bb - 1] +
                      (bb >= 2 ? double(bb - 1) * k.szz * k.m2[0][bb - 2] : cplx(0.0));
    for (int a = 1; a <= max_deg; ++a)
        for (int bb = 0; a + bb <= max_deg; ++bb)
            k.m2[a][bb] = k.mux * k.m2[a - 1][bb] +
                          (a >= 2 ? double(a - 1) * k.sxx * k.m2[a - 2][bb] : cplx(0.0)) +
                          (bb >= 1 ? double(bb) * k.sxz * k.m2[a - 1][bb - 1] : cplx(0.0));
    return k;
}

// <E_i k_d^2> (with_kd2 = true) or <E_i> under the k-Gaussian.
inline std::array<cplx, basis_size> e_moments(const DdiPrep& d, const KGauss& k,
                                              DipoleAxis axis, bool with_kd2) {
    std::array<cplx, basis_size> out{};
    const cplx y2 = k.y2, y4 = k.y4;
    for (int i = 0; i < basis_size; ++i) {
        const KPoly& p = d.ep[i];
        if (!with_kd2) {
            const cplx pexp = p.c0 + p.cx * k.mux + p.cz * k.muz +
                              p.cxx * k.m2[2][0] + p.czz * k.m2[0][2] +
                              p.cxz * k.m2[1][1];
            out[i] = pexp + d.eyy[i] * y2;
        } else if (axis == DipoleAxis::y_repulsive) {
            const cplx pexp = p.c0 + p.cx * k.mux + p.cz * k.muz +
                              p.cxx * k.m2[2][0] + p.czz * k.m2[0][2] +
                              p.cxz * k.m2[1][1];
            out[i] = pexp * y2 + d.eyy[i] * y4;
        } else {  // dipoles along x: weight with k_x^2
            const cplx pkx2 = p.c0 * k.m2[2][0] + p.cx * k.m2[3][0] +
                              p.cz * k.m2[2][1] + p.cxx * k.m2[4][0] +
                              p.czz * k.m2[2][2] + p.cxz * k.m2[3][1];
            out[i] = pkx2 + d.eyy[i] * y2 * k.m2[2][0];
        }
    }
    return out;
}

}  // namespace detail

inline std::array<cplx, basis_size> ddi_basis_integrals(const GaussExponent& rho1,
                                                        const GaussExponent& rho2,
                                                        DipoleAxis axis, double rel_tol) {
    using detail::ddi_prepare;
    using detail::e_moments;
    using detail::kgauss_at;
    const detail::DdiPrep d = ddi_prepare(rho1, rho2);
    const int deg = (axis == DipoleAxis::x_attractive) ? 4 : 2;

    // Isotropic subtraction term at B = C/4.
    const detail::KGauss k0 = kgauss_at(d, 0.0, deg);
    const std::array<cplx, basis_size> e0 = e_moments(d, k0, axis, false);

    // s-integral over the damped k_d^2/k^2 part; the substitution
    // s = (1 - tau^2)/tau^2 keeps the integrand analytic at both endpoints.
    quad::AdaptiveOptions opt;
    opt.rel_tol = rel_tol;
    auto integrand = [&](double tau) -> std::array<cplx, basis_size> {
        const double t2 = tau * tau;
        const double s = (1.0 - t2) / t2;
        const detail::KGauss kg = kgauss_at(d, s, deg);
        std::array<cplx, basis_size> v = e_moments(d, kg, axis, true);
        const double jac = 2.0 / (tau * t2);
        for (auto& x : v) x *= kg.w * jac;
        return v;
    };
    const std::array<cplx, basis_size> si =
        quad::integrate_adaptive_vec<basis_size>(integrand, 0.0, 1.0, opt);

    std::array<cplx, basis_size> out{};
    const double pref = 1.0 / (6.0 * std::sqrt(M_PI));
    for (int i = 0; i < basis_size; ++i)
        out[i] = d.s10_s20 * pref * (3.0 * si[i] - k0.w * e0[i]);
    return out;
}

// Dipolar potential of a Gaussian density at one point,
//   Phi(r) = \int K(r-r') rho(r') d3r',
// obtained from the general machinery with rho1 degenerated to a delta at r.
inline cplx ddi_potential_at(const GaussExponent& rho, DipoleAxis axis, double x,
                             double y, double z, double rel_tol) {
    detail::DdiPrep d;
    const Block2 mi = inverse(rho.m);
    const cplx miyy = 1.0 / rho.myy;
    d.cmat = mi;
    d.cyy = miyy;
    d.nux = x - 0.5 * (mi.xx * rho.bx + mi.xz * rho.bz);
    d.nuz = z - 0.5 * (mi.xz * rho.bx + mi.zz * rho.bz);
    d.nuy = y;
    d.s10_s20 = gauss_integral(rho);
    d.ep[0].c0 = 1.0;

    const int deg = (axis == DipoleAxis::x_attractive) ? 2 : 0;
    const detail::KGauss k0 = detail::kgauss_at(d, 0.0, deg);
    quad::AdaptiveOptions opt;
    opt.rel_tol = rel_tol;
    opt.abs_tol = 1e-14 * std::abs(d.s10_s20);
    auto integrand = [&](double tau) -> cplx {
        const double t2 = tau * tau;
        const double s = (1.0 - t2) / t2;
        const detail::KGauss kg = detail::kgauss_at(d, s, deg);
        const cplx kd2 = (axis == DipoleAxis::y_repulsive) ? kg.y2 : kg.m2[2][0];
        return kg.w * kd2 * 2.0 / (tau * t2);
    };
    const cplx si = quad::integrate_adaptive(integrand, 0.0, 1.0, opt);
    const double pref = 1.0 / (6.0 * std::sqrt(M_PI));
    return d.s10_s20 * pref * (3.0 * si - k0.w);
}

}  // namespace ptbec

#endif
