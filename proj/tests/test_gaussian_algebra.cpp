#include <doctest.h>

#include <random>

#include "elements.hpp"
#include "model.hpp"
#include "oracles.hpp"

using namespace ptbec;

namespace {

std::mt19937_64 rng(20240817);

double uni(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// Random normalizable packet with O(1) widths and moderate motion.
GaussianParams random_packet() {
    GaussianParams g;
    g.a_xx = {uni(0.4, 3.0), uni(-1.0, 1.0)};
    g.a_yy = {uni(0.4, 3.0), uni(-1.0, 1.0)};
    g.a_zz = {uni(0.4, 3.0), uni(-1.0, 1.0)};
    g.q_x = uni(-0.8, 0.8);
    g.q_z = uni(-0.8, 0.8);
    g.p_x = uni(-1.5, 1.5);
    g.p_z = uni(-1.5, 1.5);
    g.gamma_c = {uni(-0.5, 0.5), uni(-1.0, 1.0)};
    return g;
}

GaussianParams random_packet_xz() {
    GaussianParams g = random_packet();
    const double cap = 0.8 * std::sqrt(g.a_xx.real() * g.a_zz.real());
    g.a_xz = {uni(-cap, cap), uni(-0.5, 0.5)};
    return g;
}

GaussianParams normalized_packet(GaussianParams g) {
    const double n2 = overlap(g, g).real();
    g.gamma_c += 0.5 * std::log(n2);
    return g;
}

VariationalState make_state(const GaussianParams& g1, const GaussianParams& g2,
                            const PhysicalParams& p) {
    VariationalState s;
    s.g1 = g1;
    s.g2 = g2;
    s.params = p;
    return s;
}

}  // namespace

TEST_CASE("overlap: closed form vs 3d quadrature on random packets") {
    for (int trial = 0; trial < 8; ++trial) {
        const GaussianParams gl = (trial % 2) ? random_packet_xz() : random_packet();
        const GaussianParams gk = (trial % 2) ? random_packet_xz() : random_packet();
        const cplx closed = overlap(gl, gk);

        const GaussExponent pe = pair_exponent(gl, gk);
        oracle::Vec3 lo, hi;
        oracle::gauss_box({pe}, lo, hi);
        const oracle::Exponent3 e3 = oracle::to_exponent3(pe);
        const cplx numeric = oracle::box3_integral(
            [&](double x, double y, double z) {
                return oracle::exp3_value(e3, {x, y, z});
            },
            lo, hi, 120);
        CHECK(std::abs(closed - numeric) < 1e-8 * std::abs(closed));
    }
}

TEST_CASE("overlap: normalization and separation law") {
    GaussianParams g = normalized_packet(random_packet());
    CHECK(std::abs(overlap(g, g) - 1.0) < 1e-13);

    // Two identical real-width packets a distance d apart: |<g1|g2>| = e^{-a d^2/2}.
    GaussianParams a = g, b = g;
    a.a_xx = b.a_xx = 1.7;
    a.a_yy = b.a_yy = 0.9;
    a.a_zz = b.a_zz = 1.2;
    a.p_x = b.p_x = 0.0;
    a.p_z = b.p_z = 0.0;
    a.q_z = b.q_z = 0.0;
    const double d = 1.3;
    a.q_x = -0.5 * d;
    b.q_x = +0.5 * d;
    a.gamma_c = b.gamma_c = 0.0;
    a = normalized_packet(a);
    b.gamma_c = a.gamma_c;
    CHECK(std::abs(overlap(a, b)) ==
          doctest::Approx(std::exp(-1.7 * d * d / 2.0)).epsilon(1e-12));

    // Widely separated packets decouple.
    b.q_x = 40.0;
    CHECK(std::abs(overlap(a, b)) < 1e-12);
}

TEST_CASE("overlap: non-normalizable pair throws") {
    GaussianParams g = random_packet();
    GaussianParams bad = g;
    bad.a_xx = {-2.0 * g.a_xx.real() - 1.0, 0.0};
    CHECK_THROWS_AS((void)overlap(g, bad), invalid_state_error);
}

TEST_CASE("kinetic element: isotropic scaling law and quadrature cross-check") {
    // Normalized isotropic real packet of width a: <g|-Lap/2|g> = (3/2) a.
    for (double a : {0.5, 1.0, 2.3}) {
        GaussianParams g;
        g.a_xx = g.a_yy = g.a_zz = a;
        g = normalized_packet(g);
        VariationalState s = make_state(g, g, PhysicalParams{});
        s.g2.gamma_c += 60.0;  // switch the second packet off
        const ElementTable t = compute_elements(s);
        CHECK(t.kin[0][0].real() == doctest::Approx(1.5 * a).epsilon(1e-12));
        CHECK(std::abs(t.kin[0][0].imag()) < 1e-14);
    }

    // Random pair vs numerical <grad gl, grad gk>/2 via the polynomial form.
    const GaussianParams gl = random_packet_xz();
    const GaussianParams gk = random_packet_xz();
    VariationalState s = make_state(gl, gk, PhysicalParams{});
    const ElementTable t = compute_elements(s);

    const GaussExponent pe = pair_exponent(gl, gk);
    const oracle::Exponent3 e3 = oracle::to_exponent3(pe);
    const GaussExponent ke = ket_exponent(gk);
    oracle::Vec3 lo, hi;
    oracle::gauss_box({pe}, lo, hi);
    auto lap_gk_over_gk = [&](double x, double y, double z) {
        // numerically differentiate the ket Gaussian
        const double h = 1e-4;
        auto f = [&](double xx, double yy, double zz) {
            return gauss_value(ke, xx, yy, zz);
        };
        const cplx f0 = f(x, y, z);
        const cplx lap = (f(x + h, y, z) + f(x - h, y, z) + f(x, y + h, z) +
                          f(x, y - h, z) + f(x, y, z + h) + f(x, y, z - h) - 6.0 * f0) /
                         (h * h);
        return lap;
    };
    const cplx numeric = oracle::box3_integral(
        [&](double x, double y, double z) {
            const cplx bra = std::conj(gauss_value(ket_exponent(gl), x, y, z));
            return -0.5 * bra * lap_gk_over_gk(x, y, z);
        },
        lo, hi, 72);
    CHECK(std::abs(t.kin[0][1] - numeric) < 2e-6 * std::abs(numeric));
}

TEST_CASE("external element: conjugation under PT and realness at Gamma=0") {
    PhysicalParams p;
    p.gamma = 0.23;
    const GaussianParams gl = random_packet();
    const GaussianParams gk = random_packet();
    VariationalState s = make_state(gl, gk, p);
    const ElementTable t = compute_elements(s);

    VariationalState spt = make_state(pt_of(gl), pt_of(gk), p);
    const ElementTable tpt = compute_elements(spt);
    CHECK(std::abs(tpt.ext[0][1] - std::conj(t.ext[0][1])) < 1e-10 * std::abs(t.ext[0][1]));

    // Real pair at Gamma = 0 gives a real element.
    PhysicalParams p0;
    p0.gamma = 0.0;
    GaussianParams gr = random_packet();
    gr.a_xx = gr.a_xx.real();
    gr.a_yy = gr.a_yy.real();
    gr.a_zz = gr.a_zz.real();
    gr.p_x = gr.p_z = 0.0;
    gr.gamma_c = gr.gamma_c.real();
    VariationalState sr = make_state(gr, gr, p0);
    const ElementTable tr = compute_elements(sr);
    CHECK(std::abs(tr.ext[0][0].imag()) < 1e-12 * std::abs(tr.ext[0][0]));

    // Quadrature cross-check of one external element.
    const GaussExponent pe = pair_exponent(gl, gk);
    oracle::Vec3 lo, hi;
    oracle::gauss_box({pe}, lo, hi);
    const oracle::Exponent3 e3 = oracle::to_exponent3(pe);
    const cplx numeric = oracle::box3_integral(
        [&](double x, double y, double z) {
            return oracle::exp3_value(e3, {x, y, z}) * external_potential(p, x, y, z);
        },
        lo, hi, 200);
    CHECK(std::abs(t.ext[0][1] - numeric) < 1e-8 * std::abs(numeric));
}

TEST_CASE("contact element: closed form, linearity, quadrature cross-check") {
    PhysicalParams p;
    p.na = -0.03;
    p.nadd = 0.0;

    // Na = 0 gives exactly zero.
    PhysicalParams p0 = p;
    p0.na = 0.0;
    VariationalState s0 = make_state(random_packet(), random_packet(), p0);
    CHECK(contact_element(s0, 0, 0) == cplx(0.0));

    // Single isotropic normalized packet: 4 pi Na \int |g|^4 = 4 pi Na (a/pi)^{3/2}.
    for (double a : {0.7, 1.9}) {
        GaussianParams g;
        g.a_xx = g.a_yy = g.a_zz = a;
        g = normalized_packet(g);
        VariationalState s = make_state(g, g, p);
        s.g2.gamma_c += 60.0;
        const cplx el = contact_element(s, 0, 0);
        const double expected = 4.0 * M_PI * p.na * std::pow(a / M_PI, 1.5);
        CHECK(el.real() == doctest::Approx(expected).epsilon(1e-10));
    }

    // Random two-packet state vs quadrature with the pointwise density.
    const VariationalState s =
        make_state(random_packet(), random_packet(), p);
    const ElementTable t = compute_elements(s);
    const GaussExponent pe = pair_exponent(s.g1, s.g2);
    oracle::Vec3 lo, hi;
    oracle::gauss_box({pair_exponent(s.g1, s.g1), pair_exponent(s.g2, s.g2)}, lo, hi);
    const cplx numeric = oracle::box3_integral(
        [&](double x, double y, double z) {
            const cplx bra = std::conj(gauss_value(ket_exponent(s.g1), x, y, z));
            const cplx ket = gauss_value(ket_exponent(s.g2), x, y, z);
            const cplx psi = evaluate_wavefunction(s, x, y, z);
            return bra * ket * 4.0 * M_PI * p.na * std::norm(psi);
        },
        lo, hi, 120);
    CHECK(std::abs(t.con[0][1] - numeric) < 1e-7 * std::abs(numeric));

    // Doubling Na doubles the element.
    VariationalState s2 = s;
    s2.params.na = 2.0 * p.na;
    CHECK(std::abs(contact_element(s2, 0, 1) - 2.0 * contact_element(s, 0, 1)) <
          1e-12 * std::abs(contact_element(s2, 0, 1)));

    // Global phase invariance of the contact element.
    VariationalState sp = s;
    sp.g1.gamma_c -= cplx(0.0, 0.77);
    sp.g2.gamma_c -= cplx(0.0, 0.77);
    CHECK(std::abs(contact_element(sp, 0, 1) * std::exp(cplx(0, 0.0)) -
                   contact_element(s, 0, 1)) < 1e-11);
}

TEST_CASE("ddi element: zero coupling, isotropy, exchange symmetry") {
    PhysicalParams p;
    p.nadd = 0.0;
    VariationalState s = make_state(random_packet(), random_packet(), p);
    CHECK(ddi_element(s, 0, 0) == cplx(0.0));

    // Spherically symmetric density: dipolar mean field vanishes.
    p.nadd = 0.3;
    GaussianParams g;
    g.a_xx = g.a_yy = g.a_zz = 1.3;
    g = normalized_packet(g);
    VariationalState iso = make_state(g, g, p);
    iso.g2.gamma_c += 60.0;
    CHECK(std::abs(ddi_element(iso, 0, 0)) < 1e-10);

    // D(l,k;m,n) = conj(D(k,l;n,m)) on the pair level.
    const GaussianParams ga = random_packet(), gb = random_packet();
    const Vec7 d1 = ddi_basis_integrals(pair_exponent(ga, gb), pair_exponent(gb, ga),
                                        DipoleAxis::y_repulsive, 1e-11);
    const Vec7 d2 = ddi_basis_integrals(pair_exponent(gb, ga), pair_exponent(ga, gb),
                                        DipoleAxis::y_repulsive, 1e-11);
    CHECK(std::abs(d1[0] - std::conj(d2[0])) < 1e-10 * std::abs(d1[0]));
}

TEST_CASE("ddi element: Fourier-space evaluation vs real-space oracle") {
    for (int trial = 0; trial < 4; ++trial) {
        const GaussianParams g1 = normalized_packet(random_packet());
        const GaussianParams g2 = normalized_packet(random_packet());
        const GaussianParams g3 = normalized_packet(random_packet());
        const GaussianParams g4 = normalized_packet(random_packet());
        const DipoleAxis axis =
            (trial % 2) ? DipoleAxis::x_attractive : DipoleAxis::y_repulsive;

        const GaussExponent r1 = pair_exponent(g1, g2);
        const GaussExponent r2 = pair_exponent(g3, g4);
        const cplx fourier = ddi_basis_integrals(r1, r2, axis, 1e-11)[0];
        const cplx realspace = oracle::ddi_realspace(r1, r2, axis, 1e-8);
        CHECK(std::abs(fourier - realspace) < 1e-5 * std::abs(realspace));
    }
}

TEST_CASE("ddi element: linearity in the coupling") {
    PhysicalParams p;
    p.nadd = 0.3;
    const VariationalState s = make_state(random_packet(), random_packet(), p);
    VariationalState s2 = s;
    s2.params.nadd = 0.6;
    const cplx d1 = ddi_element(s, 0, 1, 1e-11);
    const cplx d2 = ddi_element(s2, 0, 1, 1e-11);
    CHECK(std::abs(d2 - 2.0 * d1) < 1e-9 * std::abs(d2));
}

TEST_CASE("element tables: hermitian pairing for real operators") {
    PhysicalParams p;
    p.gamma = 0.0;  // real external potential
    p.na = -0.02;
    p.nadd = 0.25;
    const VariationalState s = make_state(random_packet(), random_packet(), p);
    const ElementTable t = compute_elements(s);
    CHECK(std::abs(t.ovl[0][1] - std::conj(t.ovl[1][0])) < 1e-12);
    CHECK(std::abs(t.kin[0][1] - std::conj(t.kin[1][0])) < 1e-11 * std::abs(t.kin[0][1]));
    CHECK(std::abs(t.ext[0][1] - std::conj(t.ext[1][0])) < 1e-11 * std::abs(t.ext[0][1]));
    CHECK(std::abs(t.con[0][1] - std::conj(t.con[1][0])) < 1e-9 * std::abs(t.con[0][1]));
    CHECK(std::abs(t.ddi[0][1] - std::conj(t.ddi[1][0])) < 1e-8 * std::abs(t.ddi[0][1]));
}

TEST_CASE("mean-field energies: gauge invariance and Hermitian realness") {
    PhysicalParams p;
    p.na = -0.015;
    p.nadd = 0.2;
    p.gamma = 0.0;
    GaussianParams g1 = random_packet(), g2 = random_packet();
    // Make the state real so the Hermitian case gives real energies.
    g1.a_xx = g1.a_xx.real();
    g1.a_yy = g1.a_yy.real();
    g1.a_zz = g1.a_zz.real();
    g1.p_x = g1.p_z = 0.0;
    g1.gamma_c = g1.gamma_c.real();
    g2 = g1;
    g2.q_x = -g1.q_x + 0.3;
    const VariationalState s = make_state(g1, g2, p);
    const Energies e = mean_field_energies(s);
    CHECK(std::abs(e.e_mf.imag()) < 1e-10 * std::abs(e.e_mf.real()));
    CHECK(std::abs(e.mu.imag()) < 1e-10 * std::abs(e.mu.real()));

    // Shared phase shift leaves both functionals unchanged.
    VariationalState sp = s;
    sp.g1.gamma_c += cplx(0.0, 0.4);
    sp.g2.gamma_c += cplx(0.0, 0.4);
    const Energies ep = mean_field_energies(sp);
    CHECK(std::abs(ep.e_mf - e.e_mf) < 1e-10 * std::abs(e.e_mf));
    CHECK(std::abs(ep.mu - e.mu) < 1e-10 * std::abs(e.mu));
}

TEST_CASE("pointwise dipolar potential matches element integral") {
    PhysicalParams p;
    p.na = 0.0;
    p.nadd = 0.3;
    const VariationalState s =
        make_state(normalized_packet(random_packet()), normalized_packet(random_packet()), p);
    const cplx element = ddi_element(s, 0, 1, 1e-11);

    const GaussExponent pe = pair_exponent(s.g1, s.g2);
    oracle::Vec3 lo, hi;
    oracle::gauss_box({pe}, lo, hi);
    const oracle::Exponent3 e3 = oracle::to_exponent3(pe);
    const cplx numeric = oracle::box3_integral(
        [&](double x, double y, double z) {
            return oracle::exp3_value(e3, {x, y, z}) *
                   ddi_potential_value(s, x, y, z, 1e-9) / (3.0 * p.nadd);
        },
        lo, hi, 64);
    // integrand includes the 3 Nadd prefactor once
    CHECK(std::abs(3.0 * p.nadd * numeric - element) < 2e-4 * std::abs(element));
}
