#include <doctest.h>

#include <random>

#include "model.hpp"
#include "oracles.hpp"

using namespace ptbec;

namespace {

std::mt19937_64 rng(77123);
double uni(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

GaussianParams well_packet(double qx, cplx gamma0 = {}) {
    GaussianParams g;
    g.a_xx = 17.9;
    g.a_yy = 2.24;
    g.a_zz = 17.9;
    g.q_x = qx;
    g.gamma_c = gamma0;
    return g;
}

}  // namespace

TEST_CASE("external potential: center values and symmetry") {
    PhysicalParams p;

    p.gamma = 0.2;
    CHECK(external_potential(p, 0, 0, 0).imag() == doctest::Approx(0.0).epsilon(1e-15));

    p.gamma = 0.0;
    // hand evaluation at the origin: -2 V0 exp(-l^2/(8 Lx^2)) = -160 e^{-2}
    CHECK(external_potential(p, 0, 0, 0).real() ==
          doctest::Approx(-160.0 * std::exp(-2.0)).epsilon(1e-14));

    // gain sits in the left well (x = -l/2), loss in the right well
    p.gamma = 0.2;
    CHECK(external_potential(p, -0.5, 0, 0).imag() > 0.0);
    CHECK(external_potential(p, +0.5, 0, 0).imag() < 0.0);

    // PT symmetry V(r) = conj(V(-r)) for random points and parameters
    for (int i = 0; i < 32; ++i) {
        PhysicalParams q;
        q.gamma = uni(0.0, 0.5);
        q.v0 = uni(10.0, 100.0);
        const double x = uni(-2, 2), y = uni(-3, 3), z = uni(-2, 2);
        const cplx a = external_potential(q, x, y, z);
        const cplx b = std::conj(external_potential(q, -x, -y, -z));
        CHECK(std::abs(a - b) < 1e-13 * std::abs(a));
        if (q.gamma == 0.0) CHECK(a.imag() == 0.0);
    }

    // Gamma = 0 makes the potential real everywhere
    PhysicalParams r;
    r.gamma = 0.0;
    for (int i = 0; i < 16; ++i)
        CHECK(external_potential(r, uni(-2, 2), uni(-2, 2), uni(-2, 2)).imag() == 0.0);
}

TEST_CASE("wavefunction evaluation: normalized peak and suppressed packet") {
    GaussianParams g = well_packet(-0.5);
    VariationalState s;
    s.g1 = g;
    s.g2 = well_packet(0.5);
    s.g2.gamma_c = 80.0;  // Re gamma -> +inf switches the packet off
    s.params = PhysicalParams{};

    // normalize g1 alone
    const double n2 = overlap(s.g1, s.g1).real();
    s.g1.gamma_c += 0.5 * std::log(n2);

    const cplx peak = evaluate_wavefunction(s, s.g1.q_x, 0.0, s.g1.q_z);
    const double expected = std::pow(2.0 * s.g1.a_xx.real() * 2.0 * s.g1.a_yy.real() *
                                         2.0 * s.g1.a_zz.real() / (M_PI * M_PI * M_PI),
                                     0.25);
    CHECK(std::abs(peak) == doctest::Approx(expected).epsilon(1e-10));

    // suppressed second packet: value equals the single-Gaussian evaluation
    const cplx single = gauss_value(ket_exponent(s.g1), 0.3, 0.1, -0.2);
    CHECK(std::abs(evaluate_wavefunction(s, 0.3, 0.1, -0.2) - single) < 1e-12);
}

TEST_CASE("apply_pt: involution and pointwise identity") {
    VariationalState s;
    s.g1 = well_packet(-0.45, {0.2, 0.3});
    s.g1.a_xx += cplx(0, 1.1);
    s.g1.p_x = 0.7;
    s.g2 = well_packet(0.52, {0.1, -0.2});
    s.g2.a_zz += cplx(0, -0.8);
    s.g2.p_z = -0.3;
    s.params = PhysicalParams{};

    const VariationalState t = apply_pt(apply_pt(s));
    CHECK(param_distance(t.to_vector(), s.to_vector()) < 1e-14);

    // Psi(r) = conj((PT Psi)(-r))
    const VariationalState pt = apply_pt(s);
    for (int i = 0; i < 8; ++i) {
        const double x = uni(-1, 1), y = uni(-1, 1), z = uni(-1, 1);
        const cplx lhs = evaluate_wavefunction(s, x, y, z);
        const cplx rhs = std::conj(evaluate_wavefunction(pt, -x, -y, -z));
        CHECK(std::abs(lhs - rhs) < 1e-12 * (1.0 + std::abs(lhs)));
    }
}

TEST_CASE("pt_residual: constructed symmetry, gauge invariance, broken states") {
    // Exactly PT-paired parameters give zero residual.
    VariationalState s;
    s.g1 = well_packet(-0.5, {0.1, 0.4});
    s.g1.a_xx += cplx(0, 0.6);
    s.g1.p_x = 0.2;
    s.g2 = pt_of(s.g1);
    s.params = PhysicalParams{};
    s = normalized(s);
    CHECK(pt_residual(s) < 1e-12);

    // Invariant under a shared imaginary shift of both gammas.
    VariationalState sp = s;
    sp.g1.gamma_c += cplx(0.0, 1.3);
    sp.g2.gamma_c += cplx(0.0, 1.3);
    CHECK(std::abs(pt_residual(sp) - pt_residual(s)) < 1e-12);

    // A strongly one-sided state is far from PT symmetric.
    VariationalState broken = s;
    broken.g2.gamma_c += 3.0;  // suppress the right packet
    broken = normalized(broken);
    CHECK(pt_residual(broken) > 0.1);
}

TEST_CASE("canonical order and gauge fixing") {
    VariationalState s;
    s.g1 = well_packet(0.5, {0.3, 0.9});
    s.g2 = well_packet(-0.5, {0.1, 0.2});
    s.params = PhysicalParams{};
    VariationalState g = gauge_fixed(s);
    CHECK(g.g1.q_x < g.g2.q_x);
    CHECK(g.g1.gamma_c.imag() == 0.0);
    CHECK(norm_squared(g) == doctest::Approx(1.0).epsilon(1e-12));

    // Gauge fixing is idempotent.
    VariationalState g2 = gauge_fixed(g);
    CHECK(param_distance(g.to_vector(), g2.to_vector()) < 1e-13);
}

TEST_CASE("norm consistency: analytic overlaps vs quadrature") {
    VariationalState s;
    s.g1 = well_packet(-0.5, {0.0, 0.0});
    s.g2 = well_packet(0.5, {0.2, 1.0});
    s.params = PhysicalParams{};
    const double n2 = norm_squared(s);

    oracle::Vec3 lo, hi;
    oracle::gauss_box({pair_exponent(s.g1, s.g1), pair_exponent(s.g2, s.g2)}, lo, hi);
    const double numeric = oracle::box3_integral(
                               [&](double x, double y, double z) {
                                   return std::norm(evaluate_wavefunction(s, x, y, z));
                               },
                               lo, hi, 80);
    CHECK(n2 == doctest::Approx(numeric).epsilon(1e-9));
}
