#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "tdvp.hpp"

using namespace ptbec;

namespace {

std::mt19937_64 rng(5150123);
double uni(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

VariationalState two_well_state(const PhysicalParams& p) {
    VariationalState s;
    s.g1.a_xx = {16.0, uni(-2, 2)};
    s.g1.a_yy = {2.1, uni(-0.4, 0.4)};
    s.g1.a_zz = {17.0, uni(-2, 2)};
    s.g1.q_x = -0.45;
    s.g1.p_x = uni(-0.5, 0.5);
    s.g2 = s.g1;
    s.g2.a_xx = {17.5, uni(-2, 2)};
    s.g2.q_x = 0.48;
    s.g2.p_z = uni(-0.5, 0.5);
    s.g2.gamma_c = {uni(-0.3, 0.3), uni(-0.5, 0.5)};
    s.params = p;
    return normalized(s);
}

}  // namespace

TEST_CASE("eom system: Gram hermiticity, dimension, positive definiteness") {
    PhysicalParams p;
    p.gamma = 0.2;
    p.na = -0.03;
    p.nadd = 0.3;
    const VariationalState s = two_well_state(p);
    const EomSystem sys = assemble_eom_system(s);

    CHECK(sys.active.size() == 24);  // 12 per packet without the xz coupling
    PhysicalParams pxz = p;
    pxz.xz_coupling = true;
    VariationalState sxz = s;
    sxz.params = pxz;
    CHECK(assemble_eom_system(sxz).active.size() == 28);

    const double gnorm = sys.gram.norm();
    CHECK((sys.gram - sys.gram.adjoint()).norm() < 1e-12 * gnorm);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sys.gram.real());
    CHECK(es.eigenvalues().minCoeff() > 0.0);
}

TEST_CASE("eom assembly: Gram and rhs entries match grid integrals") {
    PhysicalParams p;
    p.gamma = 0.15;
    p.na = -0.02;
    p.nadd = 0.25;
    const VariationalState s = two_well_state(p);
    const EomSystem sys = assemble_eom_system(s);

    oracle::Vec3 lo, hi;
    oracle::gauss_box({pair_exponent(s.g1, s.g1), pair_exponent(s.g2, s.g2)}, lo, hi, 7.0);

    // A handful of random directions; grid integration of conj(D_a) D_b and
    // conj(D_a) H Psi.
    std::vector<std::pair<int, int>> picks = {{0, 0}, {3, 17}, {8, 8}, {12, 21}, {5, 14}};
    for (auto [a, b] : picks) {
        const int sa = sys.active[a], sb = sys.active[b];
        const cplx gram_grid = oracle::box3_integral(
            [&](double x, double y, double z) {
                return std::conj(tangent_value(s, sa, x, y, z)) *
                       tangent_value(s, sb, x, y, z);
            },
            lo, hi, 90);
        CHECK(std::abs(sys.gram(a, b) - gram_grid) <
              5e-6 * std::max(1.0, std::abs(sys.gram(a, b))));
    }

    for (int a : {0, 7, 13, 20}) {
        const int sa = sys.active[a];
        const cplx rhs_grid = oracle::box3_integral(
            [&](double x, double y, double z) {
                return std::conj(tangent_value(s, sa, x, y, z)) *
                       h_psi_value(s, x, y, z, 1e-9);
            },
            lo, hi, 60);
        CHECK(std::abs(sys.rhs(a) - rhs_grid) <
              2e-4 * std::max(1.0, std::abs(sys.rhs(a))));
    }
}

TEST_CASE("eom velocity: least-squares optimality against random perturbations") {
    PhysicalParams p;
    p.gamma = 0.1;
    p.na = -0.025;
    p.nadd = 0.3;
    const VariationalState s = two_well_state(p);
    const EomSystem sys = assemble_eom_system(s);
    EomOptions opt;
    const ParamVector zdot = solve_eom(sys, EomMode::real_time, opt);

    // Quadratic part of ||i phi - H Psi||^2 as a function of the velocities.
    auto quadratic = [&](const Eigen::VectorXd& v) {
        const Eigen::MatrixXd gr = sys.gram.real();
        const Eigen::VectorXd h = sys.rhs.imag();
        return v.dot(gr * v) - 2.0 * v.dot(h);
    };
    const int n = static_cast<int>(sys.active.size());
    Eigen::VectorXd v0(n);
    for (int a = 0; a < n; ++a) v0(a) = zdot[sys.active[a]];
    const double q0 = quadratic(v0);
    for (int trial = 0; trial < 100; ++trial) {
        Eigen::VectorXd dv = Eigen::VectorXd::NullaryExpr(n, [&](Eigen::Index) {
            return uni(-1.0, 1.0);
        });
        dv *= uni(1e-4, 0.3) / dv.norm();
        CHECK(quadratic(v0 + dv) >= q0 - 1e-11 * std::abs(q0));
    }
}

TEST_CASE("residual norm: quadratic identity and gauge invariance") {
    PhysicalParams p;
    p.gamma = 0.1;
    p.na = -0.02;
    p.nadd = 0.2;
    const VariationalState s = two_well_state(p);
    const EomSystem sys = assemble_eom_system(s);
    EomOptions opt;
    const ParamVector zdot = solve_eom(sys, EomMode::real_time, opt);

    const double rn = residual_norm(s, zdot, 48);

    // ||i phi - H Psi||^2 = zdot^T Re(G) zdot - 2 zdot^T Im(rhs) + ||H Psi||^2
    const int n = static_cast<int>(sys.active.size());
    Eigen::VectorXd v0(n);
    for (int a = 0; a < n; ++a) v0(a) = zdot[sys.active[a]];
    const double quad = v0.dot(sys.gram.real() * v0) - 2.0 * v0.dot(sys.rhs.imag());

    oracle::Vec3 lo, hi;
    oracle::gauss_box({pair_exponent(s.g1, s.g1), pair_exponent(s.g2, s.g2)}, lo, hi, 7.0);
    const double hpsi2 = oracle::box3_integral(
                             [&](double x, double y, double z) {
                                 return std::norm(h_psi_value(s, x, y, z, 1e-9));
                             },
                             lo, hi, 60);
    CHECK(rn * rn == doctest::Approx(quad + hpsi2).epsilon(2e-3));

    // Shared phase shift leaves the residual value unchanged (the velocity
    // field transforms covariantly; evaluate both at their own optimum).
    VariationalState sp = s;
    sp.g1.gamma_c += cplx(0.0, 0.9);
    sp.g2.gamma_c += cplx(0.0, 0.9);
    const ParamVector zdot_p = eom_velocity(sp, EomMode::real_time);
    CHECK(residual_norm(sp, zdot_p, 48) == doctest::Approx(rn).epsilon(1e-6));
}

TEST_CASE("single active packet: q dot equals p in a real potential") {
    PhysicalParams p;
    p.gamma = 0.0;
    p.na = 0.0;
    p.nadd = 0.0;
    VariationalState s;
    s.g1.a_xx = 17.0;
    s.g1.a_yy = 2.2;
    s.g1.a_zz = 18.0;
    s.g1.q_x = -0.52;
    s.g1.q_z = 0.03;
    s.g1.p_x = 0.4;
    s.g1.p_z = -0.2;
    s.g2 = s.g1;
    s.g2.q_x = 0.5;
    s.g2.gamma_c = 60.0;  // suppressed and frozen
    s.params = p;
    s = normalized(s);

    EomOptions opt;
    opt.frozen_slots = second_packet_slots();
    const ParamVector zdot = eom_velocity(s, EomMode::real_time, opt);
    CHECK(zdot[slot_qx] == doctest::Approx(s.g1.p_x).epsilon(1e-9));
    CHECK(zdot[slot_qz] == doctest::Approx(s.g1.p_z).epsilon(1e-9));
}

TEST_CASE("near-degenerate packets: singular Gram reported with condition number") {
    PhysicalParams p;
    p.na = -0.01;
    p.nadd = 0.1;
    VariationalState s;
    s.g1.a_xx = s.g1.a_zz = 16.0;
    s.g1.a_yy = 2.0;
    s.g1.q_x = -0.5;
    s.g2 = s.g1;
    s.g2.q_x = -0.5 + 1e-10;  // collinear tangent directions
    s.params = p;
    s = normalized(s);
    CHECK_THROWS_AS((void)eom_velocity(s, EomMode::real_time), singular_gram_error);
}
