#include "tdvp.hpp"

#include <cmath>

namespace ptbec {

namespace {

inline cplx poly_value(const Poly7& p, double x, double y, double z) {
    return p[0] + p[1] * x + p[2] * z + p[3] * x * x + p[4] * z * z + p[5] * x * z +
           p[6] * y * y;
}

}  // namespace

EomSystem assemble_eom_system(const VariationalState& s, const EomOptions& opt) {
    if (!s.normalizable())
        throw invalid_state_error("assemble_eom_system: state not normalizable");
    ElementOptions eo;
    eo.ddi_tol = opt.ddi_tol;
    eo.need_tangent = true;
    const ElementTable t = compute_elements(s, eo);

    EomSystem sys;
    sys.active = active_slots(s.params);
    if (!opt.frozen_slots.empty()) {
        std::erase_if(sys.active, [&opt](int slot) {
            return std::find(opt.frozen_slots.begin(), opt.frozen_slots.end(), slot) !=
                   opt.frozen_slots.end();
        });
    }
    const int n = static_cast<int>(sys.active.size());
    const GaussianParams G[2] = {s.g1, s.g2};

    // Per-direction data: owning Gaussian and basis polynomial.
    std::vector<int> owner(n);
    std::vector<Poly7> poly(n);
    for (int a = 0; a < n; ++a) {
        owner[a] = sys.active[a] / slots_per_gaussian;
        poly[a] = derivative_poly(G[owner[a]], sys.active[a] % slots_per_gaussian);
    }

    Eigen::Matrix<cplx, basis_size, basis_size> tab[2][2];
    for (int l = 0; l < 2; ++l)
        for (int k = 0; k < 2; ++k)
            for (int i = 0; i < basis_size; ++i)
                for (int j = 0; j < basis_size; ++j)
                    tab[l][k](i, j) = table_entry(t.pm[l][k], i, j);

    // Coefficient matrices per packet and summed H / overlap basis vectors.
    Eigen::Matrix<cplx, basis_size, Eigen::Dynamic> cf[2];
    std::vector<int> local_index(n);
    int counts[2] = {0, 0};
    for (int a = 0; a < n; ++a) local_index[a] = counts[owner[a]]++;
    cf[0].resize(basis_size, counts[0]);
    cf[1].resize(basis_size, counts[1]);
    for (int a = 0; a < n; ++a)
        for (int i = 0; i < basis_size; ++i) cf[owner[a]](i, local_index[a]) = poly[a][i];

    Eigen::Vector<cplx, basis_size> hsum[2], ssum[2];
    for (int l = 0; l < 2; ++l) {
        hsum[l].setZero();
        ssum[l].setZero();
        for (int k = 0; k < 2; ++k)
            for (int i = 0; i < basis_size; ++i) {
                hsum[l](i) += t.hvec[l][k][i];
                ssum[l](i) += t.svec[l][k][i];
            }
    }

    Eigen::MatrixXcd gblock[2][2];
    Eigen::VectorXcd hblock[2], oblock[2];
    for (int l = 0; l < 2; ++l) {
        for (int k = 0; k < 2; ++k) gblock[l][k] = cf[l].adjoint() * tab[l][k] * cf[k];
        hblock[l] = cf[l].adjoint() * hsum[l];
        oblock[l] = cf[l].adjoint() * ssum[l];
    }

    sys.gram.resize(n, n);
    sys.rhs.resize(n);
    sys.ovl.resize(n);
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b)
            sys.gram(a, b) = gblock[owner[a]][owner[b]](local_index[a], local_index[b]);
        sys.rhs(a) = hblock[owner[a]](local_index[a]);
        sys.ovl(a) = oblock[owner[a]](local_index[a]);
    }
    return sys;
}

ParamVector solve_eom(const EomSystem& sys, EomMode mode, const EomOptions& opt,
                      double* cond_out) {
    const int n = static_cast<int>(sys.active.size());
    const Eigen::MatrixXd gr = sys.gram.real();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (gr + gr.transpose()));
    const Eigen::VectorXd ev = es.eigenvalues();
    const double lambda = opt.tikhonov * gr.trace() / n;
    const double lo = ev.minCoeff(), hi = ev.maxCoeff();
    const double cond = (lo > 0.0) ? hi / lo : std::numeric_limits<double>::infinity();
    if (cond_out) *cond_out = cond;
    if (cond > opt.max_condition)
        throw singular_gram_error("eom: Gram matrix numerically singular", cond);

    const Eigen::VectorXcd reff = sys.rhs - opt.mu_shift * sys.ovl;
    const Eigen::VectorXd b =
        (mode == EomMode::real_time) ? reff.imag().eval() : (-reff.real()).eval();
    const Eigen::VectorXd y = es.eigenvectors().transpose() * b;
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = y(i) / (ev(i) + lambda);
    v = es.eigenvectors() * v;

    ParamVector out{};
    for (int a = 0; a < n; ++a) out[sys.active[a]] = v(a);
    return out;
}

ParamVector eom_velocity(const VariationalState& s, EomMode mode, const EomOptions& opt) {
    const EomSystem sys = assemble_eom_system(s, opt);
    return solve_eom(sys, mode, opt);
}

cplx tangent_value(const VariationalState& s, int slot, double x, double y, double z) {
    const GaussianParams& g = (slot < slots_per_gaussian) ? s.g1 : s.g2;
    const Poly7 p = derivative_poly(g, slot % slots_per_gaussian);
    return poly_value(p, x, y, z) * gauss_value(ket_exponent(g), x, y, z);
}

cplx h_psi_value(const VariationalState& s, double x, double y, double z,
                 double ddi_point_tol) {
    const GaussianParams G[2] = {s.g1, s.g2};
    cplx tpsi = 0.0, psi = 0.0;
    for (int k = 0; k < 2; ++k) {
        const cplx gv = gauss_value(ket_exponent(G[k]), x, y, z);
        psi += gv;
        tpsi += poly_value(kinetic_poly(G[k]), x, y, z) * gv;
    }
    cplx v = external_potential(s.params, x, y, z);
    if (s.params.na != 0.0) v += 4.0 * M_PI * s.params.na * std::norm(psi);
    if (s.params.nadd != 0.0) v += ddi_potential_value(s, x, y, z, ddi_point_tol);
    return tpsi + v * psi;
}

double residual_norm(const VariationalState& s, const ParamVector& zdot, int grid_n) {
    const std::vector<int> act = active_slots(s.params);

    // Integration box covering both packet densities.
    GaussExponent d1 = pair_exponent(s.g1, s.g1), d2 = pair_exponent(s.g2, s.g2);
    auto box1 = [](const GaussExponent& e, int axis) {
        // center and 8-sigma half width of the real part along one axis
        const double rxx = e.m.xx.real(), rzz = e.m.zz.real(), rxz = e.m.xz.real();
        if (axis == 1) return std::pair<double, double>(0.0, 8.0 / std::sqrt(e.myy.real()));
        const double d = rxx * rzz - rxz * rxz;
        const double c = (axis == 0) ? 0.5 * (rzz * e.bx.real() - rxz * e.bz.real()) / d
                                     : 0.5 * (rxx * e.bz.real() - rxz * e.bx.real()) / d;
        const double lmin = 0.5 * (rxx + rzz - std::sqrt((rxx - rzz) * (rxx - rzz) +
                                                         4.0 * rxz * rxz));
        return std::pair<double, double>(c, 8.0 / std::sqrt(lmin));
    };
    double lo[3], hi[3];
    for (int ax = 0; ax < 3; ++ax) {
        auto [c1, w1] = box1(d1, ax);
        auto [c2, w2] = box1(d2, ax);
        lo[ax] = std::min(c1 - w1, c2 - w2);
        hi[ax] = std::max(c1 + w1, c2 + w2);
    }

    std::vector<double> gl, glw;
    quad::gauss_legendre(grid_n, gl, glw);
    auto nodes = [&](int ax, std::vector<double>& xs, std::vector<double>& ws) {
        xs.resize(grid_n);
        ws.resize(grid_n);
        for (int i = 0; i < grid_n; ++i) {
            xs[i] = 0.5 * (hi[ax] + lo[ax]) + 0.5 * (hi[ax] - lo[ax]) * gl[i];
            ws[i] = 0.5 * (hi[ax] - lo[ax]) * glw[i];
        }
    };
    std::vector<double> xs, ys, zs, wx, wy, wz;
    nodes(0, xs, wx);
    nodes(1, ys, wy);
    nodes(2, zs, wz);

    double acc = 0.0;
    for (int ix = 0; ix < grid_n; ++ix)
        for (int iy = 0; iy < grid_n; ++iy)
            for (int iz = 0; iz < grid_n; ++iz) {
                const double x = xs[ix], y = ys[iy], z = zs[iz];
                cplx phi = 0.0;
                for (int slot : act)
                    if (zdot[slot] != 0.0) phi += zdot[slot] * tangent_value(s, slot, x, y, z);
                const cplx r = I * phi - h_psi_value(s, x, y, z);
                acc += wx[ix] * wy[iy] * wz[iz] * std::norm(r);
            }
    return std::sqrt(std::max(0.0, acc));
}

}  // namespace ptbec
