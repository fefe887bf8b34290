#include "stationary.hpp"

#include <boost/numeric/odeint.hpp>
#include <cmath>

namespace ptbec {

ParamVector phase_mode_velocity(cplx mu) {
    // gamma-dot^k = i mu for both packets, all other parameters at rest.
    ParamVector v{};
    for (int g = 0; g < 2; ++g) {
        const int off = g * slots_per_gaussian;
        v[off + slot_re_gamma] = -mu.imag();
        v[off + slot_im_gamma] = mu.real();
    }
    return v;
}

namespace {

struct AugmentedSystem {
    const PhysicalParams params;
    const ParamVector base;          // inactive slots keep these values
    const std::vector<int> active;   // slot indices of the unknowns
    const NewtonOptions& opt;

    int dim() const { return static_cast<int>(active.size()) + 2; }

    VariationalState state_of(const Eigen::VectorXd& u) const {
        ParamVector v = base;
        for (size_t a = 0; a < active.size(); ++a) v[active[a]] = u(a);
        return VariationalState::from_vector(v, params);
    }

    cplx mu_of(const Eigen::VectorXd& u) const {
        return {u(dim() - 2), u(dim() - 1)};
    }

    // Residual; throws invalid_state/singular_gram on bad evaluation points.
    Eigen::VectorXd residual(const Eigen::VectorXd& u) const {
        const VariationalState s = state_of(u);
        if (!s.normalizable())
            throw invalid_state_error("newton: widths left the normalizable region");
        const ParamVector f = eom_velocity(s, EomMode::real_time, opt.eom);
        const ParamVector ph = phase_mode_velocity(mu_of(u));
        const int n = static_cast<int>(active.size());
        Eigen::VectorXd r(n + 2);
        for (int a = 0; a < n; ++a) r(a) = f[active[a]] - ph[active[a]];
        r(n) = norm_squared(s) - 1.0;
        r(n + 1) = s.g1.gamma_c.imag();
        return r;
    }
};

double inf_norm(const Eigen::VectorXd& v) { return v.lpNorm<Eigen::Infinity>(); }

// Full central-difference Jacobian; the two mu columns are analytic.
Eigen::MatrixXd fd_jacobian(const AugmentedSystem& sys, const Eigen::VectorXd& u) {
    const int m = sys.dim();
    const int n = m - 2;
    Eigen::MatrixXd J(m, m);
    for (int j = 0; j < n; ++j) {
        const double h = sys.opt.fd_step * std::max(1.0, std::abs(u(j)));
        Eigen::VectorXd up = u, um = u;
        up(j) += h;
        um(j) -= h;
        J.col(j) = (sys.residual(up) - sys.residual(um)) / (2.0 * h);
    }
    // d/d(Re mu): the phase mode contributes -d(ph)/d(Re mu) on Im gamma rows.
    J.col(n).setZero();
    J.col(n + 1).setZero();
    for (int a = 0; a < n; ++a) {
        const int slot = sys.active[a] % slots_per_gaussian;
        if (slot == slot_im_gamma) J(a, n) = -1.0;   // ph = +Re mu there
        if (slot == slot_re_gamma) J(a, n + 1) = 1.0;  // ph = -Im mu there
    }
    return J;
}

StationaryState package(const AugmentedSystem& sys, const Eigen::VectorXd& u,
                        double resid) {
    StationaryState out;
    VariationalState s = sys.state_of(u);
    s = gauge_fixed(s);
    out.state = s;
    const Energies e = mean_field_energies(s, sys.opt.eom.ddi_tol);
    out.mu = e.mu;
    out.e_mf = e.e_mf;
    out.converged_residual = resid;
    out.pt_res = pt_residual(s);
    out.symmetry = (out.pt_res < sys.opt.pt_threshold) ? Symmetry::pt_symmetric
                                                       : Symmetry::pt_broken;
    return out;
}

}  // namespace

StationaryState find_fixed_point(const VariationalState& initial, cplx mu0,
                                 const NewtonOptions& opt) {
    initial.params.validate();
    if (!initial.normalizable())
        throw invalid_state_error("find_fixed_point: initial state not normalizable");
    const VariationalState start = normalized(initial);

    std::vector<int> act = active_slots(start.params);
    if (!opt.eom.frozen_slots.empty()) {
        std::erase_if(act, [&opt](int slot) {
            return std::find(opt.eom.frozen_slots.begin(), opt.eom.frozen_slots.end(),
                             slot) != opt.eom.frozen_slots.end();
        });
    }
    AugmentedSystem sys{start.params, start.to_vector(), act, opt};

    const int m = sys.dim();
    Eigen::VectorXd u(m);
    const ParamVector v0 = start.to_vector();
    for (size_t a = 0; a < sys.active.size(); ++a) u(a) = v0[sys.active[a]];
    u(m - 2) = mu0.real();
    u(m - 1) = mu0.imag();

    Eigen::VectorXd r = sys.residual(u);
    double rn = inf_norm(r);
    if (rn < opt.tol) return package(sys, u, rn);

    // Full finite-difference Jacobian once, Broyden rank-1 updates in between,
    // refresh on stalls or every few accepted steps.
    Eigen::MatrixXd J = fd_jacobian(sys, u);
    bool fresh = true;
    int since_refresh = 0;

    for (int iter = 0; iter < opt.max_iter; ++iter) {
        Eigen::FullPivLU<Eigen::MatrixXd> lu(J);
        if (!lu.isInvertible()) {
            if (!fresh) {
                J = fd_jacobian(sys, u);
                fresh = true;
                since_refresh = 0;
                continue;
            }
            throw no_convergence_error("newton: singular augmented Jacobian", rn);
        }
        const Eigen::VectorXd du = lu.solve(-r);

        double alpha = 1.0;
        bool accepted = false;
        Eigen::VectorXd u_new, r_new;
        while (alpha > 1e-4) {
            u_new = u + alpha * du;
            try {
                r_new = sys.residual(u_new);
            } catch (const std::runtime_error&) {
                alpha *= 0.5;
                continue;
            }
            const double rn_new = inf_norm(r_new);
            if (rn_new < (1.0 - 1e-4 * alpha) * rn || rn_new < opt.tol) {
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!accepted) {
            if (fresh) throw no_convergence_error("newton: line search stalled", rn);
            J = fd_jacobian(sys, u);
            fresh = true;
            since_refresh = 0;
            continue;
        }

        const Eigen::VectorXd s_step = u_new - u;
        const Eigen::VectorXd y_step = r_new - r;
        const double ss = s_step.squaredNorm();
        if (ss > 0.0) J += (y_step - J * s_step) * s_step.transpose() / ss;
        fresh = false;
        if (++since_refresh >= 10) {
            J = fd_jacobian(sys, u_new);
            fresh = true;
            since_refresh = 0;
        }

        u = u_new;
        r = r_new;
        rn = inf_norm(r);
        if (rn < opt.tol) return package(sys, u, rn);
    }
    throw no_convergence_error("newton: iteration budget exhausted", rn);
}

StationaryState find_fixed_point(const VariationalState& initial,
                                 const NewtonOptions& opt) {
    const cplx mu0 = mean_field_energies(normalized(initial), opt.eom.ddi_tol).mu;
    return find_fixed_point(initial, mu0, opt);
}

StationaryState ite_ground_state(const VariationalState& seed, const IteOptions& opt) {
    seed.params.validate();
    if (seed.params.gamma != 0.0)
        throw invalid_argument_error("ite_ground_state requires Gamma = 0");
    if (!seed.normalizable())
        throw invalid_state_error("ite_ground_state: seed not normalizable");

    std::vector<int> act = active_slots(seed.params);
    if (!opt.newton.eom.frozen_slots.empty()) {
        std::erase_if(act, [&](int slot) {
            return std::find(opt.newton.eom.frozen_slots.begin(),
                             opt.newton.eom.frozen_slots.end(),
                             slot) != opt.newton.eom.frozen_slots.end();
        });
    }

    using StateVec = std::vector<double>;
    VariationalState cur = gauge_fixed(seed);
    const PhysicalParams params = cur.params;

    auto to_vec = [&](const VariationalState& s) {
        const ParamVector v = s.to_vector();
        StateVec x(act.size());
        for (size_t a = 0; a < act.size(); ++a) x[a] = v[act[a]];
        return x;
    };
    auto from_vec = [&](const StateVec& x) {
        ParamVector v = cur.to_vector();
        for (size_t a = 0; a < act.size(); ++a) v[act[a]] = x[a];
        return VariationalState::from_vector(v, params);
    };

    auto flow = [&](const StateVec& x, StateVec& dxdt, double) {
        const VariationalState s = from_vec(x);
        if (!s.normalizable())
            throw invalid_state_error("ite: left the normalizable region");
        const ParamVector f = eom_velocity(s, EomMode::imaginary_time, opt.newton.eom);
        dxdt.resize(act.size());
        for (size_t a = 0; a < act.size(); ++a) dxdt[a] = f[act[a]];
    };

    namespace odeint = boost::numeric::odeint;
    auto stepper = odeint::make_controlled(1e-8, 1e-8,
                                           odeint::runge_kutta_cash_karp54<StateVec>());

    StateVec x = to_vec(cur);
    double tau = 0.0, dtau = opt.dtau0;
    double last_energy = mean_field_energies(cur, opt.newton.eom.ddi_tol).e_mf.real();
    double slope = 0.0;

    while (tau < opt.tau_max) {
        StateVec x_try = x;
        double t_try = tau, dt_try = dtau;
        odeint::controlled_step_result res;
        try {
            res = stepper.try_step(flow, x_try, t_try, dt_try);
        } catch (const std::runtime_error&) {
            dtau *= 0.25;
            if (dtau < 1e-14)
                throw collapse_error("ite: step underflow in invalid region");
            continue;
        }
        if (res == odeint::controlled_step_result::fail) {
            dtau = dt_try;
            continue;
        }

        VariationalState s_new = from_vec(x_try);
        const double amax =
            std::max({s_new.g1.a_xx.real(), s_new.g1.a_zz.real(), s_new.g2.a_xx.real(),
                      s_new.g2.a_zz.real(), s_new.g1.a_yy.real(), s_new.g2.a_yy.real()});
        if (amax > opt.collapse_bound)
            throw collapse_error("ite: widths diverged (collapse)");

        // Renormalize and re-gauge after every accepted step.
        cur = gauge_fixed(s_new);
        x = to_vec(cur);
        const double dt_done = t_try - tau;
        tau = t_try;
        dtau = dt_try;

        const double energy = mean_field_energies(cur, opt.newton.eom.ddi_tol).e_mf.real();
        slope = (energy - last_energy) / dt_done;
        last_energy = energy;

        // Convergence: velocity with the shared norm/phase drift removed.
        ParamVector f = eom_velocity(cur, EomMode::imaginary_time, opt.newton.eom);
        const double mg_re =
            0.5 * (f[slot_re_gamma] + f[slots_per_gaussian + slot_re_gamma]);
        const double mg_im =
            0.5 * (f[slot_im_gamma] + f[slots_per_gaussian + slot_im_gamma]);
        for (int g = 0; g < 2; ++g) {
            f[g * slots_per_gaussian + slot_re_gamma] -= mg_re;
            f[g * slots_per_gaussian + slot_im_gamma] -= mg_im;
        }
        double vmax = 0.0;
        for (int slot : act) vmax = std::max(vmax, std::abs(f[slot]));
        if (vmax < opt.tol) {
            NewtonOptions no = opt.newton;
            return find_fixed_point(cur, no);
        }
    }
    throw no_convergence_error("ite: tau budget exhausted", std::abs(slope));
}

VariationalState make_seed(const PhysicalParams& p, SeedClass cls) {
    GaussianParams g;
    g.a_xx = 0.5 * std::sqrt(p.v0) / p.lx;
    g.a_yy = 0.5 * std::sqrt(p.v0) / p.ly;
    g.a_zz = 0.5 * std::sqrt(p.v0) / p.lz;

    VariationalState s;
    s.params = p;
    s.g1 = g;
    s.g1.q_x = -0.5 * p.l;
    s.g2 = g;
    s.g2.q_x = 0.5 * p.l;
    switch (cls) {
        case SeedClass::symmetric: break;
        case SeedClass::antisymmetric: s.g2.gamma_c = cplx(0.0, M_PI); break;
        case SeedClass::left_weighted: s.g2.gamma_c = cplx(0.9, 0.0); break;
        case SeedClass::right_weighted: s.g1.gamma_c = cplx(0.9, 0.0); break;
    }
    return gauge_fixed(s);
}

std::vector<VariationalState> canonical_seeds(const PhysicalParams& p) {
    return {make_seed(p, SeedClass::symmetric), make_seed(p, SeedClass::antisymmetric),
            make_seed(p, SeedClass::left_weighted),
            make_seed(p, SeedClass::right_weighted)};
}

std::vector<VariationalState> extended_seeds(const PhysicalParams& p) {
    std::vector<VariationalState> seeds = canonical_seeds(p);
    // Weighted seeds with a phase flip between the packets.
    for (double w : {0.9}) {
        VariationalState s = make_seed(p, SeedClass::symmetric);
        s.g2.gamma_c = cplx(w, M_PI);
        seeds.push_back(gauge_fixed(s));
        VariationalState t = make_seed(p, SeedClass::symmetric);
        t.g1.gamma_c = cplx(w, M_PI);
        seeds.push_back(gauge_fixed(t));
    }
    // Width-perturbed variants of the balanced seeds.
    for (double scale : {0.7, 1.4}) {
        for (SeedClass cls : {SeedClass::symmetric, SeedClass::antisymmetric}) {
            VariationalState s = make_seed(p, cls);
            s.g1.a_xx *= scale;
            s.g2.a_xx *= scale;
            s.g1.a_yy *= scale;
            s.g2.a_yy *= scale;
            seeds.push_back(gauge_fixed(s));
        }
    }
    return seeds;
}

}  // namespace ptbec
