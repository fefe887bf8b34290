#include "elements.hpp"

#include <cmath>
#include <thread>

namespace ptbec {

namespace {

// Contract a ket-side polynomial against a moment table: out_i = sum_j T_ij p_j.
Vec7 contract(const PairMoments& pm, const Poly7& p) {
    Vec7 out{};
    for (int i = 0; i < basis_size; ++i) {
        cplx acc = 0.0;
        for (int j = 0; j < basis_size; ++j) acc += table_entry(pm, i, j) * p[j];
        out[i] = acc;
    }
    return out;
}

}  // namespace

ElementTable compute_elements(const VariationalState& s, const ElementOptions& opt) {
    const PhysicalParams& p = s.params;
    const GaussianParams G[2] = {s.g1, s.g2};
    ElementTable t;

    GaussExponent pair[2][2];
    for (int l = 0; l < 2; ++l)
        for (int k = 0; k < 2; ++k) {
            pair[l][k] = pair_exponent(G[l], G[k]);
            t.pm[l][k] = compute_moments(pair[l][k]);
            t.svec[l][k] = basis_vector(t.pm[l][k]);
            t.ovl[l][k] = t.pm[l][k].s0;
        }

    const Poly7 kc[2] = {kinetic_poly(G[0]), kinetic_poly(G[1])};
    const GaussExponent wells[2] = {well_exponent(p, +1), well_exponent(p, -1)};
    const cplx wcoef[2] = {-cplx(p.v0, -p.gamma), -cplx(p.v0, p.gamma)};

    const cplx con_pref = 4.0 * M_PI * p.na;
    const cplx ddi_pref = 3.0 * p.nadd;

    // Dipolar integrals obey D_i(l,k,m,n) = conj(D_i(k,l,n,m)); compute one
    // representative per orbit, split across two workers.
    Vec7 dvec[2][2][2][2];
    bool have_d[2][2][2][2] = {};
    if (p.nadd != 0.0) {
        struct Job {
            int l, k, m, n;
        };
        std::vector<Job> jobs;
        for (int l = 0; l < 2; ++l)
            for (int k = 0; k < 2; ++k)
                for (int m = 0; m < 2; ++m)
                    for (int n = 0; n < 2; ++n) {
                        if (have_d[l][k][m][n]) continue;
                        have_d[l][k][m][n] = true;
                        have_d[k][l][n][m] = true;
                        jobs.push_back({l, k, m, n});
                    }
        auto run = [&](size_t begin, size_t end) {
            for (size_t j = begin; j < end; ++j) {
                const Job& jb = jobs[j];
                dvec[jb.l][jb.k][jb.m][jb.n] = ddi_basis_integrals(
                    pair[jb.l][jb.k], pair[jb.m][jb.n], p.dipole_axis, opt.ddi_tol);
            }
        };
        const size_t half = jobs.size() / 2;
        std::thread worker(run, 0, half);
        run(half, jobs.size());
        worker.join();
        for (const Job& jb : jobs)
            if (jb.l != jb.k || jb.m != jb.n)
                for (int i = 0; i < basis_size; ++i)
                    dvec[jb.k][jb.l][jb.n][jb.m][i] = std::conj(dvec[jb.l][jb.k][jb.m][jb.n][i]);
    }

    for (int l = 0; l < 2; ++l)
        for (int k = 0; k < 2; ++k) {
            Vec7 hv = contract(t.pm[l][k], kc[k]);
            t.kin[l][k] = hv[0];

            cplx ext_s = 0.0;
            for (int w = 0; w < 2; ++w) {
                const Vec7 u = basis_vector(compute_moments(pair[l][k] + wells[w]));
                for (int i = 0; i < basis_size; ++i) hv[i] += wcoef[w] * u[i];
                ext_s += wcoef[w] * u[0];
            }
            t.ext[l][k] = ext_s;

            if (p.na != 0.0) {
                Vec7 cv{};
                for (int m = 0; m < 2; ++m)
                    for (int n = 0; n < 2; ++n) {
                        const Vec7 u =
                            basis_vector(compute_moments(pair[l][k] + pair[m][n]));
                        for (int i = 0; i < basis_size; ++i) cv[i] += u[i];
                    }
                for (int i = 0; i < basis_size; ++i) hv[i] += con_pref * cv[i];
                t.con[l][k] = con_pref * cv[0];
            }

            if (p.nadd != 0.0) {
                Vec7 dv{};
                for (int m = 0; m < 2; ++m)
                    for (int n = 0; n < 2; ++n)
                        for (int i = 0; i < basis_size; ++i) dv[i] += dvec[l][k][m][n][i];
                for (int i = 0; i < basis_size; ++i) hv[i] += ddi_pref * dv[i];
                t.ddi[l][k] = ddi_pref * dv[0];
            }

            t.hvec[l][k] = hv;
        }
    return t;
}

Energies mean_field_energies(const VariationalState& s, double ddi_tol) {
    const VariationalState n = normalized(s);
    ElementOptions opt;
    opt.ddi_tol = ddi_tol;
    const ElementTable t = compute_elements(n, opt);
    cplx tv = 0.0, c = 0.0, d = 0.0;
    for (int l = 0; l < 2; ++l)
        for (int k = 0; k < 2; ++k) {
            tv += t.kin[l][k] + t.ext[l][k];
            c += t.con[l][k];
            d += t.ddi[l][k];
        }
    Energies e;
    e.e_mf = tv + 0.5 * c + 0.5 * d;
    e.mu = tv + c + d;
    return e;
}

cplx contact_element(const VariationalState& s, int bra, int ket) {
    const GaussianParams G[2] = {s.g1, s.g2};
    if (s.params.na == 0.0) return 0.0;
    const GaussExponent pr = pair_exponent(G[bra], G[ket]);
    cplx acc = 0.0;
    for (int m = 0; m < 2; ++m)
        for (int n = 0; n < 2; ++n) acc += gauss_integral(pr + pair_exponent(G[m], G[n]));
    return 4.0 * M_PI * s.params.na * acc;
}

cplx ddi_element(const VariationalState& s, int bra, int ket, double tol) {
    const GaussianParams G[2] = {s.g1, s.g2};
    if (s.params.nadd == 0.0) return 0.0;
    const GaussExponent pr = pair_exponent(G[bra], G[ket]);
    cplx acc = 0.0;
    for (int m = 0; m < 2; ++m)
        for (int n = 0; n < 2; ++n)
            acc += ddi_basis_integrals(pr, pair_exponent(G[m], G[n]), s.params.dipole_axis,
                                       tol)[0];
    return 3.0 * s.params.nadd * acc;
}

cplx contact_potential_at(const VariationalState& s, double x, double y, double z) {
    const cplx psi = evaluate_wavefunction(s, x, y, z);
    return 4.0 * M_PI * s.params.na * std::norm(psi);
}

cplx ddi_potential_value(const VariationalState& s, double x, double y, double z,
                         double tol) {
    if (s.params.nadd == 0.0) return 0.0;
    const GaussianParams G[2] = {s.g1, s.g2};
    cplx acc = 0.0;
    for (int m = 0; m < 2; ++m)
        for (int n = 0; n < 2; ++n)
            acc += ddi_potential_at(pair_exponent(G[m], G[n]), s.params.dipole_axis, x, y,
                                    z, tol);
    return 3.0 * s.params.nadd * acc;
}

}  // namespace ptbec
