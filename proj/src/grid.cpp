#include "grid.hpp"

#include <fftw3.h>
#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <mutex>

#include "model.hpp"

#include <json.hpp>

namespace ptbec {

namespace {
std::mutex fftw_plan_mutex;

struct domain_guard {};
}  // namespace

struct GridSolver::Impl {
    fftw_complex* buf = nullptr;
    fftw_plan fwd{}, bwd{};
    std::vector<double> k2;          // |k|^2 per grid point
    std::vector<double> kin_half;    // exp(-dt k^2/2) cache is built per call
    std::vector<cplx> vext;
    std::vector<double> ddi_kernel;  // cutoff dipolar kernel in k space
    size_t n = 0;

    ~Impl() {
        std::lock_guard<std::mutex> lock(fftw_plan_mutex);
        if (fwd) fftw_destroy_plan(fwd);
        if (bwd) fftw_destroy_plan(bwd);
        if (buf) fftw_free(buf);
    }
};

GridSolver::GridSolver(const PhysicalParams& params, const GridSpec& spec)
    : params_(params), spec_(spec) {
    params.validate();
    for (int a = 0; a < 3; ++a)
        if (spec.n[a] & (spec.n[a] - 1))
            throw invalid_argument_error("grid point counts must be powers of two");

    impl_ = new Impl;
    const int nx = spec.n[0], ny = spec.n[1], nz = spec.n[2];
    impl_->n = static_cast<size_t>(nx) * ny * nz;
    impl_->buf = fftw_alloc_complex(impl_->n);
    {
        std::lock_guard<std::mutex> lock(fftw_plan_mutex);
        impl_->fwd = fftw_plan_dft_3d(nz, ny, nx, impl_->buf, impl_->buf, FFTW_FORWARD,
                                      FFTW_MEASURE);
        impl_->bwd = fftw_plan_dft_3d(nz, ny, nx, impl_->buf, impl_->buf, FFTW_BACKWARD,
                                      FFTW_MEASURE);
    }

    auto kvec = [&](int axis, int i) {
        const int n = spec.n[axis];
        const double len = spec.hi[axis] - spec.lo[axis];
        const int f = (i <= n / 2) ? i : i - n;
        return 2.0 * M_PI * f / len;
    };

    // Spherical-cutoff dipolar kernel; R = half the smallest box edge.
    double rcut = 1e30;
    for (int a = 0; a < 3; ++a) rcut = std::min(rcut, 0.5 * (spec.hi[a] - spec.lo[a]));
    const int dip_axis = (params.dipole_axis == DipoleAxis::y_repulsive) ? 1 : 0;

    impl_->k2.resize(impl_->n);
    impl_->ddi_kernel.resize(impl_->n);
    impl_->vext.resize(impl_->n);
    GridField tmp;
    tmp.spec = spec;
    size_t idx = 0;
    for (int iz = 0; iz < nz; ++iz)
        for (int iy = 0; iy < ny; ++iy)
            for (int ix = 0; ix < nx; ++ix, ++idx) {
                const double kx = kvec(0, ix), ky = kvec(1, iy), kz = kvec(2, iz);
                const double k2 = kx * kx + ky * ky + kz * kz;
                impl_->k2[idx] = k2;
                if (k2 == 0.0) {
                    impl_->ddi_kernel[idx] = 0.0;
                } else {
                    const double kd = (dip_axis == 1) ? ky : kx;
                    const double kr = std::sqrt(k2) * rcut;
                    const double cutoff =
                        1.0 + 3.0 * std::cos(kr) / (kr * kr) - 3.0 * std::sin(kr) / (kr * kr * kr);
                    impl_->ddi_kernel[idx] =
                        (4.0 * M_PI / 3.0) * (3.0 * kd * kd / k2 - 1.0) * cutoff;
                }
                const double x = tmp.coord(0, ix), y = tmp.coord(1, iy), z = tmp.coord(2, iz);
                impl_->vext[idx] = external_potential(params, x, y, z);
            }
}

GridSolver::~GridSolver() { delete impl_; }

GridField GridSolver::sample(const std::function<cplx(double, double, double)>& f) const {
    GridField out;
    out.spec = spec_;
    out.params = params_;
    out.values.resize(impl_->n);
    size_t idx = 0;
    for (int iz = 0; iz < spec_.n[2]; ++iz)
        for (int iy = 0; iy < spec_.n[1]; ++iy)
            for (int ix = 0; ix < spec_.n[0]; ++ix, ++idx)
                out.values[idx] = f(out.coord(0, ix), out.coord(1, iy), out.coord(2, iz));
    return out;
}

std::vector<cplx> GridSolver::ddi_potential(const std::vector<cplx>& density) const {
    if (density.size() != impl_->n)
        throw invalid_argument_error("ddi_potential: density size mismatch");
    std::memcpy(impl_->buf, density.data(), impl_->n * sizeof(cplx));
    fftw_execute(impl_->fwd);
    for (size_t i = 0; i < impl_->n; ++i) {
        reinterpret_cast<cplx*>(impl_->buf)[i] *= impl_->ddi_kernel[i];
    }
    fftw_execute(impl_->bwd);
    std::vector<cplx> out(impl_->n);
    const double scale = 1.0 / static_cast<double>(impl_->n);
    for (size_t i = 0; i < impl_->n; ++i)
        out[i] = reinterpret_cast<cplx*>(impl_->buf)[i] * scale;
    return out;
}

GridObservables GridSolver::observables(const GridField& f) const {
    const double dv = f.cell_volume();
    GridObservables o;
    // kinetic via spectrum
    std::memcpy(impl_->buf, f.values.data(), impl_->n * sizeof(cplx));
    fftw_execute(impl_->fwd);
    for (size_t i = 0; i < impl_->n; ++i)
        reinterpret_cast<cplx*>(impl_->buf)[i] *= 0.5 * impl_->k2[i];
    fftw_execute(impl_->bwd);
    cplx tsum = 0.0;
    const double scale = 1.0 / static_cast<double>(impl_->n);
    for (size_t i = 0; i < impl_->n; ++i)
        tsum += std::conj(f.values[i]) * reinterpret_cast<cplx*>(impl_->buf)[i] * scale;

    std::vector<cplx> dens(impl_->n);
    for (size_t i = 0; i < impl_->n; ++i) dens[i] = std::norm(f.values[i]);
    std::vector<cplx> vdd;
    if (params_.nadd != 0.0) vdd = ddi_potential(dens);

    cplx vext_sum = 0.0, vc_sum = 0.0, vdd_sum = 0.0;
    double norm = 0.0, pl = 0.0, pr = 0.0;
    size_t idx = 0;
    for (int iz = 0; iz < spec_.n[2]; ++iz)
        for (int iy = 0; iy < spec_.n[1]; ++iy)
            for (int ix = 0; ix < spec_.n[0]; ++ix, ++idx) {
                const double d = dens[idx].real();
                norm += d;
                if (f.coord(0, ix) < 0.0) pl += d; else pr += d;
                vext_sum += impl_->vext[idx] * d;
                vc_sum += 4.0 * M_PI * params_.na * d * d;
                if (!vdd.empty()) vdd_sum += 3.0 * params_.nadd * vdd[idx] * d;
            }
    o.norm = norm * dv;
    o.pop_left = pl * dv;
    o.pop_right = pr * dv;
    const cplx t = tsum * dv, ve = vext_sum * dv, vc = vc_sum * dv, vd = vdd_sum * dv;
    o.e_mf = (t + ve + 0.5 * vc + 0.5 * vd) / o.norm;
    o.mu = (t + ve + vc + vd) / o.norm;
    return o;
}

double GridSolver::boundary_density_ratio(const GridField& f) const {
    double peak = 0.0, edge = 0.0;
    size_t idx = 0;
    for (int iz = 0; iz < spec_.n[2]; ++iz)
        for (int iy = 0; iy < spec_.n[1]; ++iy)
            for (int ix = 0; ix < spec_.n[0]; ++ix, ++idx) {
                const double d = std::norm(f.values[idx]);
                peak = std::max(peak, d);
                if (ix == 0 || iy == 0 || iz == 0 || ix == spec_.n[0] - 1 ||
                    iy == spec_.n[1] - 1 || iz == spec_.n[2] - 1)
                    edge = std::max(edge, d);
            }
    return (peak > 0.0) ? edge / peak : 0.0;
}

namespace {

void normalize_field(GridField& f) {
    double n2 = 0.0;
    for (const cplx& v : f.values) n2 += std::norm(v);
    n2 *= f.cell_volume();
    const double s = 1.0 / std::sqrt(n2);
    for (cplx& v : f.values) v *= s;
}

}  // namespace

GridSolver::IteResult GridSolver::ite(const GridField& init, double tol, double dtau,
                                      int max_steps) const {
    if (params_.gamma != 0.0)
        throw invalid_argument_error("grid ite requires Gamma = 0");
    if (init.values.size() != impl_->n)
        throw invalid_argument_error("grid ite: field size mismatch");

    GridField f = init;
    f.params = params_;
    normalize_field(f);
    const double dv = f.cell_volume();
    cplx* buf = reinterpret_cast<cplx*>(impl_->buf);

    double peak0 = 0.0;
    for (const cplx& v : f.values) peak0 = std::max(peak0, std::norm(v));

    int total_steps = 0;
    double e_prev = observables(f).e_mf.real();
    for (double step : {dtau, dtau / 5.0, dtau / 25.0}) {
        std::vector<double> kin_half(impl_->n);
        for (size_t i = 0; i < impl_->n; ++i)
            kin_half[i] = std::exp(-0.5 * step * 0.5 * impl_->k2[i]);
        int quiet = 0;
        for (int it = 0; it < max_steps; ++it, ++total_steps) {
            // half kinetic
            std::memcpy(buf, f.values.data(), impl_->n * sizeof(cplx));
            fftw_execute(impl_->fwd);
            for (size_t i = 0; i < impl_->n; ++i) buf[i] *= kin_half[i];
            fftw_execute(impl_->bwd);
            const double scale = 1.0 / static_cast<double>(impl_->n);
            for (size_t i = 0; i < impl_->n; ++i) f.values[i] = buf[i] * scale;

            // potential with the current density
            std::vector<cplx> dens(impl_->n);
            for (size_t i = 0; i < impl_->n; ++i) dens[i] = std::norm(f.values[i]);
            std::vector<cplx> vdd;
            if (params_.nadd != 0.0) vdd = ddi_potential(dens);
            for (size_t i = 0; i < impl_->n; ++i) {
                double v = impl_->vext[i].real() + 4.0 * M_PI * params_.na * dens[i].real();
                if (!vdd.empty()) v += 3.0 * params_.nadd * vdd[i].real();
                f.values[i] *= std::exp(-step * v);
            }

            // half kinetic
            std::memcpy(buf, f.values.data(), impl_->n * sizeof(cplx));
            fftw_execute(impl_->fwd);
            for (size_t i = 0; i < impl_->n; ++i) buf[i] *= kin_half[i];
            fftw_execute(impl_->bwd);
            for (size_t i = 0; i < impl_->n; ++i) f.values[i] = buf[i] * scale;

            normalize_field(f);

            double peak = 0.0;
            for (const cplx& v : f.values) peak = std::max(peak, std::norm(v));
            if (peak > 1e8 * peak0)
                throw collapse_error("grid ite: density collapsing toward a point");

            if (it % 10 == 9) {
                const double e = observables(f).e_mf.real();
                const double de = std::abs(e - e_prev) / (10.0 * step);
                e_prev = e;
                if (de < tol * std::abs(e)) {
                    if (++quiet >= 2) break;
                } else {
                    quiet = 0;
                }
            }
        }
    }
    if (boundary_density_ratio(f) > 1e-8)
        throw invalid_argument_error("grid ite: boundary density indicates domain too small");

    IteResult r;
    const GridObservables o = observables(f);
    r.mu = o.mu.real();
    r.e_mf = o.e_mf.real();
    r.field = std::move(f);
    r.steps = total_steps;
    return r;
}

GridSolver::EvolveResult GridSolver::evolve(const GridField& init, double t_end, double dt,
                                            int output_stride) const {
    if (init.values.size() != impl_->n)
        throw invalid_argument_error("grid evolve: field size mismatch");
    GridField f = init;
    f.params = params_;
    cplx* buf = reinterpret_cast<cplx*>(impl_->buf);
    const double scale = 1.0 / static_cast<double>(impl_->n);

    std::vector<cplx> kin_half(impl_->n);
    for (size_t i = 0; i < impl_->n; ++i)
        kin_half[i] = std::exp(cplx(0.0, -0.5 * dt * 0.5 * impl_->k2[i]));

    double peak0 = 0.0;
    for (const cplx& v : f.values) peak0 = std::max(peak0, std::norm(v));

    EvolveResult res;
    res.times.push_back(0.0);
    res.series.push_back(observables(f));

    const int steps = static_cast<int>(std::ceil(t_end / dt));
    for (int it = 0; it < steps; ++it) {
        std::memcpy(buf, f.values.data(), impl_->n * sizeof(cplx));
        fftw_execute(impl_->fwd);
        for (size_t i = 0; i < impl_->n; ++i) buf[i] *= kin_half[i];
        fftw_execute(impl_->bwd);
        for (size_t i = 0; i < impl_->n; ++i) f.values[i] = buf[i] * scale;

        std::vector<cplx> dens(impl_->n);
        for (size_t i = 0; i < impl_->n; ++i) dens[i] = std::norm(f.values[i]);
        std::vector<cplx> vdd;
        if (params_.nadd != 0.0) vdd = ddi_potential(dens);
        for (size_t i = 0; i < impl_->n; ++i) {
            cplx v = impl_->vext[i] + 4.0 * M_PI * params_.na * dens[i].real();
            if (!vdd.empty()) v += 3.0 * params_.nadd * vdd[i];
            f.values[i] *= std::exp(cplx(0.0, -dt) * v);
        }

        std::memcpy(buf, f.values.data(), impl_->n * sizeof(cplx));
        fftw_execute(impl_->fwd);
        for (size_t i = 0; i < impl_->n; ++i) buf[i] *= kin_half[i];
        fftw_execute(impl_->bwd);
        for (size_t i = 0; i < impl_->n; ++i) f.values[i] = buf[i] * scale;

        double peak = 0.0;
        for (const cplx& v : f.values) peak = std::max(peak, std::norm(v));
        if (peak > 1e8 * peak0)
            throw collapse_error("grid evolve: density collapsing toward a point");

        if ((it + 1) % output_stride == 0 || it == steps - 1) {
            res.times.push_back((it + 1) * dt);
            res.series.push_back(observables(f));
        }
    }
    res.field = std::move(f);
    return res;
}

std::vector<std::pair<double, GridField>> GridSolver::linear_eigenstates(
    int count, int krylov_dim) const {
    // Lanczos with full reorthogonalization on H = -Lap/2 + Re V_ext.
    const size_t n = impl_->n;
    cplx* buf = reinterpret_cast<cplx*>(impl_->buf);
    const double scale = 1.0 / static_cast<double>(n);

    auto apply_h = [&](const std::vector<double>& v, std::vector<double>& out) {
        for (size_t i = 0; i < n; ++i) buf[i] = v[i];
        fftw_execute(impl_->fwd);
        for (size_t i = 0; i < n; ++i) buf[i] *= 0.5 * impl_->k2[i];
        fftw_execute(impl_->bwd);
        out.resize(n);
        for (size_t i = 0; i < n; ++i)
            out[i] = buf[i].real() * scale + impl_->vext[i].real() * v[i];
    };

    const double dv = GridField{spec_, {}, params_}.cell_volume();
    auto dot = [&](const std::vector<double>& a, const std::vector<double>& b) {
        double s = 0.0;
        for (size_t i = 0; i < n; ++i) s += a[i] * b[i];
        return s * dv;
    };

    std::vector<std::vector<double>> basis;
    std::vector<double> alpha, beta;

    // Deterministic start: Gaussian bump spanning both wells.
    std::vector<double> v(n);
    {
        GridField tmp;
        tmp.spec = spec_;
        size_t idx = 0;
        for (int iz = 0; iz < spec_.n[2]; ++iz)
            for (int iy = 0; iy < spec_.n[1]; ++iy)
                for (int ix = 0; ix < spec_.n[0]; ++ix, ++idx) {
                    const double x = tmp.coord(0, ix), y = tmp.coord(1, iy),
                                 z = tmp.coord(2, iz);
                    v[idx] = std::exp(-2.0 * x * x - 8.0 * y * y - 2.0 * z * z) *
                             (1.0 + 0.3 * x + 0.05 * x * x * x);
                }
        const double s = 1.0 / std::sqrt(dot(v, v));
        for (double& x : v) x *= s;
    }

    std::vector<double> w;
    for (int j = 0; j < krylov_dim; ++j) {
        basis.push_back(v);
        apply_h(v, w);
        const double a = dot(v, w);
        alpha.push_back(a);
        for (size_t i = 0; i < n; ++i) w[i] -= a * v[i];
        if (j > 0)
            for (size_t i = 0; i < n; ++i) w[i] -= beta.back() * basis[j - 1][i];
        // full reorthogonalization
        for (const auto& b : basis) {
            const double c = dot(b, w);
            for (size_t i = 0; i < n; ++i) w[i] -= c * b[i];
        }
        const double bnorm = std::sqrt(dot(w, w));
        if (bnorm < 1e-12) break;
        beta.push_back(bnorm);
        for (size_t i = 0; i < n; ++i) v[i] = w[i] / bnorm;
    }

    const int m = static_cast<int>(alpha.size());
    Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) {
        tri(i, i) = alpha[i];
        if (i + 1 < m) tri(i, i + 1) = tri(i + 1, i) = beta[i];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tri);

    std::vector<std::pair<double, GridField>> out;
    for (int e = 0; e < count && e < m; ++e) {
        GridField f;
        f.spec = spec_;
        f.params = params_;
        f.values.assign(n, 0.0);
        for (int j = 0; j < m; ++j) {
            const double c = es.eigenvectors()(j, e);
            for (size_t i = 0; i < n; ++i) f.values[i] += c * basis[j][i];
        }
        out.emplace_back(es.eigenvalues()(e), std::move(f));
    }
    return out;
}

void write_field(const GridField& f, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw io_error("write_field: cannot open " + path);
    const char magic[8] = {'P', 'T', 'B', 'E', 'C', 'F', 'L', 'D'};
    os.write(magic, 8);
    const uint32_t version = 1, endian = 0x01020304;
    os.write(reinterpret_cast<const char*>(&version), 4);
    os.write(reinterpret_cast<const char*>(&endian), 4);
    int32_t dims[3] = {f.spec.n[0], f.spec.n[1], f.spec.n[2]};
    os.write(reinterpret_cast<const char*>(dims), sizeof(dims));
    double ext[6] = {f.spec.lo[0], f.spec.hi[0], f.spec.lo[1],
                     f.spec.hi[1], f.spec.lo[2], f.spec.hi[2]};
    os.write(reinterpret_cast<const char*>(ext), sizeof(ext));
    for (const cplx& v : f.values) {
        const double re = v.real(), im = v.imag();
        os.write(reinterpret_cast<const char*>(&re), 8);
        os.write(reinterpret_cast<const char*>(&im), 8);
    }
    if (!os) throw io_error("write_field: short write to " + path);

    nlohmann::json j;
    j["dims"] = {f.spec.n[0], f.spec.n[1], f.spec.n[2]};
    j["lo"] = {f.spec.lo[0], f.spec.lo[1], f.spec.lo[2]};
    j["hi"] = {f.spec.hi[0], f.spec.hi[1], f.spec.hi[2]};
    j["params"] = {{"v0", f.params.v0},     {"gamma", f.params.gamma},
                   {"l", f.params.l},       {"lx", f.params.lx},
                   {"ly", f.params.ly},     {"lz", f.params.lz},
                   {"na", f.params.na},     {"nadd", f.params.nadd},
                   {"dipole_axis", f.params.dipole_axis == DipoleAxis::y_repulsive
                                       ? "y_repulsive"
                                       : "x_attractive"}};
    std::ofstream js(path + ".json");
    js << j.dump(2) << "\n";
}

GridField read_field(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw io_error("read_field: cannot open " + path);
    char magic[8];
    is.read(magic, 8);
    if (std::memcmp(magic, "PTBECFLD", 8) != 0)
        throw io_error("read_field: bad magic in " + path);
    uint32_t version = 0, endian = 0;
    is.read(reinterpret_cast<char*>(&version), 4);
    is.read(reinterpret_cast<char*>(&endian), 4);
    if (endian != 0x01020304) throw io_error("read_field: endianness mismatch");
    int32_t dims[3];
    is.read(reinterpret_cast<char*>(dims), sizeof(dims));
    double ext[6];
    is.read(reinterpret_cast<char*>(ext), sizeof(ext));
    GridField f;
    f.spec.n = {dims[0], dims[1], dims[2]};
    f.spec.lo = {ext[0], ext[2], ext[4]};
    f.spec.hi = {ext[1], ext[3], ext[5]};
    f.values.resize(f.size());
    for (cplx& v : f.values) {
        double re, im;
        is.read(reinterpret_cast<char*>(&re), 8);
        is.read(reinterpret_cast<char*>(&im), 8);
        v = {re, im};
    }
    if (!is) throw io_error("read_field: short read from " + path);

    std::ifstream js(path + ".json");
    if (js) {
        nlohmann::json j;
        js >> j;
        f.params.v0 = j["params"]["v0"];
        f.params.gamma = j["params"]["gamma"];
        f.params.l = j["params"]["l"];
        f.params.lx = j["params"]["lx"];
        f.params.ly = j["params"]["ly"];
        f.params.lz = j["params"]["lz"];
        f.params.na = j["params"]["na"];
        f.params.nadd = j["params"]["nadd"];
        f.params.dipole_axis = (j["params"]["dipole_axis"] == "y_repulsive")
                                   ? DipoleAxis::y_repulsive
                                   : DipoleAxis::x_attractive;
    }
    return f;
}

}  // namespace ptbec
