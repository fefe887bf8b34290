#ifndef PTBEC_TYPES_HPP
#define PTBEC_TYPES_HPP

#include <array>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace ptbec {

using cplx = std::complex<double>;
inline constexpr cplx I{0.0, 1.0};

// ---------------------------------------------------------------------------
// Error types. Each maps to one C-API error code (see include/ptbec.h).
// ---------------------------------------------------------------------------

struct invalid_argument_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct invalid_state_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Nonlinear search ran out of iterations / step size.
struct no_convergence_error : std::runtime_error {
    double last_residual = 0.0;
    explicit no_convergence_error(const std::string& msg, double resid = 0.0)
        : std::runtime_error(msg), last_residual(resid) {}
};

// Widths diverged (Re a -> inf) with shrinking step.
struct collapse_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct quadrature_error : std::runtime_error {
    double achieved_tol = 0.0;
    explicit quadrature_error(const std::string& msg, double achieved)
        : std::runtime_error(msg), achieved_tol(achieved) {}
};

// Gram matrix of the tangent vectors is numerically singular.
struct singular_gram_error : std::runtime_error {
    double condition_number = 0.0;
    explicit singular_gram_error(const std::string& msg, double cond)
        : std::runtime_error(msg), condition_number(cond) {}
};

struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Physical parameters (dimensionless units: energy hbar^2/(m l^2), length l).
// ---------------------------------------------------------------------------

enum class DipoleAxis { y_repulsive, x_attractive };

struct PhysicalParams {
    double v0 = 80.0;     // depth of the real double-well potential
    double gamma = 0.0;   // gain/loss strength
    double l = 1.0;       // inter-well spacing (unit of length)
    double lx = 0.25;     // well widths
    double ly = 2.0;
    double lz = 0.25;
    double na = 0.0;      // contact strength N a
    double nadd = 0.3;    // dipole strength N a_dd
    DipoleAxis dipole_axis = DipoleAxis::y_repulsive;
    bool xz_coupling = false;  // release the a_xz width entry as a variational DOF

    void validate() const {
        if (!(lx > 0.0 && ly > 0.0 && lz > 0.0))
            throw invalid_argument_error("trap widths must be strictly positive");
        if (!(l > 0.0))
            throw invalid_argument_error("well spacing l must be strictly positive");
        if (gamma < 0.0)
            throw invalid_argument_error("gamma must be >= 0");
    }
};

// ---------------------------------------------------------------------------
// One Gaussian wave packet
//   g = exp(-[(x-q)^T A (x-q) - i p.(x-q) + gamma_c])
// with A complex symmetric, diagonal plus an optional xz entry; the y direction
// is frozen: q_y = p_y = 0 and A_xy = A_yz = 0 are never stored.
// ---------------------------------------------------------------------------

struct GaussianParams {
    cplx a_xx{1.0, 0.0};
    cplx a_yy{1.0, 0.0};
    cplx a_zz{1.0, 0.0};
    cplx a_xz{0.0, 0.0};
    double q_x = 0.0, q_z = 0.0;
    double p_x = 0.0, p_z = 0.0;
    cplx gamma_c{0.0, 0.0};  // amplitude/phase parameter gamma^k

    // Re A restricted to the (x,z) block must be positive definite and
    // Re a_yy > 0, otherwise the Gaussian is not normalizable.
    bool normalizable() const {
        const double rxx = a_xx.real(), rzz = a_zz.real(), ryy = a_yy.real();
        const double rxz = a_xz.real();
        return rxx > 0.0 && ryy > 0.0 && rzz > 0.0 && rxx * rzz - rxz * rxz > 0.0;
    }
};

// Real-parameter layout of one Gaussian: 16 slots, of which q_y and p_y are
// structural zeros kept only so serialized records carry full 3d vectors.
enum GaussianSlot : int {
    slot_re_axx = 0, slot_im_axx = 1,
    slot_re_ayy = 2, slot_im_ayy = 3,
    slot_re_azz = 4, slot_im_azz = 5,
    slot_re_axz = 6, slot_im_axz = 7,
    slot_qx = 8, slot_qy = 9, slot_qz = 10,
    slot_px = 11, slot_py = 12, slot_pz = 13,
    slot_re_gamma = 14, slot_im_gamma = 15,
};
inline constexpr int slots_per_gaussian = 16;
inline constexpr int total_slots = 2 * slots_per_gaussian;

using ParamVector = std::array<double, total_slots>;

// ---------------------------------------------------------------------------
// Full variational state Psi = g1 + g2 together with a snapshot of the
// physical parameters it was produced under. Immutable by convention: all
// operations return new states.
// ---------------------------------------------------------------------------

struct VariationalState {
    GaussianParams g1, g2;
    PhysicalParams params;

    ParamVector to_vector() const;
    static VariationalState from_vector(const ParamVector& v, const PhysicalParams& p);

    bool normalizable() const { return g1.normalizable() && g2.normalizable(); }
};

inline void gaussian_to_slots(const GaussianParams& g, double* s) {
    s[slot_re_axx] = g.a_xx.real(); s[slot_im_axx] = g.a_xx.imag();
    s[slot_re_ayy] = g.a_yy.real(); s[slot_im_ayy] = g.a_yy.imag();
    s[slot_re_azz] = g.a_zz.real(); s[slot_im_azz] = g.a_zz.imag();
    s[slot_re_axz] = g.a_xz.real(); s[slot_im_axz] = g.a_xz.imag();
    s[slot_qx] = g.q_x; s[slot_qy] = 0.0; s[slot_qz] = g.q_z;
    s[slot_px] = g.p_x; s[slot_py] = 0.0; s[slot_pz] = g.p_z;
    s[slot_re_gamma] = g.gamma_c.real(); s[slot_im_gamma] = g.gamma_c.imag();
}

inline GaussianParams gaussian_from_slots(const double* s) {
    GaussianParams g;
    g.a_xx = {s[slot_re_axx], s[slot_im_axx]};
    g.a_yy = {s[slot_re_ayy], s[slot_im_ayy]};
    g.a_zz = {s[slot_re_azz], s[slot_im_azz]};
    g.a_xz = {s[slot_re_axz], s[slot_im_axz]};
    g.q_x = s[slot_qx]; g.q_z = s[slot_qz];
    g.p_x = s[slot_px]; g.p_z = s[slot_pz];
    g.gamma_c = {s[slot_re_gamma], s[slot_im_gamma]};
    return g;
}

inline ParamVector VariationalState::to_vector() const {
    ParamVector v{};
    gaussian_to_slots(g1, v.data());
    gaussian_to_slots(g2, v.data() + slots_per_gaussian);
    return v;
}

inline VariationalState VariationalState::from_vector(const ParamVector& v,
                                                      const PhysicalParams& p) {
    VariationalState s;
    s.g1 = gaussian_from_slots(v.data());
    s.g2 = gaussian_from_slots(v.data() + slots_per_gaussian);
    s.params = p;
    return s;
}

// Active (free) slot indices for the given parameter set: everything except
// the frozen y translations/momenta, and except a_xz unless released.
inline std::vector<int> active_slots(const PhysicalParams& p) {
    std::vector<int> act;
    for (int g = 0; g < 2; ++g) {
        const int off = g * slots_per_gaussian;
        for (int s = 0; s < slots_per_gaussian; ++s) {
            if (s == slot_qy || s == slot_py) continue;
            if (!p.xz_coupling && (s == slot_re_axz || s == slot_im_axz)) continue;
            act.push_back(off + s);
        }
    }
    return act;
}

inline double param_distance(const ParamVector& a, const ParamVector& b) {
    double d2 = 0.0;
    for (int i = 0; i < total_slots; ++i) {
        const double d = a[i] - b[i];
        d2 += d * d;
    }
    return std::sqrt(d2);
}

}  // namespace ptbec

#endif
