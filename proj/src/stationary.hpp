#ifndef PTBEC_STATIONARY_HPP
#define PTBEC_STATIONARY_HPP

// Fixed points of the variational equations of motion: a damped Newton search
// on the phase-augmented system
//   f(z) - v_phase(mu) = 0,   <Psi|Psi> - 1 = 0,   Im gamma^1 = 0
// over (z, mu), plus imaginary-time evolution toward ground states.

#include <optional>
#include <string>
#include <vector>

#include "tdvp.hpp"

namespace ptbec {

enum class Symmetry { pt_symmetric, pt_broken };

struct StationaryState {
    VariationalState state;  // normalized, phase-gauged, canonically ordered
    cplx mu{};
    cplx e_mf{};
    double converged_residual = 0.0;
    double pt_res = 0.0;
    Symmetry symmetry = Symmetry::pt_symmetric;
    std::string label;
};

struct NewtonOptions {
    double tol = 1e-10;        // max-norm of the augmented residual
    int max_iter = 100;
    double fd_step = 1e-7;     // relative step of the central-difference Jacobian
    double pt_threshold = 1e-4;
    EomOptions eom{};
};

StationaryState find_fixed_point(const VariationalState& initial,
                                 const NewtonOptions& opt = {});
StationaryState find_fixed_point(const VariationalState& initial, cplx mu0,
                                 const NewtonOptions& opt = {});

struct IteOptions {
    double tol = 1e-8;       // compensated velocity threshold
    double tau_max = 60.0;
    double dtau0 = 2e-3;
    double collapse_bound = 1e4;
    NewtonOptions newton{};
};

// Gamma = 0 only: the imaginary-time flow descends the energy; the result is
// polished by the Newton search.
StationaryState ite_ground_state(const VariationalState& seed, const IteOptions& opt = {});

// Seed library: one packet per well with harmonic-fit widths; the four
// canonical classes differ in the relative amplitude and phase of the packets.
enum class SeedClass { symmetric, antisymmetric, left_weighted, right_weighted };

VariationalState make_seed(const PhysicalParams& p, SeedClass cls);
std::vector<VariationalState> canonical_seeds(const PhysicalParams& p);

// Wider net for censuses: canonical classes plus phase-flipped weighted seeds
// and width-perturbed variants.
std::vector<VariationalState> extended_seeds(const PhysicalParams& p);

// Velocity of the pure phase motion gamma-dot^k = i mu in slot layout.
ParamVector phase_mode_velocity(cplx mu);

}  // namespace ptbec

#endif
