#ifndef PTBEC_TDVP_HPP
#define PTBEC_TDVP_HPP

// McLachlan variational equations of motion. The tangent directions are the
// derivatives of Psi with respect to the active real parameters; minimizing
// ||i phi - H Psi|| over the tangent space yields the normal equations
//   Re(G) zdot = Im<D_a|H Psi>          (real time)
//   Re(G) zdot = -Re<D_a|H Psi>         (imaginary time)
// with G the complex Gram matrix of the tangent vectors.

#include <Eigen/Dense>

#include "elements.hpp"
#include "types.hpp"

namespace ptbec {

enum class EomMode { real_time, imaginary_time };

struct EomOptions {
    double ddi_tol = 1e-10;
    double tikhonov = 1e-12;      // regularization lambda = tikhonov * tr(G)/dim
    double max_condition = 1e14;  // Gram condition bound after regularization
    cplx mu_shift{0.0, 0.0};      // evaluate the flow of H - mu_shift
    std::vector<int> frozen_slots{};  // extra frozen directions (e.g. one packet)
};

// Slot indices of the second packet, for freezing it wholesale.
inline std::vector<int> second_packet_slots() {
    std::vector<int> v(slots_per_gaussian);
    for (int i = 0; i < slots_per_gaussian; ++i) v[i] = slots_per_gaussian + i;
    return v;
}

struct EomSystem {
    Eigen::MatrixXcd gram;    // <D_a|D_b> over the active directions
    Eigen::VectorXcd rhs;     // <D_a|H Psi> (no mu shift applied)
    Eigen::VectorXcd ovl;     // <D_a|Psi>
    std::vector<int> active;  // slot indices into the 32-component layout
};

EomSystem assemble_eom_system(const VariationalState& s, const EomOptions& opt = {});

// Solve for the parameter velocities; inactive slots are returned as zero.
// cond_out, if given, receives the regularized Gram condition number.
ParamVector solve_eom(const EomSystem& sys, EomMode mode, const EomOptions& opt,
                      double* cond_out = nullptr);

ParamVector eom_velocity(const VariationalState& s, EomMode mode,
                         const EomOptions& opt = {});

// || i phi - H Psi || with phi = sum_a zdot_a dPsi/dz_a, by direct grid
// integration of the pointwise residual (diagnostic; grid_n points per axis).
double residual_norm(const VariationalState& s, const ParamVector& zdot,
                     int grid_n = 40);

// Pointwise tangent vector and H Psi evaluations (shared with tests).
cplx tangent_value(const VariationalState& s, int slot, double x, double y, double z);
cplx h_psi_value(const VariationalState& s, double x, double y, double z,
                 double ddi_point_tol = 1e-8);

}  // namespace ptbec

#endif
