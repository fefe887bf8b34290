#ifndef PTBEC_MODEL_HPP
#define PTBEC_MODEL_HPP

// External potential, PT operation, wavefunction evaluation, normalization and
// gauge fixing of variational states.

#include "gauss_math.hpp"
#include "types.hpp"

namespace ptbec {

// V_ext(r) = -(V0 - i Gamma) g^+ - (V0 + i Gamma) g^-, gain in the well at
// x = -l/2 and loss in the well at x = +l/2.
cplx external_potential(const PhysicalParams& p, double x, double y, double z);

cplx evaluate_wavefunction(const VariationalState& s, double x, double y, double z);

// <bra|ket> as a closed-form Gaussian integral.
cplx overlap(const GaussianParams& bra, const GaussianParams& ket);

// <Psi|Psi> over both Gaussians.
double norm_squared(const VariationalState& s);

// The PT image of one packet: A -> A*, q -> -q, p -> p, gamma -> gamma*.
GaussianParams pt_of(const GaussianParams& g);

// PT Psi = Psi*(-r), with the packets returned in canonical label order.
VariationalState apply_pt(const VariationalState& s);

// min over a global phase of ||Psi - e^{i phi} PT Psi|| / ||Psi||; zero exactly
// when the state is PT symmetric as a ray.
double pt_residual(const VariationalState& s);

// Scale so that <Psi|Psi> = 1 (common real shift of both gamma^k).
VariationalState normalized(const VariationalState& s);

// Canonical label order: g1 has the smaller q_x, ties broken by smaller
// Re gamma.
void canonical_order(VariationalState& s);

// Normalize, rotate the global phase so Im gamma^1 = 0, order labels.
VariationalState gauge_fixed(const VariationalState& s);

// Distance between two states after gauge fixing both.
double state_distance(const VariationalState& a, const VariationalState& b);

}  // namespace ptbec

#endif
