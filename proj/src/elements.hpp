#ifndef PTBEC_ELEMENTS_HPP
#define PTBEC_ELEMENTS_HPP

// Matrix elements between the two Gaussian packets of a state: overlaps,
// kinetic, external-potential, contact and dipole-dipole terms, together with
// the basis-moment vectors the variational equations of motion consume.

#include "gauss_math.hpp"
#include "model.hpp"
#include "types.hpp"

namespace ptbec {

struct ElementOptions {
    double ddi_tol = 1e-10;     // relative tolerance of the dipolar quadrature
    bool need_tangent = false;  // also build the 7-vector H columns for the EOM
};

struct ElementTable {
    // Scalar element matrices, index order [bra][ket].
    cplx ovl[2][2]{};
    cplx kin[2][2]{};
    cplx ext[2][2]{};
    cplx con[2][2]{};  // includes the 4 pi Na prefactor and the (m,n) sum
    cplx ddi[2][2]{};  // includes the 3 Na_dd prefactor and the (m,n) sum

    // Moment tables and H/overlap basis vectors for the tangent space.
    PairMoments pm[2][2];
    Vec7 svec[2][2]{};  // <B_i g^l | g^k>
    Vec7 hvec[2][2]{};  // <B_i g^l | H g^k>
};

ElementTable compute_elements(const VariationalState& s, const ElementOptions& opt = {});

// Energy functional and GPE eigenvalue of the normalized state:
//   E_mf = <T + V_ext> + (1/2)<V_c> + (1/2)<V_dd>,  mu = <T + V_ext + V_c + V_dd>.
struct Energies {
    cplx e_mf{};
    cplx mu{};
};

Energies mean_field_energies(const VariationalState& s, double ddi_tol = 1e-10);

// Spec'd single-element accessors (bra/ket chosen from the state's packets by
// index 0/1). The contact and dipolar elements see the full |Psi|^2 density.
cplx contact_element(const VariationalState& s, int bra, int ket);
cplx ddi_element(const VariationalState& s, int bra, int ket, double tol = 1e-10);

// Pointwise mean-field potentials (diagnostics; the dipolar part runs one 1d
// quadrature per density pair).
cplx contact_potential_at(const VariationalState& s, double x, double y, double z);
cplx ddi_potential_value(const VariationalState& s, double x, double y, double z,
                         double tol = 1e-8);

}  // namespace ptbec

#endif
