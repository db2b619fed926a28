#pragma once

#include "ph/energetics.hpp"

namespace ph {

// State-dependent coefficients shared by the brackets and the Dirac maps.
struct BracketKernel {
    Formulation form = Formulation::VSigma;
    const HodgeSystem* H = nullptr;
    QPScalar zeta;     // exact P0 density of dv, d eta, or omega
    Cochain eta;       // EtaPhi: the state eta; OmegaPhi: delta N_beta(omega)
    bool has_eta = false;
};

BracketKernel make_kernel_v(const HodgeSystem& H, const Cochain& v);
BracketKernel make_kernel_eta(const HodgeSystem& H, const Cochain& eta);
BracketKernel make_kernel_omega(const HodgeSystem& H, const Cochain& omega);

// Reconstruction of one functional-derivative tuple against a kernel:
// the total velocity-effort field, the Neumann potential of the phi-effort,
// and the surface effort including the eta correction.
struct EffortData {
    QPField u_tot;
    Cochain phi;      // N_phi(phi_loads); zero cochain when no phi slot
    Vec phi_loads;    // boundary loads (VSigma: weak flux of w)
    Vec sigma;        // E(sigma): full length, Sigma-interior support
    Vec q;            // eta correction values at boundary vertices
};

EffortData prepare_effort(const BracketKernel& K, const FunctionalDerivs& F);

// Uniform bracket value: \int zeta cross(uF, uG) plus the antisymmetrized
// surface pairing. `port` extends the surface sums from Sigma-interior
// vertices to the whole boundary (the Dirac-associated variant).
double bracket_from_data(const BracketKernel& K, const EffortData& F, const EffortData& G, bool port);

double bracket_vS(const BracketKernel& K, const FunctionalDerivs& F, const FunctionalDerivs& G,
                  bool port = false);
double bracket_eta(const BracketKernel& K, const FunctionalDerivs& F, const FunctionalDerivs& G,
                   bool port = false);
double bracket_omega(const BracketKernel& K, const FunctionalDerivs& F, const FunctionalDerivs& G,
                     bool port = false);

// Change of variables between formulations (exact at the discrete level).
FunctionalDerivs map_v_to_eta(const HodgeSystem& H, const BracketKernel& K_eta,
                              const FunctionalDerivs& Fv);

struct JacobiResult {
    double cyclic_sum = 0.0;
    double normalized = 0.0;
    double scale = 0.0;
    double reconstruction_residual = 0.0;  // OmegaPhi tuple extraction only
};

// Finite-difference Jacobi audit at frozen surface geometry: the inner
// bracket's state derivative is extracted by central differences with the
// state perturbations projected back onto the formulation's constraint set.
JacobiResult jacobi_fd(const HodgeSystem& H, Formulation form, const Cochain& state,
                       const FunctionalDerivs& F, const FunctionalDerivs& G,
                       const FunctionalDerivs& Kf, double h_fd);

} // namespace ph
