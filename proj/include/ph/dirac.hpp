#pragma once

#include "ph/brackets.hpp"

namespace ph {

// Effort tuples share the functional-derivative storage conventions.
using EffortTuple = FunctionalDerivs;

struct FlowTuple {
    Formulation form = Formulation::VSigma;
    Cochain f_main;      // f_v, f_eta (1-cochains) or f_omega (2-cochain)
    Vec f_phi;           // boundary potential flow values (Eta/Omega forms)
    Vec f_sigma_loads;   // full vertex length, Sigma-interior support
    Vec f_b_loads;       // full vertex length, Gamma support
    Vec e_b_values;      // E(e_sigma)|_Gamma, identically zero
    double recovery_residual = 0.0;   // linear-solver residual of the f_phi solve
    double nongradient_norm = 0.0;    // diagnostic: non-gradient content of the phi-row RHS
};

struct DiracTuple {
    EffortTuple e;
    FlowTuple f;
};

DiracTuple d1_map(const BracketKernel& K, const EffortTuple& e);
DiracTuple d2_map(const BracketKernel& K, const EffortTuple& e);
DiracTuple d3_map(const BracketKernel& K, const EffortTuple& e);
DiracTuple dirac_map(const BracketKernel& K, const EffortTuple& e);

// Symmetric pairing <e1|f2> + <e2|f1> over all slots.
double bilinear_form(const HodgeSystem& H, const DiracTuple& a, const DiracTuple& b);

// Duality pairing <e|f> of one tuple split into non-port and port parts.
struct PowerBalance {
    double interior = 0.0;
    double port = 0.0;
};
PowerBalance power_balance(const HodgeSystem& H, const DiracTuple& t);

// Deterministic effort samples for the audits.
EffortTuple random_effort(const BracketKernel& K, uint64_t seed);
Cochain random_state_v(const HodgeSystem& H, uint64_t seed);      // interior-solenoidal
Cochain random_state_eta(const HodgeSystem& H, uint64_t seed);    // coexact class
Cochain random_state_omega(const HodgeSystem& H, uint64_t seed);  // any 2-cochain

struct AuditResult {
    double max_normalized_residual = 0.0;
    std::vector<double> pair_residuals;  // row-major over sample pairs (i <= j)
    int dim_effort = 0;
    int dim_flow = 0;
    bool rank_ok = false;
};

AuditResult self_orthogonality_audit(const BracketKernel& K, int samples, uint64_t seed);

} // namespace ph
