#pragma once

// Angular-momentum coupling coefficients. All quantum numbers are passed
// doubled (2j, 2m) so half-integer values stay exact integers.

namespace ocw::angular {

double wigner_3j(int tj1, int tj2, int tj3, int tm1, int tm2, int tm3);
double wigner_6j(int tj1, int tj2, int tj3, int tj4, int tj5, int tj6);

/// <j1 m1; j2 m2 | J M>
double clebsch_gordan(int tj1, int tm1, int tj2, int tm2, int tJ, int tM);

/// Fine-structure line between two J manifolds of an atom with nuclear spin I.
struct HyperfineLine {
  int two_j_upper = 1;
  int two_j_lower = 1;
  int two_i = 3;
};

/// Signed dipole amplitude <F_u m_u| d_q |F_l m_l> in units of the reduced
/// element <J_u||d||J_l>, normalised so that squared amplitudes out of any
/// upper sublevel sum to one over all lower sublevels of the line. The squared
/// value is therefore the spontaneous branching fraction of that channel.
///
/// Returns 0 when q != m_u - m_l. Throws InputError when |m| > F or F is not
/// reachable from J and I.
double relative_strength(const HyperfineLine& line, int f_upper, int mf_upper,
                         int f_lower, int mf_lower, int q);

}  // namespace ocw::angular
