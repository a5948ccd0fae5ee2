#pragma once

#include "g2forms/const_form.hpp"

namespace g2f {

// Model stable forms on R^7.  phi0/psi0 carry the compact structure with the
// Euclidean metric; the tilde pair carries the split structure with
// diag(+1,+1,+1,-1,-1,-1,-1).

FormQ phi0_q();        // dx123 + dx145 + dx167 + dx246 - dx257 - dx347 - dx356
FormQ psi0_q();        // dx4567 + dx2367 + dx2345 + dx1357 - dx1346 - dx1256 - dx1247
FormQ phi0_tilde_q();  // dx123 - dx145 - dx167 + dx246 - dx257 - dx347 - dx356
FormQ psi0_tilde_q();  // dx4567 - dx2367 - dx2345 + dx1357 - dx1346 - dx1256 - dx1247

// Variant fixtures with the -dx247 term in place of -dx257 (they appear in
// later sections of the source material; the canonical pair above is what
// every routine in this library uses).
FormQ phi0_variant247_q();
FormQ phi0_tilde_variant247_q();

FormD phi0();
FormD psi0();
FormD phi0_tilde();
FormD psi0_tilde();

Mat7<Rat> euclidean_metric_q();  // identity
Mat7<Rat> split_metric_q();      // diag(+1,+1,+1,-1,-1,-1,-1)
Mat7<Rat> cartan_c0_q();         // the standard Cartan involution, same diagonal

}  // namespace g2f
