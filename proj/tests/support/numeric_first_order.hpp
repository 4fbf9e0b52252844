#pragma once

#include "jordanperturb/first_order.hpp"

namespace jptest {

// First-order coefficients obtained by solving the order-z equations of the reduced
// pencil directly (dense Kronecker solves), independent of the closed forms.
struct NumericFirstOrder {
  jordanperturb::ComplexMatrix delta;  // z-coefficient of Theta^
  jordanperturb::ComplexMatrix y;
  jordanperturb::ComplexMatrix f1;
  jordanperturb::ComplexMatrix h1;
};

NumericFirstOrder numeric_first_order(const jordanperturb::AssembledPencil& p,
                                      const jordanperturb::ReducedPencil& r,
                                      const jordanperturb::SubspaceSelection& sel,
                                      const jordanperturb::ComplementPair& comp);

}  // namespace jptest
