#pragma once

#include "mlmagma/symbolic.hpp"

namespace oracle {

using mlm::sym::Poly;
using mlm::sym::SymVector3;
using mlm::sym::Var;

// The printed closed forms, typed in term by term.
struct Printed {
    Poly a0 = Poly::variable(Var::a0), a1 = Poly::variable(Var::a1), a2 = Poly::variable(Var::a2);
    Poly A = Poly::variable(Var::A), B = Poly::variable(Var::B), C = Poly::variable(Var::C);
    Poly D = Poly::variable(Var::D), E = Poly::variable(Var::E);
    Poly one = Poly::constant(1);
    Poly u = a0 + one;

    SymVector3 square() const {
        const Poly common = D * a1 + E * a2 + 2 * u;
        return {u * u + A * a1 * a1 + B * a2 * a2 + C * a1 * a2 - one, a1 * common, a2 * common};
    }
    Poly cube0() const {
        return u * u * u + A * D * a1 * a1 * a1 + B * E * a2 * a2 * a2 + 3 * a0 * (A * a1 * a1 + B * a2 * a2) +
               3 * C * a0 * a1 * a2 + (A * E + C * D) * a1 * a1 * a2 + (B * D + C * E) * a1 * a2 * a2 +
               3 * A * a1 * a1 + 3 * B * a2 * a2 + 3 * C * a1 * a2 - one;
    }
    Poly cube_common() const {
        return 3 * u * u + (A + D * D) * a1 * a1 + (B + E * E) * a2 * a2 + 3 * (D * a1 + E * a2) * u +
               (C + 2 * D * E) * a1 * a2;
    }
};

}  // namespace oracle
