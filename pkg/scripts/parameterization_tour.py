#!/usr/bin/env python3
"""Tour of the controller parameterizations on one scalar loop.

Starting from a stabilizing controller, extracts every parameter bundle
(Youla, input-output, state- and output-feedback system level, and the two
mixed forms), converts each back to the controller, and checks that the
direct translation maps agree with re-extraction.  All comparisons are
exact rational-function identities.
"""

from fractions import Fraction

from rstab import (
    PlantSS,
    RatFun,
    TFMatrix,
    controller_to_youla,
    coprime_factorize,
    iop_from_controller,
    iop_to_controller,
    mixed1_from_controller,
    mixed1_to_controller,
    mixed2_from_controller,
    mixed2_to_controller,
    slp_of_from_controller,
    slp_of_to_controller,
    slp_of_to_iop,
    slp_sf_from_controller,
    slp_sf_to_controller,
    slp_sf_to_iop,
    youla_to_controller,
    youla_to_iop,
)


def show(name, m: TFMatrix):
    entries = "; ".join(
        ", ".join(repr(e)[len("RatFun("):-1] for e in row) for row in m.entries
    )
    print(f"    {name:8s} = {entries}")


def main():
    a, k_gain = Fraction(1, 2), Fraction(-1, 2)
    plant = PlantSS([[a]], [[1]], [[1]], [[0]])
    print(f"plant G = 1/(z - {a}), controller K = {k_gain} (static state feedback)\n")

    k_y = TFMatrix(plant.u_space, plant.y_space, [[RatFun(k_gain)]])
    k_x = TFMatrix(plant.u_space, plant.x_space, [[RatFun(k_gain)]])

    print("input-output bundle {Y, U, W, Z}:")
    iop = iop_from_controller(plant.transfer(), k_y)
    for name in ("Y", "U", "W", "Z"):
        show(name, getattr(iop, name))
    assert iop_to_controller(iop) == k_y
    print("    round trip to controller: exact\n")

    print("state-feedback system level bundle {Phi_x, Phi_u}:")
    slp = slp_sf_from_controller(plant, k_x)
    show("Phi_x", slp.phi_x)
    show("Phi_u", slp.phi_u)
    assert slp_sf_to_controller(slp) == k_x
    mapped = slp_sf_to_iop(slp, plant)
    direct = iop_from_controller(plant.state_transfer(), k_x)
    assert mapped == direct
    print("    translation to IOP matches direct extraction: exact\n")

    print("output-feedback system level bundle:")
    of = slp_of_from_controller(plant, k_y)
    for name in ("phi_xx", "phi_ux", "phi_xy", "phi_uy"):
        show(name, getattr(of, name))
    assert slp_of_to_controller(of, plant.D) == k_y
    assert slp_of_to_iop(of, plant) == iop
    print("    translation to IOP matches the measurement loop: exact\n")

    print("mixed bundles:")
    m1 = mixed1_from_controller(plant, k_y)
    m2 = mixed2_from_controller(plant, k_y)
    assert mixed1_to_controller(m1) == k_y
    assert mixed2_to_controller(m2) == k_y
    show("Phi_yy", m1.phi_yy)
    show("Phi_uu", m2.phi_uu)
    print("    both round trips: exact\n")

    print("Youla parameter over an LQR-style factorization:")
    factors = coprime_factorize(plant, [[0]], [[0]])
    q = controller_to_youla(factors, k_y)
    show("Q", q.Q)
    assert youla_to_controller(factors, q) == k_y
    assert youla_to_iop(factors, q) == iop
    print("    round trip and translation to IOP: exact")


if __name__ == "__main__":
    main()
