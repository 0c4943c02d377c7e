"""Shared fixture generators and independent oracles for the test suite.

The oracles here are deliberately naive (cofactor-expansion inverses,
brute-force convolution) so they share no code path with the library
routines they check.
"""

from __future__ import annotations

import random
from fractions import Fraction

import numpy as np

from rstab import (
    FIRPhi,
    PlantSS,
    Poly,
    RatFun,
    Realization,
    SignalSpace,
    SLPStateFeedback,
    TFMatrix,
    stability_from_realization,
)
from rstab.errors import SingularMatrixError


def rand_fraction(rng: random.Random, span: int = 2, max_den: int = 3) -> Fraction:
    return Fraction(rng.randint(-span, span), rng.randint(1, max_den))


def rand_poly(rng: random.Random, max_deg: int = 3, span: int = 2) -> Poly:
    deg = rng.randint(0, max_deg)
    return Poly([rand_fraction(rng, span) for _ in range(deg + 1)])


def rand_ratfun(rng: random.Random, max_deg: int = 3) -> RatFun:
    num = rand_poly(rng, max_deg)
    deg = rng.randint(0, max_deg)
    # monic-leading denominator guarantees nonzero
    den = Poly([rand_fraction(rng) for _ in range(deg)] + [Fraction(1)])
    return RatFun(num, den)


def rand_tfmatrix(rng: random.Random, rows: SignalSpace, cols: SignalSpace, max_deg: int = 3) -> TFMatrix:
    return TFMatrix(
        rows, cols,
        [[rand_ratfun(rng, max_deg) for _ in range(cols.total)] for _ in range(rows.total)],
    )


def rand_space(rng: random.Random, min_blocks: int = 2, max_blocks: int = 4) -> SignalSpace:
    k = rng.randint(min_blocks, max_blocks)
    return SignalSpace(tuple((f"s{i}", 1) for i in range(k)))


def rand_realization(rng: random.Random, max_deg: int = 3) -> Realization:
    """Random realization with invertible I - R (resampled until invertible)."""
    return _rand_realization(rng, max_deg, zero_diag=False)[0]


def rand_realization_with_zero_diag(rng: random.Random, max_deg: int = 3) -> tuple[Realization, str]:
    """Random invertible realization plus the name of a zeroed diagonal block."""
    return _rand_realization(rng, max_deg, zero_diag=True)


def _rand_realization(rng: random.Random, max_deg: int, zero_diag: bool) -> tuple[Realization, str]:
    space = rand_space(rng)
    while True:
        ent = [
            [rand_ratfun(rng, max_deg) for _ in range(space.total)]
            for _ in range(space.total)
        ]
        target = rng.choice(space.names)
        zeros = frozenset()
        if zero_diag:
            i = space.offset(target)  # all fixture blocks are one-dimensional
            ent[i][i] = RatFun.zero()
            zeros = frozenset({(target, target)})
        real = Realization(space, TFMatrix(space, space, ent), zeros)
        try:
            stability_from_realization(real)
        except SingularMatrixError:
            continue
        return real, target


# -- independent linear-algebra oracle ----------------------------------------


def det_cofactor(ent: list[list[RatFun]]) -> RatFun:
    n = len(ent)
    if n == 1:
        return ent[0][0]
    total = RatFun.zero()
    for j in range(n):
        if ent[0][j].is_zero:
            continue
        minor = [[ent[i][k] for k in range(n) if k != j] for i in range(1, n)]
        term = ent[0][j] * det_cofactor(minor)
        total = total + term if j % 2 == 0 else total - term
    return total


def adjugate_inverse(m: TFMatrix) -> TFMatrix:
    """Cofactor-expansion inverse; independent of the elimination routine."""
    n = m.rows.total
    ent = [list(row) for row in m.entries]
    d = det_cofactor(ent)
    if d.is_zero:
        raise SingularMatrixError("oracle: determinant is zero")
    d_inv = d.inverse()
    out = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [[ent[r][c] for c in range(n) if c != i] for r in range(n) if r != j]
            cof = det_cofactor(minor) if n > 1 else RatFun.one()
            if (i + j) % 2 == 1:
                cof = -cof
            out[i][j] = cof * d_inv
    return TFMatrix(m.cols, m.rows, out)


# -- SLS fixtures --------------------------------------------------------------


def dyadic(rng: random.Random, span: int = 2, max_pow: int = 2) -> float:
    """A random dyadic rational, exactly representable as a float."""
    return rng.randint(-span, span) / (2 ** rng.randint(0, max_pow))


def dyadic_fir_pair(rng: random.Random, plant: PlantSS, horizon: int) -> tuple[FIRPhi, FIRPhi]:
    """A valid FIR response pair with exactly float-representable taps.

    Requires B square and invertible (identity in the fixtures).  Phi_u taps
    are free dyadics except the last, which closes the terminal condition
    A Phi_x[T] + B Phi_u[T] = 0; Phi_x follows the reachability recursion.
    Everything stays dyadic, so lifting floats loses nothing.
    """
    n, m = plant.n, plant.m
    if n != m:
        raise ValueError("fixture recipe needs square invertible B")
    a = plant.A.astype(float)
    b = plant.B.astype(float)
    b_inv = np.linalg.inv(b)
    phi_x = [np.eye(n)]
    phi_u = []
    for _ in range(horizon - 1):
        u_tap = np.array([[dyadic(rng) for _ in range(n)] for _ in range(m)])
        phi_u.append(u_tap)
        phi_x.append(a @ phi_x[-1] + b @ u_tap)
    phi_u.append(-b_inv @ (a @ phi_x[-1]))
    return FIRPhi(tuple(phi_x)), FIRPhi(tuple(phi_u))


def slp_pair(rng: random.Random, plant: PlantSS, horizon: int) -> SLPStateFeedback:
    from rstab import slp_from_fir

    fx, fu = dyadic_fir_pair(rng, plant, horizon)
    return slp_from_fir(plant, fx, fu)


def rand_fir_tfmatrix(
    rng: random.Random,
    rows: SignalSpace,
    cols: SignalSpace,
    deg: int = 3,
    span: int = 2,
    max_den: int = 2,
    biproper: bool = True,
) -> TFMatrix:
    """Random FIR transfer matrix: polynomial in z^{-1} up to z^{-deg}."""
    lo = 0 if biproper else 1
    ent = []
    for _ in range(rows.total):
        row = []
        for _ in range(cols.total):
            coeffs = [Fraction(0)] * (deg + 1)
            for k in range(lo, deg + 1):
                coeffs[deg - k] = rand_fraction(rng, span, max_den)
            row.append(RatFun(Poly(coeffs), Poly.z(deg)))
        ent.append(row)
    return TFMatrix(rows, cols, ent)


def conv_truncated(a: list[Fraction], b: list[Fraction], n: int) -> list[Fraction]:
    out = []
    for k in range(n + 1):
        acc = Fraction(0)
        for i in range(k + 1):
            if i < len(a) and k - i < len(b):
                acc += a[i] * b[k - i]
        out.append(acc)
    return out
