"""Controller parameterizations and exact conversions between them.

Every internally stabilizing controller for a discrete-time plant can be
described by several equivalent parameter bundles: the Youla parameter Q
over a doubly coprime factorization, the input-output bundle {Y, U, W, Z},
the system level bundles (state feedback {Phi_x, Phi_u} and output feedback
{Phi_xx, Phi_ux, Phi_xy, Phi_uy}), and two mixed bundles.  Each bundle here
carries its affine constraints as exact rational-matrix identities (checked
on construction) and its stability memberships as numeric pole tests; the
conversions below map bundles to controllers and back, and translate
directly between parameterizations.

Signal naming convention: states are "x", controls "u", measurements "y".
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import InternalStabilityError, InvariantViolation, SpaceMismatchError
from .ratfun import DEFAULT_TOL, Poly, RatFun
from .realization import (
    Realization,
    StabilityMatrix,
    check_conditions,
    stability_from_realization,
)
from .tfmatrix import SignalSpace, TFMatrix


def exact_matrix(values) -> np.ndarray:
    """Lift an array-like of reals to a 2-D object array of Fractions."""
    arr = np.asarray(values, dtype=object)
    if arr.ndim != 2:
        raise InvariantViolation("expected a 2-D real matrix")
    out = np.empty(arr.shape, dtype=object)
    for i in range(arr.shape[0]):
        for j in range(arr.shape[1]):
            v = arr[i, j]
            if isinstance(v, np.generic):
                v = v.item()
            out[i, j] = Fraction(v)
    return out


def spectral_radius(m) -> float:
    a = np.asarray(m, dtype=object).astype(float)
    if a.size == 0:
        return 0.0
    return float(max(abs(np.linalg.eigvals(a))))


@dataclass(frozen=True)
class PlantSS:
    """State-space plant data (A, B, C, D) with exact rational entries.

    G(z) = C (zI - A)^{-1} B + D; the plant is strictly proper iff D = 0.
    """

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "A", exact_matrix(self.A))
        object.__setattr__(self, "B", exact_matrix(self.B))
        object.__setattr__(self, "C", exact_matrix(self.C))
        object.__setattr__(self, "D", exact_matrix(self.D))
        n, m, p = self.n, self.m, self.p
        if self.A.shape != (n, n) or self.B.shape != (n, m):
            raise InvariantViolation("A must be n x n and B n x m")
        if self.C.shape != (p, n) or self.D.shape != (p, m):
            raise InvariantViolation("C must be p x n and D p x m")

    @classmethod
    def state_feedback(cls, A, B) -> "PlantSS":
        """Plant with full state measurement: C = I, D = 0."""
        A = exact_matrix(A)
        B = exact_matrix(B)
        n = A.shape[0]
        eye = np.empty((n, n), dtype=object)
        zero = np.empty((n, B.shape[1]), dtype=object)
        for i in range(n):
            for j in range(n):
                eye[i, j] = Fraction(int(i == j))
            for j in range(B.shape[1]):
                zero[i, j] = Fraction(0)
        return cls(A, B, eye, zero)

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def m(self) -> int:
        return self.B.shape[1]

    @property
    def p(self) -> int:
        return self.C.shape[0]

    @property
    def is_strictly_proper(self) -> bool:
        return all(v == 0 for v in self.D.flat)

    # -- derived spaces and transfer matrices -------------------------------

    @property
    def x_space(self) -> SignalSpace:
        return SignalSpace.single("x", self.n)

    @property
    def u_space(self) -> SignalSpace:
        return SignalSpace.single("u", self.m)

    @property
    def y_space(self) -> SignalSpace:
        return SignalSpace.single("y", self.p)

    def z_minus_a(self) -> TFMatrix:
        """zI - A over the state space."""
        z = RatFun.z()
        ent = [
            [z - RatFun(self.A[i, j]) if i == j else RatFun(-self.A[i, j]) for j in range(self.n)]
            for i in range(self.n)
        ]
        return TFMatrix(self.x_space, self.x_space, ent)

    def resolvent(self) -> TFMatrix:
        """(zI - A)^{-1}."""
        return self.z_minus_a().inverse()

    def state_transfer(self) -> TFMatrix:
        """(zI - A)^{-1} B, the disturbance-to-state map, over (x, u)."""
        return self.resolvent() @ TFMatrix.constant(self.x_space, self.u_space, self.B)

    def transfer(self) -> TFMatrix:
        """G = C (zI - A)^{-1} B + D over (y, u)."""
        c = TFMatrix.constant(self.y_space, self.x_space, self.C)
        d = TFMatrix.constant(self.y_space, self.u_space, self.D)
        return c @ self.state_transfer() + d


def _dynamics_block(plant: PlantSS) -> TFMatrix:
    """A + (1 - z) I: the realization block that encodes x = (A/z-ish) dynamics.

    Improper on the diagonal by construction; the causality condition
    exempts diagonal blocks for exactly this reason.
    """
    n = plant.n
    ent = [
        [
            RatFun(Poly([plant.A[i, j] + 1, -1])) if i == j else RatFun(plant.A[i, j])
            for j in range(n)
        ]
        for i in range(n)
    ]
    return TFMatrix(plant.x_space, plant.x_space, ent)


# ---------------------------------------------------------------------------
# closed-loop realizations
# ---------------------------------------------------------------------------


def plant_feedback_loop(g: TFMatrix, k: TFMatrix) -> Realization:
    """Two-signal loop R = [[0, G], [K, 0]] over (output, control).

    Signal names come from g's own spaces, so the same builder serves
    measurement loops (y, u) and state loops (x, u).
    """
    if len(g.rows.blocks) != 1 or len(g.cols.blocks) != 1:
        raise SpaceMismatchError("plant transfer matrix must be single-block on both sides")
    if k.rows != g.cols or k.cols != g.rows:
        raise SpaceMismatchError("controller spaces must be the reverse of the plant's")
    out_name, p = g.rows.blocks[0]
    u_name, m = g.cols.blocks[0]
    space = SignalSpace(((out_name, p), (u_name, m)))
    r = TFMatrix.from_blocks(space, space, {(out_name, u_name): g, (u_name, out_name): k})
    zeros = frozenset({(out_name, out_name), (u_name, u_name)})
    return Realization(space, r, zeros)


def state_feedback_loop(plant: PlantSS, k: TFMatrix) -> Realization:
    """State-feedback loop R = [[A + (1-z)I, B], [K, 0]] over (x, u)."""
    space = SignalSpace((("x", plant.n), ("u", plant.m)))
    blocks = {
        ("x", "x"): _dynamics_block(plant),
        ("x", "u"): TFMatrix.constant(plant.x_space, plant.u_space, plant.B),
        ("u", "x"): k,
    }
    r = TFMatrix.from_blocks(space, space, blocks)
    return Realization(space, r, frozenset({("u", "u")}))


def output_feedback_loop(plant: PlantSS, k: TFMatrix) -> Realization:
    """Output-feedback loop over (x, u, y):

    R = [[A + (1-z)I, B, 0], [0, 0, K], [C, D, 0]].
    """
    space = SignalSpace((("x", plant.n), ("u", plant.m), ("y", plant.p)))
    blocks = {
        ("x", "x"): _dynamics_block(plant),
        ("x", "u"): TFMatrix.constant(plant.x_space, plant.u_space, plant.B),
        ("u", "y"): k,
        ("y", "x"): TFMatrix.constant(plant.y_space, plant.x_space, plant.C),
        ("y", "u"): TFMatrix.constant(plant.y_space, plant.u_space, plant.D),
    }
    r = TFMatrix.from_blocks(space, space, blocks)
    zeros = frozenset({("x", "y"), ("u", "x"), ("u", "u"), ("y", "y")})
    return Realization(space, r, zeros)


def stabilized_loop(r: Realization, tol: float, context: str) -> StabilityMatrix:
    """Stability matrix of a loop that is required to be internally stable."""
    s = stability_from_realization(r)
    report = check_conditions(r, s, tol)
    if not report.passed:
        bad = ", ".join(f"{f.matrix}[{f.row},{f.col}] {f.kind}" for f in report.findings)
        raise InternalStabilityError(f"{context}: {bad}", report)
    return s


# ---------------------------------------------------------------------------
# parameter bundles
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CoprimeFactors:
    """Doubly coprime factorization of a plant.

    All eight factors are stable proper, Ml and Mr are invertible with
    proper inverses (stable ones only when the plant itself is stable),
    G = Ml^{-1} Nl = Nr Mr^{-1}, and the double Bezout identity

        [[Ml, -Nl], [-Vl, Ul]] @ [[Ur, Nr], [Vr, Mr]] = I

    holds exactly.
    """

    Ml: TFMatrix
    Nl: TFMatrix
    Vl: TFMatrix
    Ul: TFMatrix
    Ur: TFMatrix
    Nr: TFMatrix
    Vr: TFMatrix
    Mr: TFMatrix

    def g(self) -> TFMatrix:
        """The plant transfer matrix Ml^{-1} Nl."""
        return self.Ml.inverse() @ self.Nl

    def bezout_product(self) -> TFMatrix:
        """Left factor times right factor; identity iff the Bezout identity holds."""
        y_sp, u_sp = self.Ml.rows, self.Mr.rows
        sp = SignalSpace(y_sp.blocks + u_sp.blocks)
        yname, uname = y_sp.names[0], u_sp.names[0]
        left = TFMatrix.from_blocks(
            sp, sp,
            {
                (yname, yname): self.Ml,
                (yname, uname): -self.Nl,
                (uname, yname): -self.Vl,
                (uname, uname): self.Ul,
            },
        )
        right = TFMatrix.from_blocks(
            sp, sp,
            {
                (yname, yname): self.Ur,
                (yname, uname): self.Nr,
                (uname, yname): self.Vr,
                (uname, uname): self.Mr,
            },
        )
        return left @ right

    def validate(self, tol: float = DEFAULT_TOL) -> None:
        for name in ("Ml", "Nl", "Vl", "Ul", "Ur", "Nr", "Vr", "Mr"):
            if not getattr(self, name).classify(tol).in_rh_inf:
                raise InvariantViolation(f"coprime factor {name} is not stable proper")
        sp = SignalSpace(self.Ml.rows.blocks + self.Mr.rows.blocks)
        if self.bezout_product() != TFMatrix.identity(sp):
            raise InvariantViolation("double Bezout identity fails")
        # Ml, Mr must be invertible with proper inverses so that G = Ml^{-1} Nl
        # is well defined; their inverses carry the plant's poles, so they are
        # stable only when the plant itself is.
        for name in ("Ml", "Mr"):
            if not getattr(self, name).inverse().classify(tol).all_proper:
                raise InvariantViolation(f"{name} is not invertible with a proper inverse")
        if self.Ml.inverse() @ self.Nl != self.Nr @ self.Mr.inverse():
            raise InvariantViolation("left and right factorizations disagree about the plant")


@dataclass(frozen=True)
class YoulaParam:
    """Free stable parameter Q ranging over all stabilizing controllers."""

    Q: TFMatrix

    @classmethod
    def checked(cls, Q: TFMatrix, tol: float = DEFAULT_TOL) -> "YoulaParam":
        if not Q.classify(tol).in_rh_inf:
            raise InvariantViolation("Youla parameter must be stable proper")
        return cls(Q)


@dataclass(frozen=True)
class IOPParam:
    """Input-output bundle {Y, U, W, Z}: the four closed-loop maps.

    Y : output disturbance -> output     U : output disturbance -> control
    W : control disturbance -> output    Z : control disturbance -> control
    """

    Y: TFMatrix
    U: TFMatrix
    W: TFMatrix
    Z: TFMatrix

    @classmethod
    def checked(cls, Y, U, W, Z, g: TFMatrix, tol: float = DEFAULT_TOL) -> "IOPParam":
        for name, m in (("Y", Y), ("U", U), ("W", W), ("Z", Z)):
            if not m.classify(tol).in_rh_inf:
                raise InvariantViolation(f"IOP block {name} is not stable proper")
        eye_o = TFMatrix.identity(g.rows)
        eye_u = TFMatrix.identity(g.cols)
        # row identity: [I, -G] [[Y, W], [U, Z]] = [I, O]
        if Y - g @ U != eye_o or W - g @ Z != TFMatrix.zeros(g.rows, g.cols):
            raise InvariantViolation("IOP row identity [I,-G][[Y,W],[U,Z]] = [I,O] fails")
        # column identity: [[Y, W], [U, Z]] [-G; I] = [O; I]
        if W - Y @ g != TFMatrix.zeros(g.rows, g.cols) or Z - U @ g != eye_u:
            raise InvariantViolation("IOP column identity [[Y,W],[U,Z]][-G;I] = [O;I] fails")
        return cls(Y, U, W, Z)


@dataclass(frozen=True)
class SLPStateFeedback:
    """State-feedback system level bundle {Phi_x, Phi_u}.

    Both maps are strictly proper and stable, and satisfy
    (zI - A) Phi_x - B Phi_u = I exactly.
    """

    phi_x: TFMatrix
    phi_u: TFMatrix

    @classmethod
    def checked(cls, phi_x, phi_u, plant: PlantSS, tol: float = DEFAULT_TOL) -> "SLPStateFeedback":
        if not phi_x.classify(tol).in_zinv_rh_inf:
            raise InvariantViolation("Phi_x must be strictly proper and stable")
        if not phi_u.classify(tol).in_zinv_rh_inf:
            raise InvariantViolation("Phi_u must be strictly proper and stable")
        b = TFMatrix.constant(plant.x_space, plant.u_space, plant.B)
        if plant.z_minus_a() @ phi_x - b @ phi_u != TFMatrix.identity(plant.x_space):
            raise InvariantViolation("(zI - A) Phi_x - B Phi_u = I fails")
        return cls(phi_x, phi_u)


@dataclass(frozen=True)
class SLPOutputFeedback:
    """Output-feedback system level bundle {Phi_xx, Phi_ux, Phi_xy, Phi_uy}.

    Satisfies the two affine identities

        [zI-A, -B] [[Phi_xx, Phi_xy], [Phi_ux, Phi_uy]] = [I, O]
        [[Phi_xx, Phi_xy], [Phi_ux, Phi_uy]] [zI-A; -C] = [I; O]

    with Phi_xx, Phi_ux, Phi_xy strictly proper stable and Phi_uy stable
    proper.  The identities do not involve D; the same bundle serves any
    direct feedthrough via the general controller formula.
    """

    phi_xx: TFMatrix
    phi_ux: TFMatrix
    phi_xy: TFMatrix
    phi_uy: TFMatrix

    @classmethod
    def checked(cls, phi_xx, phi_ux, phi_xy, phi_uy, plant: PlantSS, tol: float = DEFAULT_TOL):
        for name, m in (("Phi_xx", phi_xx), ("Phi_ux", phi_ux), ("Phi_xy", phi_xy)):
            if not m.classify(tol).in_zinv_rh_inf:
                raise InvariantViolation(f"{name} must be strictly proper and stable")
        if not phi_uy.classify(tol).in_rh_inf:
            raise InvariantViolation("Phi_uy must be stable proper")
        zia = plant.z_minus_a()
        b = TFMatrix.constant(plant.x_space, plant.u_space, plant.B)
        c = TFMatrix.constant(plant.y_space, plant.x_space, plant.C)
        eye_x = TFMatrix.identity(plant.x_space)
        if zia @ phi_xx - b @ phi_ux != eye_x:
            raise InvariantViolation("(zI - A) Phi_xx - B Phi_ux = I fails")
        if zia @ phi_xy - b @ phi_uy != TFMatrix.zeros(plant.x_space, plant.y_space):
            raise InvariantViolation("(zI - A) Phi_xy - B Phi_uy = O fails")
        if phi_xx @ zia - phi_xy @ c != eye_x:
            raise InvariantViolation("Phi_xx (zI - A) - Phi_xy C = I fails")
        if phi_ux @ zia - phi_uy @ c != TFMatrix.zeros(plant.u_space, plant.x_space):
            raise InvariantViolation("Phi_ux (zI - A) - Phi_uy C = O fails")
        return cls(phi_xx, phi_ux, phi_xy, phi_uy)


@dataclass(frozen=True)
class MixedParam1:
    """Mixed bundle {Phi_yx, Phi_ux, Phi_yy, Phi_uy} (output rows, state/output columns).

    All four blocks stable proper, with

        [I, -G] [[Phi_yx, Phi_yy], [Phi_ux, Phi_uy]] = [C (zI-A)^{-1}, I]
        [[Phi_yx, Phi_yy], [Phi_ux, Phi_uy]] [zI-A; -C] = O.
    """

    phi_yx: TFMatrix
    phi_ux: TFMatrix
    phi_yy: TFMatrix
    phi_uy: TFMatrix

    @classmethod
    def checked(cls, phi_yx, phi_ux, phi_yy, phi_uy, plant: PlantSS, tol: float = DEFAULT_TOL):
        for name, m in (
            ("Phi_yx", phi_yx), ("Phi_ux", phi_ux), ("Phi_yy", phi_yy), ("Phi_uy", phi_uy)
        ):
            if not m.classify(tol).in_rh_inf:
                raise InvariantViolation(f"{name} must be stable proper")
        g = plant.transfer()
        zia = plant.z_minus_a()
        c = TFMatrix.constant(plant.y_space, plant.x_space, plant.C)
        c_resolvent = c @ plant.resolvent()
        if phi_yx - g @ phi_ux != c_resolvent:
            raise InvariantViolation("Phi_yx - G Phi_ux = C (zI-A)^{-1} fails")
        if phi_yy - g @ phi_uy != TFMatrix.identity(plant.y_space):
            raise InvariantViolation("Phi_yy - G Phi_uy = I fails")
        if phi_yx @ zia - phi_yy @ c != TFMatrix.zeros(plant.y_space, plant.x_space):
            raise InvariantViolation("Phi_yx (zI-A) - Phi_yy C = O fails")
        if phi_ux @ zia - phi_uy @ c != TFMatrix.zeros(plant.u_space, plant.x_space):
            raise InvariantViolation("Phi_ux (zI-A) - Phi_uy C = O fails")
        return cls(phi_yx, phi_ux, phi_yy, phi_uy)


@dataclass(frozen=True)
class MixedParam2:
    """Mixed bundle {Phi_xy, Phi_uy, Phi_xu, Phi_uu} (state/control rows, output/control columns).

    All four blocks stable proper, with

        [zI-A, -B] [[Phi_xy, Phi_xu], [Phi_uy, Phi_uu]] = O
        [[Phi_xy, Phi_xu], [Phi_uy, Phi_uu]] [-G; I] = [(zI-A)^{-1} B; I].
    """

    phi_xy: TFMatrix
    phi_uy: TFMatrix
    phi_xu: TFMatrix
    phi_uu: TFMatrix

    @classmethod
    def checked(cls, phi_xy, phi_uy, phi_xu, phi_uu, plant: PlantSS, tol: float = DEFAULT_TOL):
        for name, m in (
            ("Phi_xy", phi_xy), ("Phi_uy", phi_uy), ("Phi_xu", phi_xu), ("Phi_uu", phi_uu)
        ):
            if not m.classify(tol).in_rh_inf:
                raise InvariantViolation(f"{name} must be stable proper")
        g = plant.transfer()
        zia = plant.z_minus_a()
        b = TFMatrix.constant(plant.x_space, plant.u_space, plant.B)
        if zia @ phi_xy - b @ phi_uy != TFMatrix.zeros(plant.x_space, plant.y_space):
            raise InvariantViolation("(zI-A) Phi_xy - B Phi_uy = O fails")
        if zia @ phi_xu - b @ phi_uu != TFMatrix.zeros(plant.x_space, plant.u_space):
            raise InvariantViolation("(zI-A) Phi_xu - B Phi_uu = O fails")
        if phi_xu - phi_xy @ g != plant.state_transfer():
            raise InvariantViolation("Phi_xu - Phi_xy G = (zI-A)^{-1} B fails")
        if phi_uu - phi_uy @ g != TFMatrix.identity(plant.u_space):
            raise InvariantViolation("Phi_uu - Phi_uy G = I fails")
        return cls(phi_xy, phi_uy, phi_xu, phi_uu)


# ---------------------------------------------------------------------------
# coprime factorization
# ---------------------------------------------------------------------------


def coprime_factorize(plant: PlantSS, F, L, tol: float = DEFAULT_TOL) -> CoprimeFactors:
    """Doubly coprime factorization from stabilizing gains F and L.

    F (m x n) must make A + BF Schur stable and L (n x p) must make A + LC
    Schur stable; both checks are numeric with margin ``tol``.  The eight
    factors are the standard observer/state-feedback construction:

        Mr = I + F Phi B     Nr = (C+DF) Phi B + D   with Phi = (zI-A-BF)^{-1}
        Vr = -F Phi L        Ur = I - (C+DF) Phi L
        Ml = I + C Psi L     Nl = C Psi (B+LD) + D   with Psi = (zI-A-LC)^{-1}
        Vl = -F Psi L        Ul = I - F Psi (B+LD)

    The result is validated exactly (Bezout, plant consistency) and
    numerically (stable-proper memberships) before it is returned.
    """
    F = exact_matrix(F)
    L = exact_matrix(L)
    n, m, p = plant.n, plant.m, plant.p
    if F.shape != (m, n) or L.shape != (n, p):
        raise InvariantViolation("gain shapes must be F: m x n and L: n x p")
    a_bf = plant.A + plant.B @ F
    a_lc = plant.A + L @ plant.C
    if spectral_radius(a_bf) >= 1.0 - tol:
        raise InvariantViolation("F does not stabilize: spectral radius of A + BF is not < 1")
    if spectral_radius(a_lc) >= 1.0 - tol:
        raise InvariantViolation("L does not stabilize: spectral radius of A + LC is not < 1")

    x_sp, u_sp, y_sp = plant.x_space, plant.u_space, plant.y_space
    const = TFMatrix.constant
    phi = _resolvent_of(a_bf, x_sp)
    psi = _resolvent_of(a_lc, x_sp)
    f_c = const(u_sp, x_sp, F)
    l_c = const(x_sp, y_sp, L)
    b_c = const(x_sp, u_sp, plant.B)
    d_c = const(y_sp, u_sp, plant.D)
    cdf = const(y_sp, x_sp, plant.C + plant.D @ F)
    bld = const(x_sp, u_sp, plant.B + L @ plant.D)
    c_c = const(y_sp, x_sp, plant.C)
    eye_u = TFMatrix.identity(u_sp)
    eye_y = TFMatrix.identity(y_sp)

    factors = CoprimeFactors(
        Ml=eye_y + c_c @ psi @ l_c,
        Nl=d_c + c_c @ psi @ bld,
        Vl=-(f_c @ psi @ l_c),
        Ul=eye_u - f_c @ psi @ bld,
        Ur=eye_y - cdf @ phi @ l_c,
        Nr=d_c + cdf @ phi @ b_c,
        Vr=-(f_c @ phi @ l_c),
        Mr=eye_u + f_c @ phi @ b_c,
    )
    factors.validate(tol)
    return factors


def _resolvent_of(a: np.ndarray, space: SignalSpace) -> TFMatrix:
    z = RatFun.z()
    n = a.shape[0]
    ent = [
        [z - RatFun(a[i, j]) if i == j else RatFun(-a[i, j]) for j in range(n)]
        for i in range(n)
    ]
    return TFMatrix(space, space, ent).inverse()


# ---------------------------------------------------------------------------
# Youla conversions
# ---------------------------------------------------------------------------


def youla_to_controller(f: CoprimeFactors, q: YoulaParam) -> TFMatrix:
    """K = (Vr - Mr Q) (Ur - Nr Q)^{-1}."""
    return (f.Vr - f.Mr @ q.Q) @ (f.Ur - f.Nr @ q.Q).inverse()


def controller_to_youla(f: CoprimeFactors, k: TFMatrix, tol: float = DEFAULT_TOL) -> YoulaParam:
    """Q = Mr^{-1} (Vr - S_ux Ml^{-1}) from the closed loop's control response.

    The controller must be admissible: its loop with the factored plant has
    to pass the causality/stability conditions.
    """
    g = f.g()
    loop = plant_feedback_loop(g, k)
    s = stabilized_loop(loop, tol, "controller_to_youla")
    out_name = g.rows.names[0]
    s_ux = s.S.block(g.cols.names[0], out_name)
    q = f.Mr.inverse() @ (f.Vr - s_ux @ f.Ml.inverse())
    return YoulaParam.checked(q, tol)


# ---------------------------------------------------------------------------
# IOP conversions
# ---------------------------------------------------------------------------


def iop_from_controller(g: TFMatrix, k: TFMatrix, tol: float = DEFAULT_TOL) -> IOPParam:
    """Extract {Y, U, W, Z} as the blocks of (I - R)^{-1} for the (G, K) loop."""
    if not g.classify(tol).all_strictly_proper:
        raise InvariantViolation("IOP extraction requires a strictly proper plant")
    loop = plant_feedback_loop(g, k)
    s = stabilized_loop(loop, tol, "iop_from_controller")
    o, u = g.rows.names[0], g.cols.names[0]
    return IOPParam.checked(
        Y=s.S.block(o, o), U=s.S.block(u, o), W=s.S.block(o, u), Z=s.S.block(u, u),
        g=g, tol=tol,
    )


def iop_to_controller(p: IOPParam) -> TFMatrix:
    """K = U Y^{-1}."""
    return p.U @ p.Y.inverse()


# ---------------------------------------------------------------------------
# SLP conversions
# ---------------------------------------------------------------------------


def slp_sf_to_controller(p: SLPStateFeedback) -> TFMatrix:
    """K = Phi_u Phi_x^{-1}."""
    return p.phi_u @ p.phi_x.inverse()


def slp_sf_from_controller(plant: PlantSS, k: TFMatrix, tol: float = DEFAULT_TOL) -> SLPStateFeedback:
    """Extract {Phi_x, Phi_u} as the state-disturbance columns of the loop's S."""
    loop = state_feedback_loop(plant, k)
    s = stabilized_loop(loop, tol, "slp_sf_from_controller")
    return SLPStateFeedback.checked(
        s.S.block("x", "x"), s.S.block("u", "x"), plant, tol
    )


def slp_of_to_controller(p: SLPOutputFeedback, D) -> TFMatrix:
    """K = K0 (I + D K0)^{-1} with K0 = Phi_uy - Phi_ux Phi_xx^{-1} Phi_xy.

    With D = 0 this reduces to K0 itself.
    """
    k0 = p.phi_uy - p.phi_ux @ p.phi_xx.inverse() @ p.phi_xy
    d = exact_matrix(D)
    if all(v == 0 for v in d.flat):
        return k0
    y_sp, u_sp = k0.cols, k0.rows
    d_c = TFMatrix.constant(y_sp, u_sp, d)
    return k0 @ (TFMatrix.identity(y_sp) + d_c @ k0).inverse()


def slp_of_from_controller(plant: PlantSS, k: TFMatrix, tol: float = DEFAULT_TOL) -> SLPOutputFeedback:
    """Extract {Phi_xx, Phi_ux, Phi_xy, Phi_uy} from the output-feedback loop's S."""
    loop = output_feedback_loop(plant, k)
    s = stabilized_loop(loop, tol, "slp_of_from_controller")
    return SLPOutputFeedback.checked(
        s.S.block("x", "x"), s.S.block("u", "x"),
        s.S.block("x", "y"), s.S.block("u", "y"),
        plant, tol,
    )


# ---------------------------------------------------------------------------
# mixed conversions
# ---------------------------------------------------------------------------


def mixed1_to_controller(p: MixedParam1) -> TFMatrix:
    """K = Phi_uy Phi_yy^{-1}."""
    return p.phi_uy @ p.phi_yy.inverse()


def mixed1_from_controller(plant: PlantSS, k: TFMatrix, tol: float = DEFAULT_TOL) -> MixedParam1:
    loop = output_feedback_loop(plant, k)
    s = stabilized_loop(loop, tol, "mixed1_from_controller")
    return MixedParam1.checked(
        s.S.block("y", "x"), s.S.block("u", "x"),
        s.S.block("y", "y"), s.S.block("u", "y"),
        plant, tol,
    )


def mixed2_to_controller(p: MixedParam2) -> TFMatrix:
    """K = Phi_uu^{-1} Phi_uy."""
    return p.phi_uu.inverse() @ p.phi_uy


def mixed2_from_controller(plant: PlantSS, k: TFMatrix, tol: float = DEFAULT_TOL) -> MixedParam2:
    loop = output_feedback_loop(plant, k)
    s = stabilized_loop(loop, tol, "mixed2_from_controller")
    return MixedParam2.checked(
        s.S.block("x", "y"), s.S.block("u", "y"),
        s.S.block("x", "u"), s.S.block("u", "u"),
        plant, tol,
    )


# ---------------------------------------------------------------------------
# direct maps between parameterizations
# ---------------------------------------------------------------------------


def youla_to_iop(f: CoprimeFactors, q: YoulaParam, tol: float = DEFAULT_TOL) -> IOPParam:
    """Translate a Youla parameter into the input-output bundle:

    [[Y, W], [U, Z]] = [[(Ur-NrQ)Ml, (Ur-NrQ)Nl], [(Vr-MrQ)Ml, I+(Vr-MrQ)Nl]].
    """
    e = f.Ur - f.Nr @ q.Q
    v = f.Vr - f.Mr @ q.Q
    eye_u = TFMatrix.identity(f.Mr.rows)
    return IOPParam.checked(
        Y=e @ f.Ml, W=e @ f.Nl, U=v @ f.Ml, Z=eye_u + v @ f.Nl,
        g=f.g(), tol=tol,
    )


def slp_sf_to_iop(p: SLPStateFeedback, plant: PlantSS, tol: float = DEFAULT_TOL) -> IOPParam:
    """Translate the state-feedback bundle into the input-output bundle.

    The loop over (x, u) is equivalent to the plant/controller loop with
    G = (zI-A)^{-1} B under the disturbance change T = diag(zI-A, I), so

    [[Y, W], [U, Z]] = [[Phi_x (zI-A), Phi_x B], [Phi_u (zI-A), I + Phi_u B]].
    """
    zia = plant.z_minus_a()
    b = TFMatrix.constant(plant.x_space, plant.u_space, plant.B)
    eye_u = TFMatrix.identity(plant.u_space)
    return IOPParam.checked(
        Y=p.phi_x @ zia, W=p.phi_x @ b, U=p.phi_u @ zia, Z=eye_u + p.phi_u @ b,
        g=plant.state_transfer(), tol=tol,
    )


def slp_of_to_iop(p: SLPOutputFeedback, plant: PlantSS, tol: float = DEFAULT_TOL) -> IOPParam:
    """Translate the output-feedback bundle into the input-output bundle:

    Y = C Phi_xy + D Phi_uy + I        U = Phi_uy
    Z = Phi_ux B + Phi_uy D + I        W = (C Phi_xx + D Phi_ux) B + Y D.

    Valid for any direct feedthrough D, strictly proper or not.
    """
    c = TFMatrix.constant(plant.y_space, plant.x_space, plant.C)
    d = TFMatrix.constant(plant.y_space, plant.u_space, plant.D)
    b = TFMatrix.constant(plant.x_space, plant.u_space, plant.B)
    y = c @ p.phi_xy + d @ p.phi_uy + TFMatrix.identity(plant.y_space)
    z = p.phi_ux @ b + p.phi_uy @ d + TFMatrix.identity(plant.u_space)
    w = (c @ p.phi_xx + d @ p.phi_ux) @ b + y @ d
    return IOPParam.checked(Y=y, U=p.phi_uy, W=w, Z=z, g=plant.transfer(), tol=tol)
