"""State-feedback system level synthesis: realizations, certification,
FIR H2 synthesis, and time-domain cross-checks.

Three ways to realize the closed loop of a state-feedback controller given
its FIR response pair {Phi_x, Phi_u} are supported, all over the signal
space (x, u, delta):

* ``original_sls``   u = z Phi_u delta,  delta = x + (I - z Phi_x) delta.
  Avoids inverting Phi_x by introducing the reconstructed disturbance delta.
* ``deployment``     delta = (I - z^{-1} A) x - z^{-1} B u,  u = z Phi_u delta.
  Replaces one convolution by two matrix multiplications; internally stable
  when A is Schur stable.
* ``design_separation``  u = z M_c delta,  delta = x + (I - z P_c) delta
  for a (P_c, M_c) pair that realizes the same controller; stability is not
  automatic and is certified a posteriori.

``certify_realization`` inverts I - R exactly and checks every block for
stable properness.  ``simulate`` runs the corresponding time-domain update
equations in floating point, and ``impulse_match`` compares the simulated
impulse responses against the exact Markov parameters of the closed-form
stability matrix, catching any disagreement between the deployed recursion
and the response pair it claims to realize.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .errors import (
    ConvergenceError,
    InfeasibleError,
    InvariantViolation,
    SpaceMismatchError,
)
from .parameterizations import PlantSS, SLPStateFeedback, _dynamics_block, exact_matrix, spectral_radius
from .ratfun import DEFAULT_TOL, Poly, RatFun
from .realization import (
    BlockFinding,
    Realization,
    StabilityMatrix,
    check_conditions,
    stability_from_realization,
)
from .tfmatrix import SignalSpace, TFMatrix

ORIGINAL = "original_sls"
DEPLOYMENT = "deployment"
DESIGN_SEPARATION = "design_separation"
VARIANT_KINDS = (ORIGINAL, DEPLOYMENT, DESIGN_SEPARATION)


@dataclass(frozen=True, eq=False)
class FIRPhi:
    """Finite impulse response: real matrix taps for z^{-1} .. z^{-T}."""

    taps: tuple[np.ndarray, ...]

    def __post_init__(self):
        taps = tuple(np.atleast_2d(np.asarray(t, dtype=float)) for t in self.taps)
        if not taps:
            raise InvariantViolation("an FIR response needs at least one tap")
        shape = taps[0].shape
        if any(t.shape != shape for t in taps):
            raise InvariantViolation("all FIR taps must share one shape")
        object.__setattr__(self, "taps", taps)

    @property
    def horizon(self) -> int:
        return len(self.taps)

    @property
    def shape(self) -> tuple[int, int]:
        return self.taps[0].shape

    def tap(self, k: int) -> np.ndarray:
        """Coefficient of z^{-k}, zero outside 1..horizon."""
        if 1 <= k <= len(self.taps):
            return self.taps[k - 1]
        return np.zeros(self.shape)


def fir_to_tfmatrix(f: FIRPhi, rows: SignalSpace, cols: SignalSpace) -> TFMatrix:
    """Exact lift of float taps: entry (i, j) = sum_k taps[k][i, j] z^{-k}."""
    nr, nc = f.shape
    if rows.total != nr or cols.total != nc:
        raise SpaceMismatchError("FIR tap shape does not match the requested spaces")
    t = f.horizon
    den = Poly.z(t)
    ent = []
    for i in range(nr):
        row = []
        for j in range(nc):
            num = Poly([Fraction(f.taps[k][i, j]) for k in range(t - 1, -1, -1)])
            row.append(RatFun(num, den))
        ent.append(row)
    return TFMatrix(rows, cols, ent)


def fir_from_tfmatrix(m: TFMatrix, horizon: int | None = None) -> FIRPhi:
    """Extract float taps from a strictly proper FIR transfer matrix.

    Every entry must have a pure z-power denominator; otherwise the matrix
    has infinite impulse response and the extraction refuses.
    """
    worst = 0
    for row in m.entries:
        for e in row:
            d = e.den
            if any(c != 0 for c in d.coeffs[:-1]):
                raise InvariantViolation("matrix entry is not FIR (denominator is not z^k)")
            if not e.is_zero and e.num.degree >= d.degree:
                raise InvariantViolation("matrix entry is not strictly proper")
            worst = max(worst, d.degree)
    t = max(worst, 1) if horizon is None else horizon
    if t < max(worst, 1):
        raise InvariantViolation(f"horizon {t} cannot hold taps up to lag {worst}")
    nr, nc = m.shape
    taps = [np.zeros((nr, nc)) for _ in range(t)]
    for i in range(nr):
        for j in range(nc):
            e = m.entries[i][j]
            q = e.den.degree
            for k in range(1, q + 1):
                taps[k - 1][i, j] = float(e.num[q - k])
    return FIRPhi(tuple(taps))


def slp_from_fir(plant: PlantSS, phi_x: FIRPhi, phi_u: FIRPhi, tol: float = DEFAULT_TOL) -> SLPStateFeedback:
    """Validate a float FIR pair as a state-feedback bundle (exact lift)."""
    px = fir_to_tfmatrix(phi_x, plant.x_space, plant.x_space)
    pu = fir_to_tfmatrix(phi_u, plant.u_space, plant.x_space)
    return SLPStateFeedback.checked(px, pu, plant, tol)


def fir_from_slp(p: SLPStateFeedback, horizon: int | None = None) -> tuple[FIRPhi, FIRPhi]:
    return fir_from_tfmatrix(p.phi_x, horizon), fir_from_tfmatrix(p.phi_u, horizon)


@dataclass(frozen=True, eq=False)
class RealizationVariant:
    """One of the three closed-loop realizations with its FIR payload."""

    kind: str
    phi_x: FIRPhi
    phi_u: FIRPhi
    p_c: FIRPhi | None = None
    m_c: FIRPhi | None = None

    def __post_init__(self):
        if self.kind not in VARIANT_KINDS:
            raise InvariantViolation(f"unknown realization variant {self.kind!r}")
        n = self.phi_x.shape[0]
        if self.phi_x.shape != (n, n) or self.phi_u.shape[1] != n:
            raise InvariantViolation("Phi_x must be n x n and Phi_u m x n")
        if self.kind == DESIGN_SEPARATION:
            if self.p_c is None or self.m_c is None:
                raise InvariantViolation("design separation needs the (P_c, M_c) pair")
            if self.p_c.shape != (n, n) or self.m_c.shape != self.phi_u.shape:
                raise InvariantViolation("(P_c, M_c) shapes must match (Phi_x, Phi_u)")
        elif self.p_c is not None or self.m_c is not None:
            raise InvariantViolation(f"variant {self.kind!r} takes no (P_c, M_c) payload")

    @classmethod
    def original(cls, phi_x: FIRPhi, phi_u: FIRPhi) -> "RealizationVariant":
        return cls(ORIGINAL, phi_x, phi_u)

    @classmethod
    def deployment(cls, phi_x: FIRPhi, phi_u: FIRPhi) -> "RealizationVariant":
        return cls(DEPLOYMENT, phi_x, phi_u)

    @classmethod
    def design_separation(cls, p_c: FIRPhi, m_c: FIRPhi, phi_x: FIRPhi, phi_u: FIRPhi) -> "RealizationVariant":
        return cls(DESIGN_SEPARATION, phi_x, phi_u, p_c=p_c, m_c=m_c)

    def controller_taps(self) -> tuple[FIRPhi, FIRPhi]:
        """The (state-shaping, control) taps actually wired into the loop."""
        if self.kind == DESIGN_SEPARATION:
            return self.p_c, self.m_c
        return self.phi_x, self.phi_u


def _loop_space(plant: PlantSS) -> SignalSpace:
    return SignalSpace((("x", plant.n), ("u", plant.m), ("delta", plant.n)))


def build_realization(v: RealizationVariant, plant: PlantSS) -> Realization:
    """Assemble the realization matrix of the chosen variant over (x, u, delta)."""
    n, m = plant.n, plant.m
    if v.phi_x.shape != (n, n) or v.phi_u.shape != (m, n):
        raise SpaceMismatchError("payload dimensions do not match the plant")
    space = _loop_space(plant)
    x_sp = SignalSpace.single("x", n)
    u_sp = SignalSpace.single("u", m)
    d_sp = SignalSpace.single("delta", n)
    z = RatFun.z()
    p_taps, m_taps = v.controller_taps()
    u_row = z * fir_to_tfmatrix(m_taps, u_sp, d_sp)
    blocks: dict[tuple[str, str], TFMatrix] = {
        ("x", "x"): _dynamics_block(plant),
        ("x", "u"): TFMatrix.constant(x_sp, u_sp, plant.B),
        ("u", "delta"): u_row,
    }
    zeros = {("x", "delta"), ("u", "x"), ("u", "u")}
    if v.kind == DEPLOYMENT:
        # delta row: [z^{-1}(zI - A), -z^{-1} B, O]
        zinv = RatFun.z_inv()
        blocks[("delta", "x")] = TFMatrix.identity(x_sp).relabel(d_sp, x_sp) - zinv * TFMatrix.constant(d_sp, x_sp, plant.A)
        blocks[("delta", "u")] = -(zinv * TFMatrix.constant(d_sp, u_sp, plant.B))
        zeros.add(("delta", "delta"))
    else:
        # delta row: [I, O, I - z Phi] with Phi = Phi_x or P_c
        blocks[("delta", "x")] = TFMatrix.identity(x_sp).relabel(d_sp, x_sp)
        blocks[("delta", "delta")] = TFMatrix.identity(d_sp) - z * fir_to_tfmatrix(p_taps, d_sp, d_sp)
        zeros.add(("delta", "u"))
    r = TFMatrix.from_blocks(space, space, blocks)
    return Realization(space, r, frozenset(zeros))


def closed_form_stability(v: RealizationVariant, plant: PlantSS) -> TFMatrix:
    """The stability matrix each variant is designed to achieve, in closed form.

    Valid when the payload satisfies (zI - A) Phi_x - B Phi_u = I (and, for
    design separation, the fixed-point constraint relating (P_c, M_c) to the
    response pair); under those conditions it coincides with (I - R)^{-1}.
    ``impulse_match`` deliberately compares simulations against this matrix
    rather than the recomputed inverse, so payload corruption is detected
    instead of silently re-certified.
    """
    n, m = plant.n, plant.m
    space = _loop_space(plant)
    x_sp = SignalSpace.single("x", n)
    u_sp = SignalSpace.single("u", m)
    d_sp = SignalSpace.single("delta", n)
    z = RatFun.z()
    zinv = RatFun.z_inv()
    phi_x = fir_to_tfmatrix(v.phi_x, x_sp, x_sp)
    phi_u = fir_to_tfmatrix(v.phi_u, u_sp, x_sp)
    b = TFMatrix.constant(x_sp, u_sp, plant.B)
    zia = plant.z_minus_a()
    eye_x, eye_u = TFMatrix.identity(x_sp), TFMatrix.identity(u_sp)
    if v.kind == DEPLOYMENT:
        res_b = plant.resolvent() @ b  # (zI - A)^{-1} B
        blocks = {
            ("x", "x"): phi_x,
            ("x", "u"): res_b,
            ("x", "delta"): (z * (res_b @ phi_u)).relabel(x_sp, d_sp),
            ("u", "x"): phi_u,
            ("u", "u"): eye_u,
            ("u", "delta"): (z * phi_u).relabel(u_sp, d_sp),
            ("delta", "x"): (zinv * eye_x).relabel(d_sp, x_sp),
            ("delta", "delta"): TFMatrix.identity(d_sp),
        }
        return TFMatrix.from_blocks(space, space, blocks)
    if v.kind == DESIGN_SEPARATION:
        p_c = fir_to_tfmatrix(v.p_c, x_sp, x_sp)
        m_c = fir_to_tfmatrix(v.m_c, u_sp, x_sp)
        delta_c = zia @ p_c - b @ m_c
        s_dx = zinv * delta_c.inverse()
    else:
        s_dx = zinv * eye_x
    blocks = {
        ("x", "x"): phi_x,
        ("x", "u"): phi_x @ b,
        ("x", "delta"): (phi_x @ zia - eye_x).relabel(x_sp, d_sp),
        ("u", "x"): phi_u,
        ("u", "u"): eye_u + phi_u @ b,
        ("u", "delta"): (phi_u @ zia).relabel(u_sp, d_sp),
        ("delta", "x"): s_dx.relabel(d_sp, x_sp),
        ("delta", "u"): (s_dx @ b).relabel(d_sp, u_sp),
        ("delta", "delta"): (s_dx @ zia).relabel(d_sp, d_sp),
    }
    return TFMatrix.from_blocks(space, space, blocks)


@dataclass(frozen=True)
class CertificationReport:
    """Outcome of the a-posteriori stability certification of a variant.

    ``passed`` reflects the direct check: every block of (I - R)^{-1} is
    stable proper.  ``schur_stable`` is reported for the deployment variant
    (its stability premise), and ``delta_column_strictly_proper`` reports
    the sufficient condition S[delta, x] strictly proper and stable for the
    design-separation variant; both are informational and kept separate
    from the direct outcome.
    """

    variant: str
    passed: bool
    findings: tuple[BlockFinding, ...]
    schur_stable: bool | None
    delta_column_strictly_proper: bool | None
    realization: Realization
    stability: StabilityMatrix


def certify_realization(v: RealizationVariant, plant: PlantSS, tol: float = DEFAULT_TOL) -> CertificationReport:
    """Build the variant, invert I - R exactly, and test every block."""
    r = build_realization(v, plant)
    s = stability_from_realization(r)
    report = check_conditions(r, s, tol)
    schur = None
    delta_ok = None
    if v.kind == DEPLOYMENT:
        schur = spectral_radius(plant.A) < 1.0 - tol
    if v.kind == DESIGN_SEPARATION:
        delta_ok = s.S.block("delta", "x").classify(tol).in_zinv_rh_inf
    return CertificationReport(
        variant=v.kind,
        passed=report.passed,
        findings=report.findings,
        schur_stable=schur,
        delta_column_strictly_proper=delta_ok,
        realization=r,
        stability=s,
    )


def design_separation_constraint(
    p_c: TFMatrix, m_c: TFMatrix, p: SLPStateFeedback, plant: PlantSS
) -> bool:
    """Fixed-point test for a (P_c, M_c) pair against a response pair:

        [Phi_x; Phi_u] ((zI - A) P_c - B M_c) = [P_c; M_c]

    holds exactly iff the design-separation realization built from
    (P_c, M_c) reproduces {Phi_x, Phi_u}.  Both I - z P_c and z M_c must be
    proper for the realization to make sense, i.e. P_c and M_c strictly
    proper.
    """
    for name, mtx in (("P_c", p_c), ("M_c", m_c)):
        if not mtx.classify().all_strictly_proper:
            raise InvariantViolation(
                f"{name} must be strictly proper so that the realization stays causal"
            )
    b = TFMatrix.constant(plant.x_space, plant.u_space, plant.B)
    delta_c = plant.z_minus_a() @ p_c - b @ m_c
    return p.phi_x @ delta_c == p_c and p.phi_u @ delta_c == m_c


# ---------------------------------------------------------------------------
# synthesis
# ---------------------------------------------------------------------------


def _solve_exact(
    m: list[list[Fraction]], rhs: list[list[Fraction]]
) -> list[list[Fraction]]:
    """Solve M x = rhs exactly by Gauss-Jordan with partial pivoting.

    Returns one solution (free variables set to zero) for each right-hand
    side column; raises InfeasibleError when the system is inconsistent.
    """
    nrows = len(m)
    ncols = len(m[0]) if nrows else 0
    nrhs = len(rhs[0]) if rhs else 0
    aug = [list(m[i]) + list(rhs[i]) for i in range(nrows)]
    pivots: list[tuple[int, int]] = []  # (row, col)
    r = 0
    for c in range(ncols):
        best, best_mag = -1, None
        for i in range(r, nrows):
            v = aug[i][c]
            if v:
                mag = abs(v)
                if best_mag is None or mag > best_mag:
                    best, best_mag = i, mag
        if best < 0:
            continue
        aug[r], aug[best] = aug[best], aug[r]
        inv = 1 / aug[r][c]
        aug[r] = [v * inv for v in aug[r]]
        for i in range(nrows):
            if i != r and aug[i][c]:
                f = aug[i][c]
                row_r = aug[r]
                aug[i] = [v - f * w for v, w in zip(aug[i], row_r)]
        pivots.append((r, c))
        r += 1
        if r == nrows:
            break
    for i in range(r, nrows):
        if any(aug[i][ncols + j] for j in range(nrhs)):
            raise InfeasibleError("linear constraints are inconsistent")
    x = [[Fraction(0)] * nrhs for _ in range(ncols)]
    for row, col in pivots:
        x[col] = aug[row][ncols:]
    return x


def synthesize_sf_h2(plant: PlantSS, Qw, Rw, T: int) -> SLPStateFeedback:
    """FIR H2 state-feedback synthesis at horizon T.

    Minimizes sum_k ||Qw^{1/2} Phi_x[k]||_F^2 + ||Rw^{1/2} Phi_u[k]||_F^2
    subject to the response constraints

        Phi_x[1] = I,
        Phi_x[k+1] = A Phi_x[k] + B Phi_u[k]   (k < T),
        A Phi_x[T] + B Phi_u[T] = 0,

    which are exactly the FIR instances of (zI - A) Phi_x - B Phi_u = I.
    The taps decouple per disturbance column, so each column is one
    equality-constrained least-squares problem; its KKT system is solved
    exactly over the rationals (partial-pivoting elimination), making the
    affine identity of the returned bundle exact, not merely small.
    Infeasible horizons (e.g. unstabilizable pairs) raise InfeasibleError.
    """
    if T < 1:
        raise InvariantViolation("horizon must be at least 1")
    n, m = plant.n, plant.m
    a, b = plant.A, plant.B
    qw = exact_matrix(Qw)
    rw = exact_matrix(Rw)
    if qw.shape != (n, n) or rw.shape != (m, m):
        raise InvariantViolation("weight shapes must be Qw: n x n and Rw: m x m")
    nv = (n + m) * T
    nc = n * (T + 1)
    zero = Fraction(0)

    def xvar(k: int, i: int) -> int:  # Phi_x[k] row i, k = 1..T
        return (k - 1) * n + i

    def uvar(k: int, i: int) -> int:  # Phi_u[k] row i
        return n * T + (k - 1) * m + i

    kkt = [[zero] * (nv + nc) for _ in range(nv + nc)]
    for k in range(1, T + 1):
        for i in range(n):
            for j in range(n):
                kkt[xvar(k, i)][xvar(k, j)] = qw[i, j]
        for i in range(m):
            for j in range(m):
                kkt[uvar(k, i)][uvar(k, j)] = rw[i, j]

    def put_constraint(row: int, col: int, val: Fraction):
        kkt[nv + row][col] = val
        kkt[col][nv + row] = val

    row = 0
    for i in range(n):  # Phi_x[1] = e_j (rhs carries the unit columns)
        put_constraint(row, xvar(1, i), Fraction(1))
        row += 1
    for k in range(1, T):  # Phi_x[k+1] - A Phi_x[k] - B Phi_u[k] = 0
        for i in range(n):
            put_constraint(row, xvar(k + 1, i), Fraction(1))
            for j in range(n):
                if a[i, j]:
                    put_constraint(row, xvar(k, j), -a[i, j])
            for j in range(m):
                if b[i, j]:
                    put_constraint(row, uvar(k, j), -b[i, j])
            row += 1
    for i in range(n):  # A Phi_x[T] + B Phi_u[T] = 0
        for j in range(n):
            if a[i, j]:
                put_constraint(row, xvar(T, j), a[i, j])
        for j in range(m):
            if b[i, j]:
                put_constraint(row, uvar(T, j), b[i, j])
        row += 1

    rhs = [[zero] * n for _ in range(nv + nc)]
    for j in range(n):
        rhs[nv + j][j] = Fraction(1)
    try:
        sol = _solve_exact(kkt, rhs)
    except InfeasibleError as exc:
        raise InfeasibleError(
            f"no FIR response pair exists at horizon {T} for this plant"
        ) from exc

    den = Poly.z(T)
    phix_ent = [
        [
            RatFun(Poly([sol[xvar(k, i)][j] for k in range(T, 0, -1)]), den)
            for j in range(n)
        ]
        for i in range(n)
    ]
    phiu_ent = [
        [
            RatFun(Poly([sol[uvar(k, i)][j] for k in range(T, 0, -1)]), den)
            for j in range(n)
        ]
        for i in range(m)
    ]
    phi_x = TFMatrix(plant.x_space, plant.x_space, phix_ent)
    phi_u = TFMatrix(plant.u_space, plant.x_space, phiu_ent)
    return SLPStateFeedback.checked(phi_x, phi_u, plant)


def dare_lqr(plant: PlantSS, Qw, Rw, max_iter: int = 10_000, tol: float = 1e-12) -> np.ndarray:
    """LQR gain by fixed-point iteration of the discrete Riccati recursion.

    Iterates P <- Qw + A'PA - A'PB (Rw + B'PB)^{-1} B'PA until successive
    iterates agree within ``tol`` and returns K with u = K x and A + BK
    Schur stable.  Divergence (growth past 1e14) or exhaustion of
    ``max_iter`` raises ConvergenceError.
    """
    a = plant.A.astype(float)
    b = plant.B.astype(float)
    qw = np.atleast_2d(np.asarray(Qw, dtype=float))
    rw = np.atleast_2d(np.asarray(Rw, dtype=float))
    p = qw.copy()
    for _ in range(max_iter):
        btpb = rw + b.T @ p @ b
        k = -np.linalg.solve(btpb, b.T @ p @ a)
        p_next = qw + a.T @ p @ a + a.T @ p @ b @ k
        p_next = (p_next + p_next.T) / 2.0
        if not np.isfinite(p_next).all() or np.abs(p_next).max() > 1e14:
            raise ConvergenceError("Riccati iteration diverged")
        if np.abs(p_next - p).max() < tol:
            p = p_next
            gain = -np.linalg.solve(rw + b.T @ p @ b, b.T @ p @ a)
            if spectral_radius(a + b @ gain) >= 1.0:
                raise ConvergenceError("Riccati iteration converged to a non-stabilizing gain")
            return gain
        p = p_next
    raise ConvergenceError(f"Riccati iteration did not converge in {max_iter} steps")


# ---------------------------------------------------------------------------
# simulation
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SimTrace:
    """Time-domain signals (one row per step, t = 0..horizon) per name."""

    horizon: int
    signals: dict[str, np.ndarray]
    disturbance: dict[str, np.ndarray]


def _schedule(d: Mapping[str, Sequence] | None, name: str, horizon: int, dim: int) -> np.ndarray:
    out = np.zeros((horizon + 1, dim))
    if d and name in d:
        arr = np.atleast_2d(np.asarray(d[name], dtype=float))
        if arr.shape[1] != dim:
            raise SpaceMismatchError(f"disturbance {name!r} must have {dim} columns")
        steps = min(arr.shape[0], horizon + 1)
        out[:steps] = arr[:steps]
    return out


def simulate(
    v: RealizationVariant,
    plant: PlantSS,
    d: Mapping[str, Sequence] | None,
    horizon: int,
) -> SimTrace:
    """Run the variant's update equations from zero initial conditions.

    Every signal's defining equation receives its own additive disturbance
    channel; a disturbance hitting the state equation at time t shows up in
    x at time t+1 (the state map is strictly proper), while delta- and
    u-channel disturbances act instantaneously.

        x[t]     = A x[t-1] + B u[t-1] + d_x[t-1]
        delta[t] = x[t] - A x[t-1] - B u[t-1] + d_delta[t]        (deployment)
        P[1] delta[t] = x[t] - sum_{k>=2} P[k] delta[t+1-k] + d_delta[t]  (otherwise)
        u[t]     = sum_{k>=1} M[k] delta[t+1-k] + d_u[t]

    with (P, M) the wired taps of the variant.
    """
    if horizon < 0:
        raise InvariantViolation("horizon must be nonnegative")
    n, m = plant.n, plant.m
    a = plant.A.astype(float)
    b = plant.B.astype(float)
    p_taps, m_taps = v.controller_taps()
    dx = _schedule(d, "x", horizon, n)
    du = _schedule(d, "u", horizon, m)
    dd = _schedule(d, "delta", horizon, n)
    x = np.zeros((horizon + 1, n))
    u = np.zeros((horizon + 1, m))
    delta = np.zeros((horizon + 1, n))
    lead = p_taps.taps[0]
    for t in range(horizon + 1):
        if t >= 1:
            x[t] = a @ x[t - 1] + b @ u[t - 1] + dx[t - 1]
        if v.kind == DEPLOYMENT:
            prev_x = x[t - 1] if t >= 1 else np.zeros(n)
            prev_u = u[t - 1] if t >= 1 else np.zeros(m)
            delta[t] = x[t] - a @ prev_x - b @ prev_u + dd[t]
        else:
            acc = x[t] + dd[t]
            for k in range(2, p_taps.horizon + 1):
                s = t + 1 - k
                if s >= 0:
                    acc = acc - p_taps.taps[k - 1] @ delta[s]
            delta[t] = np.linalg.solve(lead, acc)
        acc_u = du[t].copy()
        for k in range(1, m_taps.horizon + 1):
            s = t + 1 - k
            if s >= 0:
                acc_u = acc_u + m_taps.taps[k - 1] @ delta[s]
        u[t] = acc_u
    return SimTrace(
        horizon=horizon,
        signals={"x": x, "u": u, "delta": delta},
        disturbance={"x": dx, "u": du, "delta": dd},
    )


@dataclass(frozen=True)
class ImpulseMatchReport:
    """Worst deviation between simulated and exact impulse responses."""

    passed: bool
    tolerance: float
    horizon: int
    max_deviation: float
    worst_signal: str | None
    worst_channel: str | None
    worst_lag: int | None


def impulse_match(
    v: RealizationVariant, plant: PlantSS, horizon: int, tol: float = 1e-9
) -> ImpulseMatchReport:
    """Cross-check the simulator against exact Markov parameters.

    For every disturbance channel a unit impulse at t = 0 is simulated and
    each signal's trace is compared, lag by lag, against the series
    expansion of the closed-form stability matrix column.  A payload whose
    recursion does not realize its claimed response pair (for example a
    corrupted tap) shows up as a deviation at the first inconsistent lag.
    """
    s_ref = closed_form_stability(v, plant)
    space = s_ref.rows
    names = space.names
    series = [
        [[float(h) for h in s_ref.entries[i][j].series(horizon)] for j in range(space.total)]
        for i in range(space.total)
    ]
    max_dev = 0.0
    worst: tuple[str | None, str | None, int | None] = (None, None, None)
    for cname in names:
        for local in range(space.dim(cname)):
            impulse = np.zeros((1, space.dim(cname)))
            impulse[0, local] = 1.0
            trace = simulate(v, plant, {cname: impulse}, horizon)
            col = space.offset(cname) + local
            for rname in names:
                sig = trace.signals[rname]
                base = space.offset(rname)
                for i in range(space.dim(rname)):
                    for t in range(horizon + 1):
                        dev = abs(sig[t, i] - series[base + i][col][t])
                        if dev > max_dev:
                            max_dev = dev
                            worst = (rname, cname, t)
    return ImpulseMatchReport(
        passed=max_dev <= tol,
        tolerance=tol,
        horizon=horizon,
        max_deviation=max_dev,
        worst_signal=worst[0],
        worst_channel=worst[1],
        worst_lag=worst[2],
    )
