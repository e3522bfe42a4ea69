"""Principal curvatures of tubes: Riccati branches, M-Jacobi fields, focal radii.

Along a unit-speed normal geodesic of CP^n every parallel eigen-direction of
the normal Jacobi operator has constant eigenvalue kappa^2 with kappa in
{1, 2}.  A tube principal curvature then obeys lambda' = lambda^2 + kappa^2,
solved by lambda(r) = kappa cot(kappa (theta - r)).  The phase theta encodes
the initial value; theta = 0 is the branch starting at -infinity (directions
normal to X).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import atan2, inf, pi

import numpy as np

from .config import DEFAULT, Tolerances
from .fs_core import ProjectivePoint
from .submanifold import EmbeddedSubmanifold, LocalGeometry, SubmanifoldError, local_geometry, random_unit_normal

__all__ = [
    "RiccatiBranch",
    "RiccatiTrajectory",
    "StepTooLargeError",
    "riccati_closed_form",
    "riccati_integrate_numeric",
    "riccati_integrate_batch",
    "JacobiState",
    "jacobi_integrate",
    "FocalReport",
    "tube_branches",
    "focal_distance_along",
    "FocalEstimate",
    "min_focal_distance_estimate",
]


class StepTooLargeError(RuntimeError):
    pass


@dataclass(frozen=True)
class RiccatiBranch:
    kappa: float
    theta: float
    multiplicity: int = 1
    label: str = ""

    def __post_init__(self):
        if self.kappa not in (1, 2, 1.0, 2.0):
            raise ValueError("kappa must be 1 or 2 in CP^n")
        if not 0.0 <= self.theta < pi / self.kappa:
            raise ValueError(f"theta must lie in [0, pi/kappa), got {self.theta}")
        if self.multiplicity < 1:
            raise ValueError("multiplicity must be positive")

    @classmethod
    def from_initial(cls, kappa: float, lam0: float, multiplicity: int = 1, label: str = "") -> "RiccatiBranch":
        """Branch with lambda(0) = lam0; lam0 = -inf gives the theta = 0 branch."""
        if lam0 == -inf:
            theta = 0.0
        else:
            theta = atan2(kappa, lam0) / kappa
            if theta >= pi / kappa:
                theta = 0.0
        return cls(kappa, theta, multiplicity, label)

    @property
    def initial_value(self) -> float:
        if self.theta == 0.0:
            return -inf
        with np.errstate(over="ignore"):
            return float(self.kappa / np.tan(self.kappa * self.theta))

    @property
    def blowup_radius(self) -> float:
        return self.theta if self.theta > 0 else pi / self.kappa

    def evolve(self, r: float) -> "RiccatiBranch":
        """The branch seen from radius ``r``: phase theta - r reduced mod pi/kappa."""
        period = pi / self.kappa
        theta = (self.theta - r) % period
        if theta >= period:
            theta = 0.0
        return RiccatiBranch(self.kappa, theta, self.multiplicity, self.label)


def riccati_closed_form(branch: RiccatiBranch, r: float) -> float:
    """kappa cot(kappa (theta - r)); signed infinity exactly at a blow-up."""
    if r < 0:
        raise ValueError("r must be non-negative")
    period = pi / branch.kappa
    phase = (branch.theta - r) % period
    if phase == 0.0:
        return -inf if r == 0.0 else inf
    with np.errstate(over="ignore"):
        return float(branch.kappa / np.tan(branch.kappa * phase))


@dataclass
class RiccatiTrajectory:
    radii: np.ndarray  # (m,)
    values: np.ndarray  # (branches, m); +-inf where a grid point hits a blow-up
    blowups: list  # per branch, all blow-up radii within [0, r_max]
    method: str = "numeric"

    @property
    def first_blowup(self) -> np.ndarray:
        return np.array([b[0] if b else inf for b in self.blowups])


_SUBSTEPS = 4


def _rk4_step(lam, h, k2):
    half = 0.5 * h
    f1 = lam * lam + k2
    y = lam + half * f1
    f2 = y * y + k2
    y = lam + half * f2
    f3 = y * y + k2
    y = lam + h * f3
    f4 = y * y + k2
    f2 += f3
    f2 *= 2.0
    f1 += f2
    f1 += f4
    f1 *= h / 6.0
    return f1


def riccati_integrate_batch(
    kappas,
    thetas,
    r_max: float,
    step: float,
    control: float = 6e-4,
    tol: Tolerances = DEFAULT,
) -> RiccatiTrajectory:
    """Integrate many branches, each on its own step schedule, in one vectorized loop.

    Raw RK4 on lambda with sub-steps h <= min(step, control / (|lambda| + kappa)) and
    compensated accumulation.  Once |lambda| exceeds ``tol.riccati_switch``
    the state moves to the phase phi = theta - r (lambda = kappa cot(kappa phi),
    phi' = -1, which RK4 integrates exactly); a blow-up is phi crossing zero.
    The state returns to raw RK4 when |lambda| falls back below the switch.
    Values are recorded on the grid 0, step, 2 step, ..., r_max.
    """
    if step <= 0:
        raise ValueError("step must be positive")
    kap = np.atleast_1d(np.asarray(kappas, dtype=float))
    th = np.atleast_1d(np.asarray(thetas, dtype=float))
    nb = kap.size
    k2 = kap**2
    period = pi / kap
    switch = tol.riccati_switch
    enter = np.arctan(kap / switch) / kap  # phi at lambda = +switch
    leave = period - enter  # phi at lambda = -switch

    count = int(np.floor(r_max / step + 1e-9))
    grid = step * np.arange(count + 1)
    if grid[-1] < r_max - 1e-12:
        grid = np.append(grid, r_max)
    m = grid.size
    values = np.empty((nb, m))
    idx = np.arange(nb)

    safe_th = np.where(th > 0, th, 1.0)
    with np.errstate(over="ignore"):
        # a subnormal theta legitimately starts at lambda = +inf
        lam = np.where(th > 0, kap / np.tan(kap * safe_th), 0.0)
    comp = np.zeros(nb)
    phase_mode = (th == 0) | (np.abs(lam) > switch)
    phi = np.where(th == 0, period, np.where(phase_mode, th, 0.0))
    values0 = np.where(th == 0, -inf, lam)
    # lambda is unused in phase mode; zero keeps the idle RK4 arithmetic finite
    lam = np.where(phase_mode, 0.0, lam)
    r = np.zeros(nb)
    blowups: list[list[float]] = [[] for _ in range(nb)]
    pole_hit = np.zeros(nb, dtype=bool)
    comp_r = np.zeros(nb)

    values[:, 0] = values0
    nxt = np.ones(nb, dtype=int)  # index of the next grid point per branch
    active = nxt < m
    while active.any():
        target = grid[np.minimum(nxt, m - 1)]
        remaining = target - r

        raw = active & ~phase_mode
        if raw.any():
            # idle branches get h = 0, which leaves their state untouched
            # because their compensation terms are kept at zero.  Several
            # sub-steps run between event checks: with h <= control/|lambda|
            # lambda grows by well under 1% per round.
            for _ in range(_SUBSTEPS):
                remaining = target - r
                h = np.minimum(remaining, np.minimum(step, control / (np.abs(lam) + kap)))
                h *= raw
                inc = _rk4_step(lam, h, k2)
                # Kahan summation keeps round-off from feeding the lambda^2 growth
                inc -= comp
                t = lam + inc
                comp = (t - lam) - inc
                lam = t
                # r is also summed with compensation: lambda' ~ lambda^2 turns a
                # position error into a value error amplified by lambda^2
                yr = h - comp_r
                tr = r + yr
                comp_r = (tr - r) - yr
                r = tr
                landed = h == remaining
                np.copyto(r, target, where=landed)
                np.copyto(comp_r, 0.0, where=landed)
            remaining = target - r
            hot = raw & (np.abs(lam) > switch)
            if hot.any():
                phi = np.where(hot, np.arctan2(kap, lam) / kap, phi)
                phase_mode = phase_mode | hot
                np.copyto(comp, 0.0, where=hot)
                np.copyto(comp_r, 0.0, where=hot)

        ph = active & phase_mode & ~raw
        if ph.any():
            # jump to the next event: grid point, blow-up, or return to raw
            upper = phi > leave
            to_blow = np.where(upper, inf, phi)
            to_exit = np.where(upper, phi - leave, inf)
            blew = ph & (to_blow <= remaining + 1e-12)
            h = np.where(blew, np.minimum(to_blow, remaining), np.minimum(remaining, to_exit))
            exiting = ph & ~blew & (to_exit < remaining)
            for i in np.nonzero(blew)[0]:
                blowups[i].append(float(r[i] + h[i]))
            landed = ph & (h >= remaining)
            pole_hit = pole_hit | (blew & landed)
            phi = np.where(blew, period, np.where(ph, phi - h, phi))
            r = np.where(landed, target, np.where(ph, r + h, r))
            comp_r = np.where(ph, 0.0, comp_r)
            if exiting.any():
                lam = np.where(exiting, -switch, lam)
                comp = np.where(exiting, 0.0, comp)
                phase_mode = phase_mode & ~exiting

        done = active & (r >= target)
        if done.any():
            cols = nxt[done]
            with np.errstate(divide="ignore"):
                lam_phase = kap[done] / np.tan(kap[done] * phi[done])
            val = np.where(phase_mode[done], lam_phase, lam[done])
            values[idx[done], cols] = np.where(pole_hit[done], inf, val)
            pole_hit = pole_hit & ~done
            nxt = np.where(done, nxt + 1, nxt)
        active = nxt < m
    return RiccatiTrajectory(grid, values, blowups, "numeric")


def riccati_integrate_numeric(
    branch: RiccatiBranch,
    r_max: float,
    step: float,
    control: float = 6e-4,
    check_step: bool = True,
    tol: Tolerances = DEFAULT,
) -> RiccatiTrajectory:
    """Integrate one branch on the grid ``0, step, ..., r_max``.

    With ``check_step`` the run is repeated with ``step`` and ``control``
    halved; disagreement beyond 1e-8 in value (where |lambda| < switch) or
    1e-6 in blow-up radius raises :class:`StepTooLargeError`.
    """
    traj = riccati_integrate_batch([branch.kappa], [branch.theta], r_max, step, control, tol)
    if check_step:
        half = riccati_integrate_batch([branch.kappa], [branch.theta], r_max, step / 2, control / 2, tol)
        fine = half.values[:, ::2]
        width = min(fine.shape[1], traj.values.shape[1])
        coarse, fine = traj.values[:, :width], fine[:, :width]
        ok = (np.abs(coarse) < tol.riccati_switch) & (np.abs(fine) < tol.riccati_switch)
        drift = float(np.max(np.abs(coarse[ok] - fine[ok]), initial=0.0))
        b1, b2 = traj.blowups[0], half.blowups[0]
        if len(b1) != len(b2) or drift > 1e-8 or any(abs(x - y) > 1e-6 for x, y in zip(b1, b2)):
            raise StepTooLargeError(
                f"step {step} does not survive halving (value drift {drift:.2e}, blow-ups {b1} vs {b2})"
            )
    return traj


# -- Jacobi fields ------------------------------------------------------------

@dataclass(frozen=True)
class JacobiState:
    """Components of an M-Jacobi field in a parallel eigen-frame along the geodesic.

    ``tangent`` marks directions in T_pM (the rest are normal directions other
    than the geodesic itself); ``shape`` holds the shape-operator eigenvalue
    of each tangent direction.
    """

    Y: np.ndarray
    Yp: np.ndarray
    kappa: np.ndarray
    tangent: np.ndarray
    shape: np.ndarray
    r: float = 0.0

    def check_initial(self, atol: float = 1e-12) -> None:
        if self.r != 0.0:
            return
        if np.any(np.abs(self.Y[~self.tangent]) > atol):
            raise ValueError("Y(0) must be tangent to M")
        resid = self.Yp[self.tangent] + self.shape[self.tangent] * self.Y[self.tangent]
        if np.any(np.abs(resid) > atol):
            raise ValueError("Y'(0) + A Y(0) must be normal to M")

    @classmethod
    def basis_field(cls, index: int, kappa, tangent, shape) -> "JacobiState":
        """The M-Jacobi field supported on one eigen-direction."""
        kappa = np.asarray(kappa, dtype=float)
        tangent = np.asarray(tangent, dtype=bool)
        shape = np.asarray(shape, dtype=float)
        Y = np.zeros(kappa.size)
        Yp = np.zeros(kappa.size)
        if tangent[index]:
            Y[index] = 1.0
            Yp[index] = -shape[index]
        else:
            Yp[index] = 1.0
        state = cls(Y, Yp, kappa, tangent, shape)
        state.check_initial()
        return state

    def shape_values(self) -> np.ndarray:
        """Tube principal curvature per direction, -<Y', e>/<Y, e>."""
        with np.errstate(divide="ignore", invalid="ignore"):
            return -self.Yp / self.Y

    def shape_value(self) -> float:
        """-<Y', Y> / |Y|^2; the eigenvalue when Y spans one eigen-direction."""
        return float(-np.dot(self.Yp, self.Y) / np.dot(self.Y, self.Y))


def jacobi_integrate(state: JacobiState, r: float) -> JacobiState:
    """Closed-form solution of Y'' + kappa^2 Y = 0 per parallel direction."""
    k = state.kappa
    dt = r - state.r
    c, s = np.cos(k * dt), np.sin(k * dt)
    Y = c * state.Y + s / k * state.Yp
    Yp = -k * s * state.Y + c * state.Yp
    return JacobiState(Y, Yp, k, state.tangent, state.shape, r)


# -- focal distances ------------------------------------------------------------

@dataclass
class FocalReport:
    branches: list
    radii: np.ndarray
    minimum: float
    multiplicity: int
    method: str

    def to_dict(self) -> dict:
        return {
            "minimum": self.minimum,
            "multiplicity": self.multiplicity,
            "method": self.method,
            "branches": [
                {"kappa": b.kappa, "theta": b.theta, "multiplicity": b.multiplicity, "label": b.label, "blowup": float(r)}
                for b, r in zip(self.branches, self.radii)
            ],
        }


def tube_branches(eigenvalues, n: int, k: int) -> list[RiccatiBranch]:
    """Riccati branches along C_xi for a complex k-fold in CP^n with A_xi spectrum ``eigenvalues``."""
    branches = [RiccatiBranch.from_initial(1.0, float(lam), 1, "tangent") for lam in eigenvalues]
    branches.append(RiccatiBranch(2.0, 0.0, 1, "J xi"))
    others = 2 * (n - k) - 2
    if others:
        branches.append(RiccatiBranch(1.0, 0.0, others, "normal"))
    return branches


def _report(branches, radii, method, tol):
    radii = np.asarray(radii, dtype=float)
    m = float(np.min(radii))
    mult = int(sum(b.multiplicity for b, r in zip(branches, radii) if abs(r - m) <= tol.multiplicity))
    return FocalReport(branches, radii, m, mult, method)


def focal_distance_along(
    X: EmbeddedSubmanifold,
    p: ProjectivePoint,
    xi,
    geo: LocalGeometry | None = None,
    method: str = "closed-form",
    tol: Tolerances = DEFAULT,
) -> FocalReport:
    """First focal radius along the normal geodesic C_xi, with its multiplicity."""
    if geo is None:
        geo = local_geometry(X, p)
    eig = geo.principal_curvatures(xi)
    branches = tube_branches(eig, X.n, X.k)
    if method == "closed-form":
        radii = [b.blowup_radius for b in branches]
    elif method == "numeric":
        traj = riccati_integrate_batch(
            [b.kappa for b in branches], [b.theta for b in branches], pi + 1e-3, 0.01, tol=tol
        )
        radii = traj.first_blowup
    else:
        raise ValueError(f"unknown method {method!r}")
    return _report(branches, radii, method, tol)


@dataclass
class FocalEstimate:
    estimate: float
    argmin_point: np.ndarray
    argmin_normal: np.ndarray
    samples: int
    failures: int
    values: np.ndarray = field(repr=False)
    max_curvature: float = 0.0

    @property
    def variance(self) -> float:
        return float(np.var(self.values)) if self.values.size else float("nan")

    def to_dict(self) -> dict:
        return {
            "estimate": self.estimate,
            "samples": self.samples,
            "failures": self.failures,
            "variance": self.variance,
            "min_sampled": float(np.min(self.values)),
            "max_sampled": float(np.max(self.values)),
            "max_principal_curvature": self.max_curvature,
        }


def min_focal_distance_estimate(
    X: EmbeddedSubmanifold,
    num_points: int,
    num_normals: int,
    rng: np.random.Generator,
    tol: Tolerances = DEFAULT,
) -> FocalEstimate:
    """Minimum sampled focal radius; an upper bound for the minimal focal distance."""
    values = []
    best = (inf, None, None)
    failures = 0
    top = 0.0
    for _ in range(num_points):
        try:
            p = X.sample_point(rng, tol)
            geo = local_geometry(X, p)
        except SubmanifoldError:
            failures += 1
            continue
        for _ in range(num_normals):
            xi = random_unit_normal(geo.frame, rng)
            rep = focal_distance_along(X, p, xi, geo=geo, tol=tol)
            eig = geo.principal_curvatures(xi)
            if eig.size:
                top = max(top, float(eig[-1]))
            values.append(rep.minimum)
            if rep.minimum < best[0]:
                best = (rep.minimum, p.rep, xi)
    if not values:
        raise SubmanifoldError(f"all {num_points} sample points failed on {X.name}")
    return FocalEstimate(best[0], best[1], best[2], len(values), failures, np.array(values), top)
