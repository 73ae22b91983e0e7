"""LARS-LASSO solution path, exact single-lambda solutions and their diagnostics.

The solver minimizes the half-quadratic cost

    (1/2) ||y - X b||^2 + lam * ||b||_1

so that on the open interval between two knots the solution is

    beta_A = (X_A' X_A)^{-1} (X_A' y - lam * s_A)

with ``A`` the active set and ``s_A`` its sign vector.  A user working with
the un-halved cost ``||y - X b||^2 + lam' ||b||_1`` should pass
``lam = lam' / 2`` (see :func:`from_full_quadratic`).
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

import numpy as np

from . import _cholesky as chol
from .design import DesignMatrix, as_array
from .exceptions import (
    AtTransitionPoint,
    EmptyActiveSet,
    InputError,
    MaxStepsExceeded,
    RankDeficient,
)

#: relative distance (to lambda_max) within which lambda counts as a knot
TRANSITION_TOL = 1e-12
#: relative pivot below which an entering column is treated as collinear
COLLINEAR_TOL = 1e-12


def from_full_quadratic(lam):
    """Convert a penalty for ``||y - Xb||^2 + lam ||b||_1`` to the internal one."""
    return np.asarray(lam, dtype=float) / 2.0


def to_full_quadratic(lam):
    return np.asarray(lam, dtype=float) * 2.0


@dataclass(frozen=True, eq=False)
class LassoFit:
    """LASSO solution at a single ``lam``.

    ``signs`` is 0 for an unpenalized coordinate (an unpenalized intercept),
    so ``signs @ beta_active`` is the penalized l1 norm in every case.
    """

    lam: float
    active: np.ndarray
    signs: np.ndarray
    beta_active: np.ndarray
    beta: np.ndarray
    mu: np.ndarray
    at_transition: bool = False

    @property
    def k_active(self) -> int:
        return int(self.active.size)

    @property
    def l1_norm(self) -> float:
        return float(self.signs @ self.beta_active)

    @property
    def n(self) -> int:
        return self.mu.size


@dataclass(frozen=True, eq=False)
class Segment:
    """Open interval ``(lam_lo, lam_hi)`` with a fixed active set.

    The coefficients are affine there: ``beta(lam) = beta_hi + (lam_hi - lam) * slope``.
    """

    lam_hi: float
    lam_lo: float
    active: tuple
    signs: np.ndarray
    beta_hi: np.ndarray
    slope: np.ndarray

    def coef(self, lam):
        return self.beta_hi + (self.lam_hi - lam) * self.slope

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.lam_hi + self.lam_lo)


@dataclass(frozen=True)
class PathEvent:
    lam: float
    index: int
    kind: str  # "add" or "drop"


@dataclass(frozen=True, eq=False)
class LassoPath:
    """Piecewise-affine LASSO path ``lambdas[0] > ... > lambdas[-1]``.

    ``coefs[:, j]`` is the solution at knot ``lambdas[j]`` and
    ``segments[j]`` spans ``(lambdas[j+1], lambdas[j])``.  A complete path ends
    at 0; one stopped by ``max_steps`` has ``complete=False``.
    """

    lambdas: np.ndarray
    coefs: np.ndarray
    segments: tuple
    events: tuple
    design_ref: str
    complete: bool = True
    unpenalized: tuple = ()
    ignored: tuple = field(default=())

    @property
    def lambda_max(self) -> float:
        return float(self.lambdas[0])

    @property
    def n_features(self) -> int:
        return self.coefs.shape[0]

    def midpoints(self) -> np.ndarray:
        return np.array([s.midpoint for s in self.segments])

    def locate(self, lam):
        """Index of the segment containing ``lam``; -1 above ``lambda_max``.

        Raises :class:`AtTransitionPoint` within the knot tolerance.
        """
        lam = float(lam)
        tol = TRANSITION_TOL * self.lambda_max
        knots = self.lambdas
        if self.complete and lam == 0.0 and self.segments:
            return len(self.segments) - 1
        near = np.abs(knots - lam) <= tol
        if np.any(near):
            raise AtTransitionPoint(f"lambda={lam!r} is a transition point of the path")
        if lam > knots[0]:
            return -1
        if lam < knots[-1]:
            raise InputError(f"lambda={lam!r} lies beyond the truncated path (ends at {knots[-1]!r})")
        # knots are strictly decreasing
        return int(np.searchsorted(-knots, -lam) - 1)

    def coef_at(self, lam) -> np.ndarray:
        """Coefficients at ``lam`` by affine interpolation along the path."""
        s = self.locate(lam)
        if s < 0:
            return self.coefs[:, 0].copy()
        return self.segments[s].coef(float(lam))


def _check_xy(X, y):
    Xv = as_array(X)
    y = np.asarray(y, dtype=float)
    if y.ndim != 1 or y.shape[0] != Xv.shape[0]:
        raise InputError(f"y has shape {y.shape}, expected ({Xv.shape[0]},)")
    return Xv, y


def _fingerprint(X):
    if isinstance(X, DesignMatrix):
        return X.fingerprint
    return DesignMatrix(np.asarray(X, dtype=float)).fingerprint


def _gram(X):
    return X.gram if isinstance(X, DesignMatrix) else as_array(X).T @ as_array(X)


def _unpenalized(X, penalize_intercept):
    if not penalize_intercept and isinstance(X, DesignMatrix) and X.has_intercept:
        return (0,)
    return ()


def lars_lasso_path(
    X,
    y,
    *,
    penalize_intercept: bool = True,
    max_steps: int | None = None,
    lam_min: float = 0.0,
    on_collinear: str = "raise",
) -> LassoPath:
    """Trace the LASSO path with the LARS-LASSO homotopy.

    Parameters
    ----------
    X : DesignMatrix or array_like, shape (n, m)
    y : array_like, shape (n,)
    penalize_intercept : bool
        With ``False`` the intercept column of a :class:`DesignMatrix` stays
        active along the whole path with sign 0.
    max_steps : int, optional
        Stop after this many segments; the returned path has
        ``complete=False``.
    lam_min : float
        Stop at the first knot below this value (the segment containing
        ``lam_min`` is kept); the path then has ``complete=False``.
    on_collinear : {"raise", "drop"}
        What to do when an entering column is numerically in the span of the
        active ones.  ``"drop"`` excludes that column for the rest of the path.

    Raises
    ------
    RankDeficient
    MaxStepsExceeded
        More than ``3 m`` add/drop events without reaching lambda = 0.
    """
    if on_collinear not in ("raise", "drop"):
        raise InputError("on_collinear must be 'raise' or 'drop'")
    if not lam_min >= 0:
        raise InputError("lam_min must be nonnegative")
    Xv, y = _check_xy(X, y)
    n, m = Xv.shape
    G = np.asarray(_gram(X))
    c0 = Xv.T @ y
    unpen = _unpenalized(X, penalize_intercept)

    beta = np.zeros(m)
    signs = np.zeros(m)
    active: list[int] = []
    R = np.zeros((0, 0))
    for j in unpen:
        R, rel = chol.insert(R, G[active, j], G[j, j])
        if R is None or rel < COLLINEAR_TOL:
            raise RankDeficient(f"unpenalized column {j} is degenerate")
        active.append(j)
    if active:
        beta[active] = chol.solve(R, c0[active])

    ignored: set[int] = set()
    penalized = np.ones(m, dtype=bool)
    penalized[list(unpen)] = False

    corr = c0 - G @ beta
    cand = np.abs(np.where(penalized, corr, 0.0))
    lam = float(cand.max()) if m > len(unpen) else 0.0
    lam0 = lam
    zero_step = 1e-14 * max(lam0, np.finfo(float).tiny)

    knots = [lam]
    coefs = [beta.copy()]
    segments: list[Segment] = []
    events: list[PathEvent] = []
    complete = True
    just_dropped = None
    n_events = 0
    cap = 3 * m

    if lam > 0.0:
        # first entry: largest |correlation|, lowest index on ties
        order = np.flatnonzero(cand == lam)
        j = int(order[0])
        R_new, rel = chol.insert(R, G[active, j], G[j, j])
        R = R_new
        active.append(j)
        signs[j] = np.sign(corr[j])
        events.append(PathEvent(lam, j, "add"))
        n_events += 1

    while lam > 0.0:
        idx = np.array(active, dtype=int)
        dA = chol.solve(R, signs[idx])
        slope = np.zeros(m)
        slope[idx] = dA
        a = G[:, idx] @ dA
        corr = c0 - G @ beta

        mask = penalized.copy()
        mask[idx] = False
        for j in ignored:
            mask[j] = False

        best_join, join_sign, d_join = -1, 0.0, np.inf
        cand_j = np.flatnonzero(mask)
        if cand_j.size:
            cj, aj = corr[cand_j], a[cand_j]
            steps = np.full((2, cand_j.size), np.inf)
            for row, (num, den) in enumerate(((lam - cj, 1.0 - aj), (lam + cj, 1.0 + aj))):
                ok = den > 1e-12
                steps[row, ok] = np.maximum(num[ok], 0.0) / den[ok]
            if just_dropped is not None and mask[just_dropped]:
                # its correlation still sits on the bound it left from; only a later crossing counts
                col = np.searchsorted(cand_j, just_dropped)
                steps[:, col][steps[:, col] <= 1e-9 * lam] = np.inf
            per_j = steps.min(axis=0)
            d_join = float(per_j.min())
            if np.isfinite(d_join):
                ties = np.flatnonzero(per_j <= d_join * (1 + 1e-12) + zero_step)
                pick = ties[0]  # cand_j is sorted, so this is the lowest index
                best_join = int(cand_j[pick])
                join_sign = 1.0 if steps[0, pick] <= steps[1, pick] else -1.0

        best_drop, d_drop = -1, np.inf
        pen_active = [j for j in active if penalized[j]]
        if pen_active:
            pa = np.array(pen_active)
            with np.errstate(divide="ignore", invalid="ignore"):
                dd = -beta[pa] / slope[pa]
            dd[~np.isfinite(dd) | (dd <= zero_step)] = np.inf
            if dd.size and np.isfinite(dd.min()):
                d_drop = float(dd.min())
                best_drop = int(pa[np.argmin(dd)])

        delta = min(lam, d_join, d_drop)
        if delta == d_join and best_join >= 0 and d_join < d_drop:
            # check collinearity before moving so a rejected column leaves no knot
            R_new, rel = chol.insert(R, G[idx, best_join], G[best_join, best_join])
            if R_new is None or rel < COLLINEAR_TOL:
                if on_collinear == "raise":
                    raise RankDeficient(f"column {best_join} is collinear with the active set")
                ignored.add(best_join)
                continue
            kind = "add"
        elif delta == d_drop and best_drop >= 0:
            kind = "drop"
        else:
            kind = "end"

        lam_new = lam - delta
        if kind == "end" or lam_new <= zero_step:
            lam_new = 0.0
            delta = lam
        beta_hi = beta.copy()
        beta = beta + delta * slope
        if delta > zero_step:
            segments.append(Segment(lam, lam_new, tuple(sorted(active)), signs.copy(), beta_hi, slope))
            knots.append(lam_new)
            coefs.append(beta.copy())
        else:
            coefs[-1] = beta.copy()
        lam = lam_new

        if kind == "add":
            R = R_new
            active.append(best_join)
            signs[best_join] = join_sign
            just_dropped = None
        elif kind == "drop":
            pos = active.index(best_drop)
            R = chol.delete(R, pos)
            active.pop(pos)
            beta[best_drop] = 0.0
            coefs[-1][best_drop] = 0.0
            signs[best_drop] = 0.0
            just_dropped = best_drop
        if kind != "end":
            events.append(PathEvent(lam, best_join if kind == "add" else best_drop, kind))
            n_events += 1
            G_AA = G[np.ix_(active, active)]
            if chol.needs_refactor(R, G_AA):
                R = chol.refactor(G_AA)

        if lam > 0.0 and (lam < lam_min or (max_steps is not None and len(segments) >= max_steps)):
            complete = False
            break
        if n_events > cap and lam > 0.0:
            raise MaxStepsExceeded(f"LARS-LASSO exceeded {cap} steps")

    return LassoPath(
        lambdas=np.array(knots),
        coefs=np.column_stack(coefs),
        segments=tuple(segments),
        events=tuple(events),
        design_ref=_fingerprint(X),
        complete=complete,
        unpenalized=unpen,
        ignored=tuple(sorted(ignored)),
    )


def _fit_on_active(Xv, y, G, lam, active, signs_full):
    m = Xv.shape[1]
    active = np.asarray(sorted(active), dtype=int)
    beta = np.zeros(m)
    if active.size:
        s = signs_full[active]
        G_AA = G[np.ix_(active, active)]
        b = np.linalg.solve(G_AA, Xv[:, active].T @ y - lam * s)
        beta[active] = b
    else:
        s = np.zeros(0)
        b = np.zeros(0)
    return LassoFit(
        lam=float(lam),
        active=active,
        signs=np.asarray(s, dtype=float),
        beta_active=b,
        beta=beta,
        mu=Xv[:, active] @ b if active.size else np.zeros(Xv.shape[0]),
    )


def solve_at(path: LassoPath, X, y, lam) -> LassoFit:
    """Exact LASSO solution at ``lam`` from the active set recorded in ``path``.

    Coefficients are recomputed from the closed form on the segment's active
    set rather than interpolated, so they carry no accumulated path error.
    ``lam = 0`` is accepted on a complete path and gives the least-squares fit
    on the final active set.

    Raises
    ------
    AtTransitionPoint
        ``lam`` is within ``1e-12 * lambda_max`` of a knot.
    """
    Xv, y = _check_xy(X, y)
    if _fingerprint(X) != path.design_ref:
        raise InputError("path was computed on a different design")
    lam = float(lam)
    if lam < 0 or not np.isfinite(lam):
        raise InputError("lambda must be a finite nonnegative number")
    s = path.locate(lam)
    G = np.asarray(_gram(X))
    if s < 0:
        signs = np.zeros(Xv.shape[1])
        return _fit_on_active(Xv, y, G, lam, path.unpenalized, signs)
    seg = path.segments[s]
    return _fit_on_active(Xv, y, G, lam, seg.active, seg.signs)


def solve_at_knot(path: LassoPath, X, y, index: int) -> LassoFit:
    """Solution at knot ``path.lambdas[index]`` for ``index >= 1``.

    The active set is the set of nonzero coefficients at the knot, i.e. the
    preceding segment's active set minus a coordinate that is leaving.  The
    closed form holds there by continuity.  The fit is flagged
    ``at_transition`` except at ``lam = 0`` on a complete path.
    """
    Xv, y = _check_xy(X, y)
    if _fingerprint(X) != path.design_ref:
        raise InputError("path was computed on a different design")
    if not 1 <= index <= len(path.segments):
        raise InputError(f"knot index must be in 1..{len(path.segments)}")
    seg = path.segments[index - 1]
    at_knot = path.coefs[:, index]
    keep = [j for j in seg.active if at_knot[j] != 0.0 or j in path.unpenalized]
    fit = _fit_on_active(Xv, y, np.asarray(_gram(X)), float(path.lambdas[index]), keep, seg.signs)
    if fit.lam == 0.0 and path.complete:
        return fit
    return dataclasses.replace(fit, at_transition=True)


def fit_from_coefficients(X, y, beta, lam, *, unpenalized=(), zero_tol=0.0) -> LassoFit:
    """Wrap an arbitrary coefficient vector as a :class:`LassoFit`.

    Coordinates with ``|beta_j| <= zero_tol`` are treated as inactive.
    ``at_transition`` is set when an inactive coordinate sits on the
    subgradient boundary, where the active set is ambiguous.
    """
    Xv, y = _check_xy(X, y)
    beta = np.array(beta, dtype=float)
    beta[np.abs(beta) <= zero_tol] = 0.0
    active = np.flatnonzero(beta != 0.0)
    active = np.union1d(active, np.asarray(unpenalized, dtype=int)).astype(int)
    signs = np.sign(beta[active])
    for j in unpenalized:
        signs[np.searchsorted(active, j)] = 0.0
    mu = Xv @ beta
    corr = Xv.T @ (y - mu)
    inactive = np.setdiff1d(np.arange(Xv.shape[1]), active)
    edge = bool(lam > 0 and inactive.size and np.any(np.abs(np.abs(corr[inactive]) - lam) <= 1e-9 * lam))
    return LassoFit(
        lam=float(lam),
        active=active,
        signs=signs,
        beta_active=beta[active],
        beta=beta,
        mu=mu,
        at_transition=edge,
    )


@dataclass(frozen=True)
class KKTReport:
    max_active_residual: float
    max_inactive_excess: float
    tol: float

    @property
    def ok(self) -> bool:
        return self.max_active_residual <= self.tol and self.max_inactive_excess <= self.tol

    @property
    def violation(self) -> float:
        return max(self.max_active_residual, self.max_inactive_excess)


def kkt_check(fit: LassoFit, X, y, tol: float = 1e-8) -> KKTReport:
    """Stationarity and subgradient conditions of the half-quadratic LASSO.

    Active coordinates need ``x_j'(y - mu) = lam * s_j``; inactive ones need
    ``|x_j'(y - mu)| <= lam``.  The residuals are computed from ``fit.beta``
    (not ``fit.mu``) so a perturbed coefficient is always detected.
    """
    Xv, y = _check_xy(X, y)
    corr = Xv.T @ (y - Xv @ fit.beta)
    act = fit.active
    active_res = np.abs(corr[act] - fit.lam * fit.signs) if act.size else np.zeros(0)
    inactive = np.setdiff1d(np.arange(Xv.shape[1]), act)
    excess = np.maximum(np.abs(corr[inactive]) - fit.lam, 0.0) if inactive.size else np.zeros(0)
    return KKTReport(
        max_active_residual=float(active_res.max(initial=0.0)),
        max_inactive_excess=float(excess.max(initial=0.0)),
        tol=float(tol),
    )


@dataclass(frozen=True, eq=False)
class HatQuantities:
    """Projection onto the active columns and the associated vectors.

    ``q = X_A (X_A'X_A)^{-1} s``, ``mu_post = H y`` and ``beta_post`` the
    least-squares refit on the active set.
    """

    q: np.ndarray
    mu_post: np.ndarray
    beta_post: np.ndarray
    columns: np.ndarray = field(repr=False)
    factor: np.ndarray = field(repr=False)

    def project(self, v):
        """Apply the hat matrix ``X_A (X_A'X_A)^{-1} X_A'`` to ``v``."""
        v = np.asarray(v, dtype=float)
        return self.columns @ chol.solve(self.factor, self.columns.T @ v)


def hat_quantities(fit: LassoFit, X, y) -> HatQuantities:
    Xv, y = _check_xy(X, y)
    if fit.k_active == 0:
        raise EmptyActiveSet("hat quantities need a non-empty active set")
    XA = Xv[:, fit.active]
    R = chol.refactor(XA.T @ XA)
    beta_post = chol.solve(R, XA.T @ y)
    return HatQuantities(
        q=XA @ chol.solve(R, fit.signs),
        mu_post=XA @ beta_post,
        beta_post=beta_post,
        columns=XA,
        factor=R,
    )
