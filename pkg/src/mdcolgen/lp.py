"""In-house linear programming.

:class:`Simplex` is a dense bounded-variable revised primal simplex for

    minimize c @ x  subject to  A @ x = b,  lo <= x <= hi

with an explicit basis inverse (rank-one updates, periodic refactorization),
Dantzig pricing and a two-pass (Harris) ratio test.  Long degenerate streaks
switch to Bland's rule and, if that does not break them, to a small bound
perturbation that is removed again by the dual simplex.  It can be
warm-started from a previous basis or a changed set of bounds, and columns
can be appended between solves.

:class:`RestrictedMaster` wraps it for the set-partitioning master LP

    maximize sum_S c(S) z_S  subject to  sum_{S ∋ v} z_S = 1 (v in V),  z >= 0

whose row duals are the optimal solution of the restricted dual problem.
:func:`solve_lp` is a small ``linprog``-like front end for general LPs.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from .graph import VertexSet

log = logging.getLogger(__name__)

PIVOT_TOL = 1e-9
FEAS_TOL = 1e-8
DRIFT_TOL = 1e-7
DUAL_TOL = 1e-7
PERTURB = 1e-6
# bound slack tolerated by the two-pass ratio tests in exchange for larger pivots
HARRIS_TOL = 1e-9


class LpError(RuntimeError):
    pass


@dataclass
class WarmStart:
    """Basis, nonbasic-at-upper flags and (optionally) the basis inverse."""

    basis: List[int]
    at_upper: Optional[np.ndarray] = None
    binv: Optional[np.ndarray] = None

    def copy(self) -> "WarmStart":
        return WarmStart(list(self.basis),
                         None if self.at_upper is None else self.at_upper.copy(),
                         None if self.binv is None else self.binv.copy())


@dataclass
class SimplexResult:
    status: str  # optimal | infeasible | unbounded | iteration_limit
    x: np.ndarray
    objective: float
    duals: np.ndarray
    reduced_costs: np.ndarray
    basis: List[int]
    iterations: int
    warm: Optional[WarmStart] = None


class Simplex:
    """Bounded-variable revised simplex (see module docstring).

    ``solve`` starts from the previous (or a supplied) basis when it is primal
    feasible, runs the dual simplex first when it is only dual feasible (the
    usual situation after tightening bounds in branch-and-bound), and falls
    back to an artificial phase 1 otherwise.
    """

    def __init__(self, A, b, c, lo=None, hi=None, *, max_iter: int = 100_000,
                 bland_after: int = 50, perturb_after: int = 200,
                 refactor_every: int = 100):
        A = np.asarray(A, dtype=np.float64)
        self.m, n = A.shape
        self._cap = max(n, 16)
        self._A = np.zeros((self.m, self._cap))
        self._A[:, :n] = A
        self._c = np.zeros(self._cap)
        self._c[:n] = c
        self._lo = np.zeros(self._cap)
        self._hi = np.full(self._cap, np.inf)
        self._lo[:n] = 0.0 if lo is None else lo
        self._hi[:n] = np.inf if hi is None else hi
        self.n = n
        self.b = np.asarray(b, dtype=np.float64).copy()
        self.max_iter = max_iter
        self.bland_after = bland_after
        self.perturb_after = perturb_after
        self.refactor_every = refactor_every
        self.basis: Optional[List[int]] = None
        self.warm: Optional[WarmStart] = None
        self.pivots = 0

    @property
    def A(self) -> np.ndarray:
        return self._A[:, :self.n]

    def set_bounds(self, idx, lo, hi) -> None:
        """Change the bounds of columns ``idx``; the basis is kept for a warm start."""
        self._lo[idx] = lo
        self._hi[idx] = hi

    def add_columns(self, A_cols, c_new, lo=None, hi=None) -> None:
        A_cols = np.asarray(A_cols, dtype=np.float64).reshape(self.m, -1)
        k = A_cols.shape[1]
        if self.n + k > self._cap:
            cap = max(2 * self._cap, self.n + k)
            for name, fill in (("_A", 0.0), ("_c", 0.0), ("_lo", 0.0), ("_hi", np.inf)):
                old = getattr(self, name)
                shape = (self.m, cap) if old.ndim == 2 else (cap,)
                new = np.full(shape, fill)
                new[..., :self.n] = old[..., :self.n]
                setattr(self, name, new)
            self._cap = cap
        s = slice(self.n, self.n + k)
        self._A[:, s] = A_cols
        self._c[s] = c_new
        self._lo[s] = 0.0 if lo is None else lo
        self._hi[s] = np.inf if hi is None else hi
        self.n += k

    # -- core -------------------------------------------------------------

    @staticmethod
    def _nonbasic_values(lo, hi, at_upper):
        x = np.where(np.isfinite(lo), lo, np.where(np.isfinite(hi), hi, 0.0))
        return np.where(at_upper & np.isfinite(hi), hi, x)

    def _refactor(self, A, b, basis, is_basic, x):
        Binv = np.linalg.inv(A[:, basis])
        nb = ~is_basic
        x[basis] = Binv @ (b - A[:, nb] @ x[nb])
        return Binv

    def _perturbed_bounds(self, lo, hi, basis, x):
        """Relax the bounds of degenerate basic variables by small distinct amounts."""
        lo_p, hi_p = lo.copy(), hi.copy()
        bi = np.asarray(basis)
        xb = x[bi]
        # deterministic, pairwise distinct shifts in [1, 2) * PERTURB
        shift = PERTURB * (1.0 + np.modf(bi * 0.6180339887498949)[0])
        at_lo = np.isfinite(lo[bi]) & (xb <= lo[bi] + FEAS_TOL)
        at_hi = np.isfinite(hi[bi]) & (xb >= hi[bi] - FEAS_TOL)
        lo_p[bi[at_lo]] -= shift[at_lo]
        hi_p[bi[at_hi]] += shift[at_hi]
        return lo_p, hi_p

    def _iterate(self, A, b, c, lo, hi, basis, x, phase_limit, Binv=None, perturb=True):
        """Primal simplex from a feasible basis; mutates ``basis`` and ``x``.

        A degenerate streak of ``bland_after`` pivots switches to Bland's rule.
        If the streak reaches ``perturb_after`` the bounds of degenerate basic
        variables are relaxed slightly; at the perturbed optimum the true bounds
        are restored, the dual simplex removes the residual infeasibility and a
        final unperturbed primal pass confirms optimality.
        """
        m, n = A.shape
        if Binv is None:
            Binv = np.linalg.inv(A[:, basis])
        lo_w, hi_w = lo, hi
        perturbed = False
        is_basic = np.zeros(n, dtype=bool)
        is_basic[basis] = True
        degenerate = 0
        since_refactor = 0
        it = 0
        while True:
            if it >= phase_limit:
                if perturbed:
                    self._restore(lo, hi, lo_w, hi_w, is_basic, x)
                    Binv = self._refactor(A, b, basis, is_basic, x)
                return "iteration_limit", Binv, it
            if perturb and not perturbed and degenerate >= self.perturb_after:
                lo_w, hi_w = self._perturbed_bounds(lo, hi, basis, x)
                perturbed = True
                degenerate = 0
            y = c[basis] @ Binv
            d = c - y @ A
            d[is_basic] = 0.0
            can_up = x < hi_w - PIVOT_TOL
            can_down = x > lo_w + PIVOT_TOL
            elig = ((d < -PIVOT_TOL) & can_up) | ((d > PIVOT_TOL) & can_down)
            elig &= ~is_basic
            if not elig.any():
                if not perturbed:
                    return "optimal", Binv, it
                self._restore(lo, hi, lo_w, hi_w, is_basic, x)
                Binv = self._refactor(A, b, basis, is_basic, x)
                st, Binv, k = self._dual_iterate(A, b, c, lo, hi, basis, x, Binv,
                                                 phase_limit - it)
                it += k
                if st != "feasible":
                    return st, Binv, it
                st, Binv, k = self._iterate(A, b, c, lo, hi, basis, x, phase_limit - it,
                                            Binv, perturb=False)
                return st, Binv, it + k
            if degenerate >= self.bland_after:
                j = int(np.flatnonzero(elig)[0])
            else:
                j = int(np.argmax(np.where(elig, np.abs(d), -1.0)))
            s = 1.0 if d[j] < 0 else -1.0
            alpha = Binv @ A[:, j]
            xb = x[basis]
            sa = s * alpha
            t_best = hi_w[j] - lo_w[j]
            leave = -1
            with np.errstate(divide="ignore", invalid="ignore"):
                dec = sa > PIVOT_TOL
                inc = sa < -PIVOT_TOL
                slack = np.full(m, np.inf)
                slack[dec] = xb[dec] - lo_w[basis][dec]
                slack[inc] = hi_w[basis][inc] - xb[inc]
                slack = np.maximum(slack, 0.0)
                absa = np.abs(sa)
                # two passes: the largest step allowing a tiny bound slack, then
                # the largest pivot among rows blocking within that step
                theta = ((slack + HARRIS_TOL) / absa).min() if m else np.inf
                ratios = slack / absa
            if m and theta < t_best:
                cand = np.flatnonzero(ratios <= theta)
                if degenerate >= self.bland_after:
                    big = cand[absa[cand] >= 0.1 * absa[cand].max()]
                    leave = int(big[np.argmin(np.asarray(basis)[big])])
                else:
                    leave = int(cand[np.argmax(absa[cand])])
                t_best = float(ratios[leave])
            if not np.isfinite(t_best):
                return "unbounded", Binv, it
            # progress means a visible objective change, not just a nonzero step
            degenerate = degenerate + 1 if t_best * abs(d[j]) <= 1e-9 else 0
            x[basis] = xb - t_best * sa
            x[j] += s * t_best
            it += 1
            if leave < 0:
                continue  # bound flip of the entering variable
            out = basis[leave]
            # snap the leaving variable onto the bound it reached
            x[out] = lo_w[out] if sa[leave] > 0 else hi_w[out]
            basis[leave] = j
            is_basic[out] = False
            is_basic[j] = True
            self.pivots += 1
            since_refactor += 1
            piv = Binv[leave] / alpha[leave]
            Binv -= np.outer(alpha, piv)
            Binv[leave] = piv
            if since_refactor >= self.refactor_every or since_refactor % 20 == 0:
                resid = np.abs(A @ x - b).max() if m else 0.0
                if since_refactor >= self.refactor_every or resid > DRIFT_TOL:
                    Binv = self._refactor(A, b, basis, is_basic, x)
                    since_refactor = 0

    @staticmethod
    def _restore(lo, hi, lo_w, hi_w, is_basic, x):
        """Move nonbasic variables from perturbed bounds back onto the true ones."""
        nb = ~is_basic
        up = nb & np.isfinite(hi) & (np.abs(x - hi_w) < np.abs(x - lo_w))
        down = nb & ~up & np.isfinite(lo)
        x[up] = hi[up]
        x[down] = lo[down]

    def _dual_iterate(self, A, b, c, lo, hi, basis, x, Binv, limit):
        """Dual simplex from a dual feasible basis until ``x`` is within bounds.

        Returns ``(status, Binv, iterations)`` with status ``feasible``,
        ``infeasible`` (the LP has no solution) or ``iteration_limit``.
        """
        m, n = A.shape
        is_basic = np.zeros(n, dtype=bool)
        is_basic[basis] = True
        movable = hi > lo
        since_refactor = 0
        it = 0
        while True:
            xb = x[basis]
            below = lo[basis] - xb
            above = xb - hi[basis]
            infeas = np.maximum(below, above)
            r = int(np.argmax(infeas)) if m else 0
            if not m or infeas[r] <= FEAS_TOL:
                return "feasible", Binv, it
            if it >= limit:
                return "iteration_limit", Binv, it
            d = c - (c[basis] @ Binv) @ A
            arow = Binv[r] @ A
            at_up = x >= hi - PIVOT_TOL
            cand = movable & ~is_basic
            if below[r] > 0:
                cand &= np.where(at_up, arow > PIVOT_TOL, arow < -PIVOT_TOL)
                target = lo[basis[r]]
            else:
                cand &= np.where(at_up, arow < -PIVOT_TOL, arow > PIVOT_TOL)
                target = hi[basis[r]]
            idx = np.flatnonzero(cand)
            if not idx.size:
                return "infeasible", Binv, it
            slack_d = np.where(at_up[idx], np.maximum(-d[idx], 0.0), np.maximum(d[idx], 0.0))
            absr = np.abs(arow[idx])
            theta = ((slack_d + HARRIS_TOL) / absr).min()
            ties = np.flatnonzero(slack_d / absr <= theta)
            j = int(idx[ties[np.argmax(absr[ties])]])
            alpha = Binv @ A[:, j]
            theta = (xb[r] - target) / alpha[r]
            x[basis] = xb - theta * alpha
            x[j] += theta
            out = basis[r]
            x[out] = target
            basis[r] = j
            is_basic[out] = False
            is_basic[j] = True
            it += 1
            self.pivots += 1
            since_refactor += 1
            piv = Binv[r] / alpha[r]
            Binv -= np.outer(alpha, piv)
            Binv[r] = piv
            if since_refactor >= self.refactor_every:
                Binv = self._refactor(A, b, basis, is_basic, x)
                since_refactor = 0

    def _warm_point(self, A, c, lo, hi, warm: WarmStart):
        """``(x, Binv, primal_ok, dual_ok)`` for a warm basis, or None if unusable."""
        m, n = A.shape
        basis = warm.basis
        if len(basis) != m or (m and max(basis) >= n) or len(set(basis)) != m:
            return None
        at_upper = np.zeros(n, dtype=bool)
        if warm.at_upper is not None:
            k = min(n, len(warm.at_upper))
            at_upper[:k] = warm.at_upper[:k]
        Binv = warm.binv
        if Binv is None or Binv.shape != (m, m):
            try:
                Binv = np.linalg.inv(A[:, basis])
            except np.linalg.LinAlgError:
                return None
        else:
            Binv = Binv.copy()
        is_basic = np.zeros(n, dtype=bool)
        is_basic[basis] = True
        x = self._nonbasic_values(lo, hi, at_upper)
        x[basis] = Binv @ (self.b - A[:, ~is_basic] @ x[~is_basic])
        if not np.all(np.isfinite(x)) or np.abs(A @ x - self.b).max(initial=0.0) > DRIFT_TOL:
            return None
        primal_ok = bool(np.all(x >= lo - FEAS_TOL) and np.all(x <= hi + FEAS_TOL))
        d = c - (c[basis] @ Binv) @ A
        nb = ~is_basic & (hi > lo)
        up = nb & (x >= hi - PIVOT_TOL)
        down = nb & (x <= lo + PIVOT_TOL)
        free = nb & ~up & ~down
        dual_ok = bool(np.all(d[down & ~up] >= -DUAL_TOL) and np.all(d[up & ~down] <= DUAL_TOL)
                       and np.all(np.abs(d[free]) <= DUAL_TOL))
        return x, Binv, primal_ok, dual_ok

    def solve(self, basis: Optional[Sequence[int]] = None,
              warm: Optional[WarmStart] = None) -> SimplexResult:
        """Solve from ``warm`` / ``basis`` / the previous basis when usable,
        otherwise from scratch through an artificial phase 1.

        A basis that turns singular mid-solve triggers one cold restart;
        a second failure raises :class:`LpError`.
        """
        try:
            return self._solve(basis, warm)
        except np.linalg.LinAlgError:
            log.warning("singular basis; restarting from phase 1")
        try:
            return self._solve(None, None, cold=True)
        except np.linalg.LinAlgError as exc:
            raise LpError("basis matrix became singular") from exc

    def _solve(self, basis, warm, cold: bool = False) -> SimplexResult:
        n = self.n
        A, c = self._A[:, :n], self._c[:n]
        lo, hi = self._lo[:n], self._hi[:n]
        if warm is None and basis is not None:
            warm = WarmStart(list(basis))
        if warm is None and not cold:
            warm = self.warm
        total = 0
        start = None if warm is None else self._warm_point(A, c, lo, hi, warm)
        Binv = None
        if start is not None:
            x, Binv, primal_ok, dual_ok = start
            basis_ = list(warm.basis)
            if not primal_ok and dual_ok:
                st, Binv, total = self._dual_iterate(A, self.b, c, lo, hi, basis_, x, Binv,
                                                     self.max_iter)
                if st == "infeasible":
                    return self._result("infeasible", x, basis_, total)
                primal_ok = st == "feasible"
            if not primal_ok:
                start = None
        if start is None:
            res = self._phase1(A, lo, hi)
            if isinstance(res, str):
                return self._result(res, np.zeros(n), [], 0)
            basis_, x, total, A, c, lo, hi = res
            Binv = None
        status, Binv, it = self._iterate(A, self.b, c, lo, hi, basis_, x,
                                         self.max_iter - total, Binv)
        total += it
        y = c[basis_] @ Binv
        dcost = c - y @ A
        self.basis = list(basis_)
        warm_out = None
        if max(basis_, default=-1) < n:
            is_basic = np.zeros(n, dtype=bool)
            is_basic[basis_] = True
            at_upper = ~is_basic & (x[:n] >= hi[:n] - PIVOT_TOL) & (hi[:n] > lo[:n])
            warm_out = WarmStart(list(basis_), at_upper, Binv)
        self.warm = warm_out
        return SimplexResult(status, x[:n].copy(), float(c[:n] @ x[:n]),
                             y, dcost[:n], list(basis_), total, warm_out)

    def _phase1(self, A, lo, hi):
        m, n = A.shape
        x0 = self._nonbasic_values(lo, hi, np.zeros(n, dtype=bool))
        r = self.b - A @ x0
        sign = np.where(r >= 0, 1.0, -1.0)
        A1 = np.hstack([A, np.diag(sign)])
        c1 = np.concatenate([np.zeros(n), np.ones(m)])
        lo1 = np.concatenate([lo, np.zeros(m)])
        hi1 = np.concatenate([hi, np.full(m, np.inf)])
        x = np.concatenate([x0, np.abs(r)])
        basis = list(range(n, n + m))
        status, _, it = self._iterate(A1, self.b, c1, lo1, hi1, basis, x, self.max_iter)
        if status == "iteration_limit":
            log.warning("phase 1 hit the iteration limit")
            return status
        if x[n:].sum() > FEAS_TOL * max(1, m):
            return "infeasible"
        # artificials may stay basic at zero but can never re-enter
        hi1[n:] = 0.0
        x[n:] = 0.0
        c2 = np.concatenate([self._c[:n], np.zeros(m)])
        return basis, x, it, A1, c2, lo1, hi1

    def _result(self, status, x, basis, it):
        return SimplexResult(status, x[:self.n].copy(), float("nan"), np.zeros(self.m),
                             np.zeros(self.n), list(basis), it)


# -- restricted master ---------------------------------------------------------


@dataclass(frozen=True)
class Column:
    members: VertexSet
    contribution: float


@dataclass
class LpSolution:
    objective: float
    primal: np.ndarray
    duals: np.ndarray
    basis: List[int]
    status: str  # optimal | iteration-limit
    iterations: int = 0


class RestrictedMaster:
    """Set-partitioning master LP over a growing column family.

    The first solve starts from the singleton basis (always feasible with
    ``z = 1`` on singletons); later solves warm-start from the previous basis.
    """

    def __init__(self, n: int, columns: Sequence[Column], max_iter: int = 100_000):
        self.n = n
        self.columns: List[Column] = []
        self._index = {}
        singles = {}
        for col in columns:
            if len(col.members) == 1:
                singles[col.members[0]] = col
        missing = [v for v in range(n) if v not in singles]
        if missing:
            raise ValueError(f"restricted master needs all singleton columns; missing {missing[:5]}")
        self._lp = Simplex(np.zeros((n, 0)), np.ones(n), np.zeros(0), max_iter=max_iter)
        self.add_columns(columns)
        self._lp.warm = WarmStart([self._index[(v,)] for v in range(n)])

    def __len__(self) -> int:
        return len(self.columns)

    def __contains__(self, members: VertexSet) -> bool:
        return members in self._index

    def add_columns(self, columns: Sequence[Column]) -> int:
        """Append new columns; duplicates of known columns are ignored.  Returns count added."""
        fresh = []
        for col in columns:
            if col.members in self._index or not col.members:
                continue
            self._index[col.members] = len(self.columns)
            self.columns.append(col)
            fresh.append(col)
        if fresh:
            block = np.zeros((self.n, len(fresh)))
            for j, col in enumerate(fresh):
                block[list(col.members), j] = 1.0
            self._lp.add_columns(block, [-col.contribution for col in fresh])
        return len(fresh)

    def solve(self) -> LpSolution:
        res = self._lp.solve()
        if res.status not in ("optimal", "iteration_limit"):
            raise LpError(f"restricted master returned status {res.status}")
        lam = -res.duals
        sol = LpSolution(-res.objective, np.maximum(res.x, 0.0), lam, res.basis,
                         "optimal" if res.status == "optimal" else "iteration-limit",
                         res.iterations)
        if sol.status == "optimal":
            self._verify(sol)
        return sol

    def _verify(self, sol: LpSolution) -> None:
        A = self._lp.A
        rows = A @ sol.primal
        if np.abs(rows - 1.0).max(initial=0.0) > FEAS_TOL:
            raise LpError("master solution violates the partition rows")
        gap = abs(sol.objective - sol.duals.sum())
        if gap > FEAS_TOL * max(1.0, abs(sol.objective)):
            raise LpError(f"duality gap {gap:.3e} in restricted master")
        contrib = np.array([c.contribution for c in self.columns])
        slack = sol.duals @ A - contrib
        if slack.min(initial=0.0) < -FEAS_TOL:
            raise LpError(f"dual infeasible by {-slack.min():.3e}")
        if np.abs(slack * sol.primal).max(initial=0.0) > FEAS_TOL:
            raise LpError("complementary slackness violated")


def solve_restricted_master(n: int, columns: Sequence[Column]) -> LpSolution:
    """One-shot solve of the restricted master over ``columns``."""
    return RestrictedMaster(n, columns).solve()


# -- generic front end -----------------------------------------------------------


def solve_lp(c, A_ub=None, b_ub=None, A_eq=None, b_eq=None, lo=None, hi=None,
             max_iter: int = 100_000) -> SimplexResult:
    """Minimize ``c @ x`` with ``A_ub x <= b_ub``, ``A_eq x = b_eq``, ``lo <= x <= hi``.

    Inequalities get slack columns; the returned ``x`` and ``reduced_costs``
    cover only the original variables and ``duals`` has one entry per row
    (inequality rows first).
    """
    c = np.asarray(c, dtype=np.float64)
    nvar = c.size
    blocks, rhs = [], []
    n_ub = 0
    if A_ub is not None and len(b_ub):
        A_ub = np.asarray(A_ub, dtype=np.float64).reshape(-1, nvar)
        n_ub = A_ub.shape[0]
        blocks.append(np.hstack([A_ub, np.eye(n_ub)]))
        rhs.append(np.asarray(b_ub, dtype=np.float64))
    if A_eq is not None and len(b_eq):
        A_eq = np.asarray(A_eq, dtype=np.float64).reshape(-1, nvar)
        blocks.append(np.hstack([A_eq, np.zeros((A_eq.shape[0], n_ub))]))
        rhs.append(np.asarray(b_eq, dtype=np.float64))
    if not blocks:
        blocks, rhs = [np.zeros((0, nvar))], [np.zeros(0)]
    A = np.vstack(blocks)
    b = np.concatenate(rhs)
    lo_all = np.concatenate([np.zeros(nvar) if lo is None else np.asarray(lo, float), np.zeros(n_ub)])
    hi_all = np.concatenate([np.full(nvar, np.inf) if hi is None else np.asarray(hi, float),
                             np.full(n_ub, np.inf)])
    lp = Simplex(A, b, np.concatenate([c, np.zeros(n_ub)]), lo_all, hi_all, max_iter=max_iter)
    res = lp.solve()
    res.x = res.x[:nvar]
    res.reduced_costs = res.reduced_costs[:nvar]
    res.objective = float(c @ res.x) if res.status == "optimal" else res.objective
    return res
