"""Convex constellation-shaping solver.

Minimizes the 6-norm of the transmitted block over the offset data vector,
subject to a linear correlation constraint, a second-order-cone EVM
constraint, and a quadratic emission-energy constraint. Solved by a
self-contained log-barrier interior-point method over the real/imaginary
coordinates; the smooth surrogate sum |x_n|^6 shares its minimizer with the
6-norm objective.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class ShapingProblem:
    """One block instance: transmit map restricted to data columns, original
    QAM vector, emission quadratic form, and the EVM budget (linear ratio)."""

    Phi_bar: np.ndarray
    d_bar: np.ndarray
    E_bar: np.ndarray
    evm_max: float

    def __post_init__(self):
        if self.evm_max <= 0:
            raise ValueError("evm_max must be positive")
        if np.linalg.norm(self.Phi_bar @ self.d_bar) == 0:
            raise ValueError("reference signal has zero energy")

    @property
    def D(self) -> int:
        return self.d_bar.size


@dataclass
class SolverOptions:
    tol: float = 1e-7
    max_outer: int = 60
    max_inner: int = 50
    mu: float = 10.0
    t0: float | None = None


@dataclass
class ShapingSolution:
    c_bar_opt: np.ndarray
    objective: float
    residuals: dict
    iterations: int
    converged: bool
    objective_trace: list


def evm_db_to_linear(evm_db: float) -> float:
    """EVM budget from dB to amplitude ratio (EVM is defined on amplitudes)."""
    return 10.0 ** (evm_db / 20.0)


def constraint_rhs(problem: ShapingProblem) -> tuple[float, float, float]:
    """Right-hand sides of the three constraints: linear correlation floor,
    EVM cone radius, and emission-energy cap."""
    xref = problem.Phi_bar @ problem.d_bar
    ref2 = float(np.vdot(xref, xref).real)
    rho_lin = ref2 * (1.0 - problem.evm_max ** 2 / 2.0)
    rho_evm = problem.evm_max * np.sqrt(ref2)
    rho_osb = float((problem.d_bar.conj() @ problem.E_bar @ problem.d_bar).real)
    return rho_lin, rho_evm, rho_osb


def _real_embed(A: np.ndarray) -> np.ndarray:
    """[[Re, -Im], [Im, Re]] embedding so that A c maps to the stacked
    real/imag coordinates."""
    return np.block([[A.real, -A.imag], [A.imag, A.real]])


def _split(z: np.ndarray) -> np.ndarray:
    D = z.size // 2
    return z[:D] + 1j * z[D:]


def _stack(c: np.ndarray) -> np.ndarray:
    return np.concatenate([c.real, c.imag])


def sixth_power_objective(z: np.ndarray, Phi_r: np.ndarray,
                          with_hessian: bool = True):
    """Value, gradient, and (optionally) Hessian of sum_n |x_n|^6 with
    x = Phi_bar c, in the stacked real coordinates of c."""
    n2 = Phi_r.shape[0] // 2
    xr = Phi_r @ z
    a, b = xr[:n2], xr[n2:]
    r = a * a + b * b
    val = float((r ** 3).sum())
    g_ab = np.concatenate([6.0 * r * r * a, 6.0 * r * r * b])
    grad = Phi_r.T @ g_ab
    if not with_hessian:
        return val, grad, None
    Pa, Pb = Phi_r[:n2], Phi_r[n2:]
    r2 = 6.0 * r * r
    W = a[:, None] * Pa + b[:, None] * Pb
    H = (Pa * r2[:, None]).T @ Pa + (Pb * r2[:, None]).T @ Pb \
        + (W * (24.0 * r)[:, None]).T @ W
    return val, grad, H


def objective_6norm(c_bar: np.ndarray, Phi_bar: np.ndarray) -> float:
    x = Phi_bar @ np.asarray(c_bar, dtype=complex)
    return float(np.linalg.norm(x, ord=6))


def feasible_start(problem: ShapingProblem) -> np.ndarray:
    """Strictly feasible interior point (1 - delta) * d_bar."""
    delta = 0.5 * min(problem.evm_max, problem.evm_max ** 2 / 2.0)
    return (1.0 - delta) * problem.d_bar


def check_feasible(c_bar: np.ndarray, problem: ShapingProblem,
                   tol: float = 1e-6) -> dict:
    """Constraint slacks of a candidate point, relative feasibility verdict,
    and the unenforced transmit-energy diagnostic."""
    c_bar = np.asarray(c_bar, dtype=complex)
    rho_lin, rho_evm, rho_osb = constraint_rhs(problem)
    xref = problem.Phi_bar @ problem.d_bar
    ref2 = float(np.vdot(xref, xref).real)
    x = problem.Phi_bar @ c_bar
    corr = float(np.vdot(c_bar, problem.Phi_bar.conj().T @ problem.Phi_bar
                         @ problem.d_bar).real)
    dev = float(np.linalg.norm(x - xref))
    osb = float((c_bar.conj() @ problem.E_bar @ c_bar).real)
    slack_lin = corr - rho_lin
    slack_evm = rho_evm - dev
    slack_osb = rho_osb - osb
    feasible = (slack_lin >= -tol * ref2
                and slack_evm >= -tol * max(rho_evm, np.sqrt(ref2))
                and slack_osb >= -tol * max(rho_osb, 1e-300))
    return {
        "slack_lin": slack_lin,
        "slack_evm": slack_evm,
        "slack_osb": slack_osb,
        "evm": dev / np.sqrt(ref2),
        "osbee": osb,
        "osbee_ref": rho_osb,
        "feasible": bool(feasible),
        "energy_nondecreasing": bool(np.vdot(x, x).real >= ref2),
    }


def solve_offset(problem: ShapingProblem, opts: SolverOptions | None = None) -> ShapingSolution:
    """Log-barrier interior-point solve of the shaping problem.

    Returns a strictly feasible point whose surrogate objective is within
    (#constraints)/t_final of the optimum; never returns an infeasible point.
    """
    opts = opts or SolverOptions()
    Phi_r = _real_embed(problem.Phi_bar)
    Er = _real_embed(problem.E_bar)
    Er = 0.5 * (Er + Er.T)
    Qr = Phi_r.T @ Phi_r
    zd = _stack(problem.d_bar)
    a_lin = _stack(problem.Phi_bar.conj().T @ problem.Phi_bar @ problem.d_bar)
    ref2 = float(a_lin @ zd)
    rho_evm2 = problem.evm_max ** 2 * ref2
    ed = Er @ zd

    # The optimization variable is the offset w = z - zd and the slacks are
    # expressed directly in w, so the tiny margins of a near-zero EVM budget
    # survive floating-point cancellation (and sub-epsilon starting offsets
    # remain representable).
    def slacks(w):
        return np.array([
            a_lin @ w + ref2 * problem.evm_max ** 2 / 2.0,
            rho_evm2 - w @ (Qr @ w),
            -(2.0 * (ed @ w) + w @ (Er @ w)),
        ])

    delta = 0.5 * min(problem.evm_max, problem.evm_max ** 2 / 2.0)
    w = -delta * zd
    s = slacks(w)
    if np.any(s <= 0):
        raise RuntimeError("feasible start violated; problem data inconsistent")

    f0_ref = sixth_power_objective(zd, Phi_r, with_hessian=False)[0]
    scale = max(f0_ref, 1e-300)
    m = 3.0
    t = opts.t0 if opts.t0 is not None else m / scale
    dim = w.size
    eye = np.eye(dim)

    trace = []
    n_newton = 0
    converged = False
    for _ in range(opts.max_outer):
        for _ in range(opts.max_inner):
            f0, g0, H0 = sixth_power_objective(zd + w, Phi_r)
            g2 = -2.0 * (Qr @ w)
            g3 = -2.0 * (ed + Er @ w)
            s = slacks(w)
            grad = t * g0 - a_lin / s[0] - g2 / s[1] - g3 / s[2]
            H = (t * H0
                 + np.outer(a_lin, a_lin) / s[0] ** 2
                 + 2.0 * Qr / s[1] + np.outer(g2, g2) / s[1] ** 2
                 + 2.0 * Er / s[2] + np.outer(g3, g3) / s[2] ** 2)
            try:
                L = np.linalg.cholesky(H)
            except np.linalg.LinAlgError:
                L = np.linalg.cholesky(H + 1e-12 * np.trace(H) / dim * eye)
            step = -np.linalg.solve(L.T, np.linalg.solve(L, grad))
            lam2 = float(-grad @ step)
            n_newton += 1
            if lam2 / 2.0 <= 1e-10 * max(1.0, t * scale):
                break
            phi0 = t * f0 - np.log(s).sum()
            alpha = 1.0
            slope = float(grad @ step)
            for _ in range(60):
                wn = w + alpha * step
                sn = slacks(wn)
                if np.all(sn > 0):
                    fn = sixth_power_objective(zd + wn, Phi_r, with_hessian=False)[0]
                    if t * fn - np.log(sn).sum() <= phi0 + 0.25 * alpha * slope:
                        break
                alpha *= 0.5
            else:
                break  # no acceptable step; stage is converged to precision
            w = w + alpha * step
        trace.append(objective_6norm(_split(zd + w), problem.Phi_bar))
        if m / t <= opts.tol * scale:
            converged = True
            break
        t *= opts.mu

    c_opt = problem.d_bar + _split(w)
    report = check_feasible(c_opt, problem, tol=opts.tol)
    return ShapingSolution(
        c_bar_opt=c_opt,
        objective=objective_6norm(c_opt, problem.Phi_bar),
        residuals=report,
        iterations=n_newton,
        converged=converged and report["feasible"],
        objective_trace=trace,
    )
