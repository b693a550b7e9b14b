"""Least-squares parameter recovery.

Zeeman line fits are linear in (D, g*mu) and solved by normal equations;
everything nonlinear goes through one shared damped Gauss-Newton
(Levenberg-Marquardt) engine with central finite-difference Jacobians
(relative step 1e-4), damping schedule lambda0=1e-3 with x10 on reject and
/10 on accept, and convergence when the relative parameter step drops
below 1e-9 or the gradient norm below 1e-8. Parameter uncertainties are
the residual-variance-scaled diagonal of (J^T J)^-1, an approximation.
"""

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .constants import BOHR_MAGNETON_MHZ_PER_G
from .exceptions import FitDomainError, RankDeficiencyError
from .sequence import DecayHistogram

LM_LAMBDA0 = 1e-3
LM_MAX_ITER = 200
LM_STEP_TOL = 1e-9
LM_GRAD_TOL = 1e-8
FD_REL_STEP = 1e-4


@dataclass
class FitResult:
    """Outcome of one least-squares fit.

    parameters and std_errors are keyed by parameter name; residual_norm is
    the 2-norm of the (weighted) residual vector at the solution.
    """

    parameters: dict
    std_errors: dict
    residual_norm: float
    iterations: int
    converged: bool
    gradient_norm: float = 0.0
    warnings: list = field(default_factory=list)

    def __getitem__(self, name: str) -> float:
        return self.parameters[name]


@dataclass(frozen=True)
class DataSeries:
    """Paired x/y data with optional per-point uncertainties."""

    x: np.ndarray
    y: np.ndarray
    sigma: Optional[np.ndarray] = None

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        y = np.asarray(self.y, dtype=float)
        if x.shape != y.shape or x.ndim != 1:
            raise ValueError("x and y must be 1-d arrays of equal length")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)
        if self.sigma is not None:
            s = np.asarray(self.sigma, dtype=float)
            if s.shape != x.shape:
                raise ValueError("sigma must match the data length")
            if np.any(s <= 0):
                raise ValueError("sigma entries must be positive")
            object.__setattr__(self, "sigma", s)

    def __len__(self):
        return self.x.size


def _check_size(data: DataSeries, n_params: int):
    if len(data) < n_params + 1:
        raise FitDomainError(
            f"need at least {n_params + 1} points for {n_params} parameters, got {len(data)}"
        )


def _fd_jacobian(residual: Callable, x: np.ndarray, r0_size: int) -> np.ndarray:
    jac = np.empty((r0_size, x.size))
    for k in range(x.size):
        h = FD_REL_STEP * max(abs(x[k]), 1.0)
        xp = x.copy()
        xm = x.copy()
        xp[k] += h
        xm[k] -= h
        jac[:, k] = (residual(xp) - residual(xm)) / (2.0 * h)
    return jac


def levenberg_marquardt(
    residual: Callable,
    x0,
    max_iter: int = LM_MAX_ITER,
) -> tuple:
    """Minimize ||residual(x)||^2 by damped Gauss-Newton.

    Returns (x, covariance, residual_norm, iterations, converged,
    gradient_norm). The covariance is residual-variance scaled; it is None
    when the system has no spare degrees of freedom or J^T J is singular.
    """
    x = np.asarray(x0, dtype=float).copy()
    r = residual(x)
    cost = float(r @ r)
    lam = LM_LAMBDA0
    converged = False
    grad_norm = np.inf
    iterations = 0

    for iterations in range(1, max_iter + 1):
        jac = _fd_jacobian(residual, x, r.size)
        jtj = jac.T @ jac
        grad = jac.T @ r
        grad_norm = float(np.max(np.abs(grad))) if grad.size else 0.0
        if grad_norm < LM_GRAD_TOL:
            converged = True
            break

        accepted = False
        for _ in range(50):
            damped = jtj + lam * np.diag(np.clip(np.diag(jtj), 1e-30, None))
            try:
                step = np.linalg.solve(damped, -grad)
            except np.linalg.LinAlgError:
                lam *= 10.0
                continue
            x_new = x + step
            r_new = residual(x_new)
            cost_new = float(r_new @ r_new)
            if cost_new < cost:
                rel_step = float(
                    np.max(np.abs(step) / np.maximum(np.abs(x_new), 1.0))
                )
                x, r, cost = x_new, r_new, cost_new
                lam = max(lam / 10.0, 1e-14)
                accepted = True
                if rel_step < LM_STEP_TOL:
                    converged = True
                break
            lam *= 10.0
        if converged or not accepted:
            break

    cov = None
    dof = r.size - x.size
    try:
        jtj = _fd_jacobian(residual, x, r.size)
        jtj = jtj.T @ jtj
        inv = np.linalg.inv(jtj)
        sigma_sq = cost / dof if dof > 0 else 0.0
        cov = sigma_sq * inv
    except np.linalg.LinAlgError:
        cov = None
    return x, cov, float(np.sqrt(cost)), iterations, converged, grad_norm


def _std_errors(cov, names):
    if cov is None:
        return {n: float("nan") for n in names}
    diag = np.clip(np.diag(cov), 0.0, None)
    return {n: float(np.sqrt(d)) for n, d in zip(names, diag)}


def fit_zeeman(data: DataSeries, branches) -> FitResult:
    """Recover (D, g) from axial Zeeman line positions by linear least squares.

    data holds (B gauss, omega MHz) pairs; branches is +/-1 per point and
    selects the upper or lower line of omega = D +/- g*mu*B. The model is
    linear in (D, g*mu), so the normal equations solve it in closed form.
    The result is invariant under swapping the branch labeling because g is
    reported as a magnitude.
    """
    _check_size(data, 2)
    sgn = np.asarray(branches, dtype=float)
    if sgn.shape != data.x.shape or not np.all(np.isin(sgn, (-1.0, 1.0))):
        raise ValueError("branches must be +/-1 for every data point")

    design = np.column_stack([np.ones(len(data)), sgn * data.x])
    if np.linalg.matrix_rank(design, tol=1e-9 * max(1.0, np.abs(design).max())) < 2:
        raise RankDeficiencyError(
            "cannot separate D and g: need both branches or two distinct fields"
        )
    jtj = design.T @ design
    beta = np.linalg.solve(jtj, design.T @ data.y)
    residuals = data.y - design @ beta
    rss = float(residuals @ residuals)
    dof = len(data) - 2
    sigma_sq = rss / dof if dof > 0 else 0.0
    cov = sigma_sq * np.linalg.inv(jtj)

    d_fit = float(beta[0])
    slope = float(beta[1])
    g_fit = abs(slope) / BOHR_MAGNETON_MHZ_PER_G
    return FitResult(
        parameters={"d_zfs": d_fit, "g_factor": g_fit},
        std_errors={
            "d_zfs": float(np.sqrt(max(cov[0, 0], 0.0))),
            "g_factor": float(np.sqrt(max(cov[1, 1], 0.0))) / BOHR_MAGNETON_MHZ_PER_G,
        },
        residual_norm=float(np.sqrt(rss)),
        iterations=1,
        converged=True,
        gradient_norm=0.0,
    )


def fit_nonlinear_zeeman(data: DataSeries, branches, initial_guess: dict) -> FitResult:
    """Fit (D, E, g) to axial Zeeman data through full diagonalization.

    branches selects which transition each point belongs to (-1 for the
    lower line, +1 for the upper). initial_guess must provide d_zfs,
    e_strain, and g_factor. E enters the axial eigenvalues only through
    its square, so it is reported as a magnitude.
    """
    from .hamiltonian import SpinParams, esr_frequencies

    _check_size(data, 3)
    sgn = np.asarray(branches, dtype=float)
    if sgn.shape != data.x.shape or not np.all(np.isin(sgn, (-1.0, 1.0))):
        raise ValueError("branches must be +/-1 for every data point")
    for key in ("d_zfs", "e_strain", "g_factor"):
        if key not in initial_guess or not np.isfinite(initial_guess[key]):
            raise ValueError(f"initial_guess needs a finite {key!r}")

    fields = data.x

    def model(params):
        d, e, g = params
        sp = SpinParams(d_zfs=d, e_strain=abs(e), g_factor=abs(g))
        out = np.empty(len(fields))
        for i, b in enumerate(fields):
            pair = esr_frequencies(sp, (0.0, 0.0, float(b)))
            out[i] = pair.omega_minus if sgn[i] < 0 else pair.omega_plus
        return out

    def residual(params):
        return model(params) - data.y

    x0 = np.array(
        [initial_guess["d_zfs"], initial_guess["e_strain"], initial_guess["g_factor"]]
    )
    x, cov, rnorm, iters, converged, gnorm = levenberg_marquardt(residual, x0)
    names = ("d_zfs", "e_strain", "g_factor")
    return FitResult(
        parameters={"d_zfs": float(x[0]), "e_strain": abs(float(x[1])), "g_factor": abs(float(x[2]))},
        std_errors=_std_errors(cov, names),
        residual_norm=rnorm,
        iterations=iters,
        converged=converged,
        gradient_norm=gnorm,
    )


def _histogram_series(hist: DecayHistogram, window) -> DataSeries:
    centers = hist.bin_centers()
    counts = np.asarray(hist.counts, dtype=float)
    lo, hi = window
    mask = (centers >= lo) & (centers <= hi)
    centers, counts = centers[mask], counts[mask]
    positive = counts > 0
    if positive.sum() < 3:
        raise FitDomainError(
            "need at least 3 bins with positive counts inside the fit window"
        )
    centers, counts = centers[positive], counts[positive]
    if hist.mode == "montecarlo":
        sigma = np.sqrt(np.maximum(counts, 1.0))
    else:
        sigma = np.ones_like(counts)
    return DataSeries(x=centers, y=counts, sigma=sigma)


def fit_exponential(hist: DecayHistogram, window) -> FitResult:
    """Fit A*exp(-t/tau) to a decay histogram inside the (lo, hi) ns window.

    Uses Poisson weights for Monte Carlo histograms and uniform weights for
    deterministic ones. A histogram with no measurable decay across the
    window comes back non-converged with tau = inf.
    """
    series = _histogram_series(hist, window)
    t, y, sigma = series.x, series.y, series.sigma

    # log-linear start, then LM refinement on the real model
    w = 1.0 / sigma**2
    logy = np.log(y)
    t_mean = np.average(t, weights=w)
    l_mean = np.average(logy, weights=w)
    var = np.average((t - t_mean) ** 2, weights=w)
    if var <= 0:
        raise FitDomainError("fit window does not span distinct bin centers")
    slope = np.average((t - t_mean) * (logy - l_mean), weights=w) / var
    rate0 = max(-slope, 1e-12)
    amp0 = float(np.exp(l_mean + slope * (0.0 - t_mean)))

    def residual(params):
        amp, rate = params
        return (amp * np.exp(-rate * t) - y) / sigma

    x, cov, rnorm, iters, converged, gnorm = levenberg_marquardt(
        residual, np.array([amp0, rate0])
    )
    amp, rate = float(x[0]), float(x[1])

    if rate <= 1e-9:
        return FitResult(
            parameters={"amplitude": amp, "tau": float("inf")},
            std_errors={"amplitude": float("nan"), "tau": float("nan")},
            residual_norm=rnorm,
            iterations=iters,
            converged=False,
            gradient_norm=gnorm,
            warnings=["no measurable decay in the fit window"],
        )

    tau = 1.0 / rate
    errs = _std_errors(cov, ("amplitude", "rate"))
    tau_err = errs["rate"] * tau * tau  # first-order propagation of 1/rate
    return FitResult(
        parameters={"amplitude": amp, "tau": tau},
        std_errors={"amplitude": errs["amplitude"], "tau": tau_err},
        residual_norm=rnorm,
        iterations=iters,
        converged=converged,
        gradient_norm=gnorm,
    )


def fit_piecewise_decay(hist: DecayHistogram, break_time_ns: float) -> FitResult:
    """Two independent exponential fits on either side of break_time_ns.

    Continuity across the break is deliberately not enforced: an imperfect
    mid-decay pulse changes the amplitude as well as the slope.
    """
    edges = hist.bin_edges
    if not edges[0] < break_time_ns < edges[-1]:
        raise FitDomainError("break_time_ns must lie strictly inside the histogram")
    centers = hist.bin_centers()
    if (centers < break_time_ns).sum() < 3 or (centers > break_time_ns).sum() < 3:
        raise FitDomainError("need at least 3 bins on each side of the break")

    before = fit_exponential(hist, (edges[0], break_time_ns - 1e-12))
    after = fit_exponential(hist, (break_time_ns + 1e-12, edges[-1]))
    return FitResult(
        parameters={
            "tau_before": before.parameters["tau"],
            "tau_after": after.parameters["tau"],
            "amplitude_before": before.parameters["amplitude"],
            "amplitude_after": after.parameters["amplitude"],
        },
        std_errors={
            "tau_before": before.std_errors["tau"],
            "tau_after": after.std_errors["tau"],
            "amplitude_before": before.std_errors["amplitude"],
            "amplitude_after": after.std_errors["amplitude"],
        },
        residual_norm=float(np.hypot(before.residual_norm, after.residual_norm)),
        iterations=before.iterations + after.iterations,
        converged=before.converged and after.converged,
        gradient_norm=max(before.gradient_norm, after.gradient_norm),
        warnings=before.warnings + after.warnings,
    )


def fit_lorentzian_dips(spectrum, n_dips: int, initial_centers) -> list:
    """Fit 1 - sum of Lorentzian dips to an ODMR spectrum.

    spectrum provides frequency_grid and pl (an OdmrSpectrum or any object
    with those attributes). Returns one FitResult per dip with parameters
    center, fwhm, and contrast; a conditioning warning is attached when two
    dips sit closer than a quarter of the broader linewidth.
    """
    if n_dips < 1:
        raise ValueError("n_dips must be >= 1")
    centers0 = np.asarray(initial_centers, dtype=float)
    if centers0.size != n_dips:
        raise ValueError("initial_centers must provide one center per dip")
    f = np.asarray(spectrum.frequency_grid, dtype=float)
    y = np.asarray(spectrum.pl, dtype=float)
    if centers0.min() < f.min() or centers0.max() > f.max():
        raise ValueError("initial centers must lie inside the frequency grid")

    step = np.median(np.diff(f))

    x0 = np.empty(3 * n_dips)
    for k, c in enumerate(centers0):
        idx = int(np.argmin(np.abs(f - c)))
        depth = max(1.0 - y[idx], 1e-3)
        x0[3 * k] = c
        x0[3 * k + 1] = max(10.0 * step, 1.0)
        x0[3 * k + 2] = depth

    def model(params):
        out = np.ones_like(f)
        for k in range(n_dips):
            c, w, a = params[3 * k : 3 * k + 3]
            half = max(abs(w) / 2.0, 1e-9)
            out -= a * half * half / ((f - c) ** 2 + half * half)
        return out

    def residual(params):
        return model(params) - y

    x, cov, rnorm, iters, converged, gnorm = levenberg_marquardt(residual, x0)

    warnings = []
    fitted_centers = x[0::3]
    fitted_fwhm = np.abs(x[1::3])
    for a in range(n_dips):
        for b in range(a + 1, n_dips):
            if abs(fitted_centers[a] - fitted_centers[b]) < 0.25 * max(
                fitted_fwhm[a], fitted_fwhm[b]
            ):
                warnings.append(
                    f"dips {a} and {b} overlap within a quarter linewidth; "
                    "covariance is poorly conditioned"
                )

    results = []
    names = ("center", "fwhm", "contrast")
    for k in range(n_dips):
        if cov is None:
            errs = {n: float("nan") for n in names}
        else:
            sub = np.clip(np.diag(cov)[3 * k : 3 * k + 3], 0.0, None)
            errs = {n: float(np.sqrt(v)) for n, v in zip(names, sub)}
        results.append(
            FitResult(
                parameters={
                    "center": float(x[3 * k]),
                    "fwhm": float(abs(x[3 * k + 1])),
                    "contrast": float(x[3 * k + 2]),
                },
                std_errors=errs,
                residual_norm=rnorm,
                iterations=iters,
                converged=converged,
                gradient_norm=gnorm,
                warnings=list(warnings),
            )
        )
    return results
