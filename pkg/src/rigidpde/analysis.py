"""Pointwise structure analysis and region scans.

From a coefficient sample this module derives the ellipticity
discriminant, the upper-half-plane spectral parameter, the associated
Beltrami coefficient, the condition number of the equivalent
second-order problem, and the transport obstruction pair (A, B) whose
vanishing makes the system exactly solvable by characteristics.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateStructure, InvalidBranch, NotElliptic, StencilOutOfDomain
from .fields import (
    REFERENCE_WINDOW,
    CoefficientField,
    CoefficientSample,
    DeltaFamily,
    DeltaField,
    GridSpec,
    Point,
    Region,
    aligned_gridspec,
    default_fd_step,
    grid_axes,
)

# Rigidity verdict thresholds: closed-form partials leave only roundoff in
# (A, B); finite differences leave O(h**2) truncation noise.
RIGIDITY_TOL_CLOSED_FORM = 1e-10
RIGIDITY_TOL_FINITE_DIFF = 1e-4


def discriminant(cs: CoefficientSample):
    """Ellipticity discriminant 4*alpha - beta**2 (> 0 on elliptic points).

    Raises NotElliptic carrying the offending value when any point has a
    non-positive discriminant.
    """
    disc = 4.0 * np.asarray(cs.alpha) - np.asarray(cs.beta) * np.asarray(cs.beta)
    if np.any(disc <= 0.0):
        raise NotElliptic(np.min(disc))
    return disc


def spectral_parameter(cs: CoefficientSample):
    """Root lambda = (-beta + i*sqrt(4*alpha - beta**2))/2 of
    X**2 + beta*X + alpha = 0 on the branch Im(lambda) > 0."""
    disc = discriminant(cs)
    return 0.5 * (-np.asarray(cs.beta) + 1j * np.sqrt(disc))


def beltrami_coefficient(lam):
    """Beltrami coefficient mu = (lambda - i)/(lambda + i); |mu| < 1 exactly
    when Im(lambda) > 0."""
    lam = np.asarray(lam, dtype=complex)
    if np.any(lam.imag <= 0.0):
        raise InvalidBranch(
            f"Im(lambda) must be > 0, got minimum {np.min(lam.imag):.6g}"
        )
    return (lam - 1j) / (lam + 1j)


def condition_number(sup_mu: float) -> float:
    """Condition number ((1 + sup|mu|)/(1 - sup|mu|))**2 of the equivalent
    second-order problem."""
    sup_mu = float(sup_mu)
    if not 0.0 <= sup_mu < 1.0:
        raise DegenerateStructure(
            f"need 0 <= sup|mu| < 1, got {sup_mu:.6g}"
        )
    return ((1.0 + sup_mu) / (1.0 - sup_mu)) ** 2


def obstruction(cs: CoefficientSample):
    """Transport obstruction pair (A, B) from alpha, beta and first partials.

    A = [beta*(alpha_x - alpha*beta_y) - 2*alpha*(beta_x + alpha_y - beta*beta_y)] / disc
    B = [2*(alpha_x - alpha*beta_y) - beta*(beta_x + alpha_y - beta*beta_y)] / disc

    The two bracketed combinations must be formed exactly as written:
    built-in fields arrange their partials so both cancel exactly in
    floating point, keeping (A, B) at zero however small the discriminant.
    """
    return _obstruction_with_disc(cs, discriminant(cs))


def _obstruction_with_disc(cs: CoefficientSample, disc):
    alpha = np.asarray(cs.alpha)
    beta = np.asarray(cs.beta)
    t1 = np.asarray(cs.alpha_x) - alpha * np.asarray(cs.beta_y)
    t2 = np.asarray(cs.beta_x) + np.asarray(cs.alpha_y) - beta * np.asarray(cs.beta_y)
    a = (beta * t1 - 2.0 * alpha * t2) / disc
    b = (2.0 * t1 - beta * t2) / disc
    return a, b


@dataclass
class StructureSample:
    """Derived structure quantities at one point (or a batch)."""

    disc: np.ndarray
    lam: np.ndarray
    mu: np.ndarray
    abs_mu: np.ndarray
    obstr_A: np.ndarray
    obstr_B: np.ndarray


def structure_sample(cs: CoefficientSample) -> StructureSample:
    """Bundle discriminant, spectral parameter, Beltrami coefficient and
    obstruction computed from one coefficient sample."""
    disc = discriminant(cs)
    lam = 0.5 * (-np.asarray(cs.beta) + 1j * np.sqrt(disc))
    mu = beltrami_coefficient(lam)
    a, b = _obstruction_with_disc(cs, disc)
    return StructureSample(disc, lam, mu, np.abs(mu), a, b)


def _spectral_at(field: CoefficientField, x, y):
    """lambda at (x, y): closed form when the field provides it, otherwise
    derived from raw (alpha, beta) samples."""
    sp = field.spectral(x, y)
    if sp is not None:
        return sp[0]
    alpha, beta = field.values(x, y)
    disc = 4.0 * alpha - beta * beta
    if np.any(disc <= 0.0):
        raise NotElliptic(np.min(disc))
    return 0.5 * (-beta + 1j * np.sqrt(disc))


def burgers_residual(field: CoefficientField, p, h=None):
    """Residual lambda_x + lambda*lambda_y of the conservative transport
    law for the spectral parameter; zero exactly when the obstruction
    vanishes.

    Uses the field's closed-form spectral partials when available, else
    central differences of lambda at step h.  ``p`` may be a Point or an
    (x, y) pair of scalars/arrays.
    """
    x, y = (p.x, p.y) if isinstance(p, Point) else p
    sp = field.spectral(x, y)
    if sp is not None:
        lam, lam_x, lam_y = sp
        return lam_x + lam * lam_y
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if h is None:
        h = default_fd_step(x, y)
    h = np.asarray(h, dtype=float)
    try:
        lam = _spectral_at(field, x, y)
        lam_e = _spectral_at(field, x + h, y)
        lam_w = _spectral_at(field, x - h, y)
        lam_n = _spectral_at(field, x, y + h)
        lam_s = _spectral_at(field, x, y - h)
    except NotElliptic:
        raise
    except Exception as exc:  # field region violations at stencil feet
        raise StencilOutOfDomain(str(exc)) from exc
    two_h = 2.0 * h
    return (lam_e - lam_w) / two_h + lam * (lam_n - lam_s) / two_h


@dataclass
class RegionScanReport:
    """Extremes of |mu|, the condition number, the largest obstruction
    magnitudes, and the rigidity verdict over one rectangular scan."""

    region: Region
    grid: GridSpec
    inf_mu: float
    sup_mu: float
    kappa: float
    max_abs_A: float
    max_abs_B: float
    rigid: bool
    rigidity_tol: float
    partials: str  # "closed-form" or "finite-difference"
    delta: float | None = None

    def to_dict(self) -> dict:
        return {
            "delta": self.delta,
            "region": list(self.region.as_tuple()),
            "grid": [self.grid.nx, self.grid.ny],
            "inf_mu": self.inf_mu,
            "sup_mu": self.sup_mu,
            "kappa": self.kappa,
            "max_abs_A": self.max_abs_A,
            "max_abs_B": self.max_abs_B,
            "rigid": self.rigid,
            "rigidity_tol": self.rigidity_tol,
            "partials": self.partials,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    CSV_HEADER = "delta,inf_mu,sup_mu,kappa"

    def to_csv_row(self, digits: int = 6) -> str:
        d = "NA" if self.delta is None else f"{self.delta:.{digits}g}"
        return (f"{d},{self.inf_mu:.{digits}g},{self.sup_mu:.{digits}g},"
                f"{self.kappa:.{digits}g}")


def scan_region(
    field: CoefficientField,
    region: Region,
    grid: GridSpec,
    rigidity_tol: float | None = None,
    chunk_rows: int = 128,
) -> RegionScanReport:
    """Grid scan of a coefficient field: inf/sup of |mu|, the condition
    number from the grid supremum, max |A| and |B|, and the rigidity
    verdict max(|A|,|B|) < rigidity_tol.

    Raises NotElliptic with the node location if any node fails the
    discriminant test.  The scan runs in row chunks; min/max reductions
    are order-independent.
    """
    if rigidity_tol is None:
        rigidity_tol = (RIGIDITY_TOL_CLOSED_FORM if field.closed_form_partials
                        else RIGIDITY_TOL_FINITE_DIFF)
    xs, ys = grid_axes(region, grid)
    inf_mu, sup_mu = np.inf, -np.inf
    max_a, max_b = 0.0, 0.0
    for start in range(0, ys.size, chunk_rows):
        yc = ys[start:start + chunk_rows]
        X, Y = np.meshgrid(xs, yc)
        cs = field.sample(X, Y)
        sp = field.spectral(X, Y)
        if sp is not None:
            lam = sp[0]
            b = lam.imag
            if np.any(b <= 0.0):
                j, i = np.unravel_index(int(np.argmin(b)), b.shape)
                raise InvalidBranch(
                    f"field's spectral data has Im(lambda) = {b[j, i]:.6g} "
                    f"<= 0 at (x={X[j, i]:.9g}, y={Y[j, i]:.9g})"
                )
            disc = (b + b) ** 2
        else:
            disc = 4.0 * np.asarray(cs.alpha) - np.asarray(cs.beta) ** 2
            if np.any(disc <= 0.0):
                j, i = np.unravel_index(int(np.argmin(disc)), disc.shape)
                raise NotElliptic(disc[j, i], x=X[j, i], y=Y[j, i])
            lam = 0.5 * (-np.asarray(cs.beta) + 1j * np.sqrt(disc))
        abs_mu = np.abs((lam - 1j) / (lam + 1j))
        a, b_ = _obstruction_with_disc(cs, disc)
        inf_mu = min(inf_mu, float(abs_mu.min()))
        sup_mu = max(sup_mu, float(abs_mu.max()))
        max_a = max(max_a, float(np.abs(a).max()))
        max_b = max(max_b, float(np.abs(b_).max()))
    return RegionScanReport(
        region=region,
        grid=grid,
        inf_mu=inf_mu,
        sup_mu=sup_mu,
        kappa=condition_number(sup_mu),
        max_abs_A=max_a,
        max_abs_B=max_b,
        rigid=max(max_a, max_b) < rigidity_tol,
        rigidity_tol=rigidity_tol,
        partials=("closed-form" if field.closed_form_partials
                  else "finite-difference"),
        delta=getattr(field, "delta", None),
    )


# The delta values of the built-in degeneration table.
TABLE_DELTAS = (1.0, 1e-1, 1e-2, 1e-3, 1e-4)


def degeneration_table(
    nominal_nx: int = 2001,
    nominal_ny: int = 2001,
    region: Region | None = None,
) -> list[RegionScanReport]:
    """Scan the built-in family over the reference window for each delta in
    TABLE_DELTAS on an axis-aligned grid near the nominal resolution."""
    region = REFERENCE_WINDOW if region is None else region
    grid = aligned_gridspec(region, nominal_nx, nominal_ny)
    return [
        scan_region(DeltaField(DeltaFamily(d)), region, grid)
        for d in TABLE_DELTAS
    ]
