"""Exact solver for the rigid regime.

Because the spectral parameter lambda = (y + i*delta)/(1+x) obeys the
conservative transport law lambda_x + lambda*lambda_y = 0, the complex
combination w = u + v*lambda turns the real first-order system into the
scalar transport equation w_x + lambda*w_y = 0, which is solved exactly
by w = f0(zeta) with zeta the characteristic coordinate and f0 the
initial profile on the line x = 0.  The identification is invertible
(u = Re(w) - (a/b)*Im(w), v = Im(w)/b with lambda = a + i*b), so both
directions and their residual checks live here.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field as dc_field

import numpy as np

from .errors import StencilOutOfDomain
from .fields import (
    CoefficientField,
    DeltaFamily,
    GridSpec,
    Point,
    Region,
    grid_axes,
    lattice_from_columns,
)


def characteristic_coordinate(fam: DeltaFamily, p):
    """Characteristic coordinate zeta = (y - i*delta*x)/(1+x).

    Constant along characteristics, equal to y on the initial line x = 0,
    and related to the spectral parameter by lambda = zeta + i*delta.
    ``p`` may be a Point or an (x, y) pair of scalars/arrays.
    """
    x, y = (p.x, p.y) if isinstance(p, Point) else p
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    inv = 1.0 / (1.0 + x)
    return (y - 1j * fam.delta * x) * inv


# ---------------------------------------------------------------------------
# Initial data catalog (entire functions only, so the characteristic formula
# is evaluable on any rectangle).

class InitialData:
    """An entire initial profile f0 for the transport problem."""

    def evaluate(self, z, delta: float):
        raise NotImplementedError

    def derivative(self, z, delta: float):
        raise NotImplementedError

    def descriptor(self) -> str:
        raise NotImplementedError


@dataclass(frozen=True)
class Polynomial(InitialData):
    """f0(z) = c0 + c1*z + ... + cn*z**n with complex coefficients."""

    coefficients: tuple

    def __post_init__(self):
        if len(self.coefficients) == 0:
            raise ValueError("polynomial needs at least one coefficient")
        object.__setattr__(
            self, "coefficients", tuple(complex(c) for c in self.coefficients)
        )

    def evaluate(self, z, delta):
        return np.polynomial.polynomial.polyval(np.asarray(z, dtype=complex),
                                                self.coefficients)

    def derivative(self, z, delta):
        z = np.asarray(z, dtype=complex)
        if len(self.coefficients) == 1:
            return np.zeros_like(z)
        der = np.polynomial.polynomial.polyder(self.coefficients)
        return np.polynomial.polynomial.polyval(z, der)

    def descriptor(self):
        return "poly:" + ",".join(format_complex(c) for c in self.coefficients)


@dataclass(frozen=True)
class ExpAffine(InitialData):
    """f0(z) = exp(c*z + d)."""

    c: complex
    d: complex = 0j

    def evaluate(self, z, delta):
        return np.exp(self.c * np.asarray(z, dtype=complex) + self.d)

    def derivative(self, z, delta):
        return self.c * self.evaluate(z, delta)

    def descriptor(self):
        return f"exp:{format_complex(self.c)},{format_complex(self.d)}"


@dataclass(frozen=True)
class LambdaPower(InitialData):
    """f0(z) = (z + i*delta)**k, so the solution is the spectral-parameter
    power lambda**k."""

    k: int

    def __post_init__(self):
        if self.k < 0 or self.k != int(self.k):
            raise ValueError(f"power must be a nonnegative integer, got {self.k}")

    def evaluate(self, z, delta):
        return (np.asarray(z, dtype=complex) + 1j * delta) ** self.k

    def derivative(self, z, delta):
        z = np.asarray(z, dtype=complex)
        if self.k == 0:
            return np.zeros_like(z)
        return self.k * (z + 1j * delta) ** (self.k - 1)

    def descriptor(self):
        return f"lpow:{self.k}"


def format_complex(z) -> str:
    """Render a complex number in the a+bi descriptor grammar."""
    z = complex(z)
    if z.imag == 0.0:
        return repr(z.real)
    if z.real == 0.0:
        return f"{z.imag!r}i"
    sign = "+" if z.imag >= 0 else "-"
    return f"{z.real!r}{sign}{abs(z.imag)!r}i"


def parse_complex(text: str) -> complex:
    """Parse the a+bi grammar (both parts optional, e.g. '3', '-2i',
    '1.5+0.25i'); a trailing j is accepted as a synonym for i."""
    t = text.strip().replace(" ", "")
    if not t:
        raise ValueError("empty complex literal")
    if t.endswith("i") or t.endswith("I"):
        t = t[:-1] + "j"
    try:
        return complex(t)
    except ValueError as exc:
        raise ValueError(f"bad complex literal {text!r}: expected a+bi") from exc


F0_GRAMMAR = (
    "poly:c0,c1,...  (complex literals a+bi)  |  exp:c,d  ->  exp(c*z + d)"
    "  |  lpow:k  ->  (z + i*delta)**k"
)


def parse_f0(descriptor: str) -> InitialData:
    """Parse an initial-data descriptor; see F0_GRAMMAR."""
    head, sep, rest = descriptor.partition(":")
    if not sep:
        raise ValueError(f"bad f0 descriptor {descriptor!r}; grammar: {F0_GRAMMAR}")
    head = head.strip().lower()
    if head == "poly":
        return Polynomial(tuple(parse_complex(c) for c in rest.split(",")))
    if head == "exp":
        parts = rest.split(",")
        if len(parts) not in (1, 2):
            raise ValueError(f"exp takes c[,d], got {rest!r}")
        c = parse_complex(parts[0])
        d = parse_complex(parts[1]) if len(parts) == 2 else 0j
        return ExpAffine(c, d)
    if head == "lpow":
        try:
            return LambdaPower(int(rest))
        except ValueError as exc:
            raise ValueError(f"lpow takes a nonnegative integer, got {rest!r}") from exc
    raise ValueError(f"unknown f0 kind {head!r}; grammar: {F0_GRAMMAR}")


# ---------------------------------------------------------------------------
# Grid-sampled solution fields.

@dataclass
class ComplexField:
    """Complex scalar w sampled on a grid, optionally with analytic partial
    grids and descriptive metadata."""

    xs: np.ndarray
    ys: np.ndarray
    values: np.ndarray             # shape (ny, nx)
    wx: np.ndarray | None = None   # analytic d/dx grid, same shape
    wy: np.ndarray | None = None
    meta: dict = dc_field(default_factory=dict)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.shape != (self.ys.size, self.xs.size):
            raise ValueError(
                f"values shape {self.values.shape} does not match grid "
                f"({self.ys.size}, {self.xs.size})"
            )
        if not np.all(np.isfinite(self.values)):
            raise ValueError("field contains non-finite entries")

    @property
    def region(self) -> Region:
        return Region(self.xs[0], self.xs[-1], self.ys[0], self.ys[-1])

    @property
    def grid(self) -> GridSpec:
        return GridSpec(self.xs.size, self.ys.size)

    @property
    def has_partials(self) -> bool:
        return self.wx is not None and self.wy is not None


@dataclass
class RealPairField:
    """Real solution pair (u, v) sampled on a grid, optionally with the
    four analytic partial grids (ux, uy, vx, vy)."""

    xs: np.ndarray
    ys: np.ndarray
    u: np.ndarray
    v: np.ndarray
    partials: tuple | None = None  # (ux, uy, vx, vy)
    meta: dict = dc_field(default_factory=dict)

    def __post_init__(self):
        shape = (self.ys.size, self.xs.size)
        if self.u.shape != shape or self.v.shape != shape:
            raise ValueError(
                f"u/v shapes {self.u.shape}/{self.v.shape} do not match {shape}"
            )
        if not (np.all(np.isfinite(self.u)) and np.all(np.isfinite(self.v))):
            raise ValueError("field contains non-finite entries")

    @property
    def region(self) -> Region:
        return Region(self.xs[0], self.xs[-1], self.ys[0], self.ys[-1])

    @property
    def grid(self) -> GridSpec:
        return GridSpec(self.xs.size, self.ys.size)

    @property
    def has_partials(self) -> bool:
        return self.partials is not None


def solve_characteristic(
    fam: DeltaFamily,
    f0: InitialData,
    region: Region,
    grid: GridSpec,
) -> ComplexField:
    """Exact transport solution w = f0(zeta) on a grid, with the initial
    trace w(0, y) = f0(y) on the line x = 0.

    The initial profiles in the catalog are entire, so the formula is
    evaluated on the full requested rectangle; that choice is recorded in
    the field metadata.  The arithmetic per node does not depend on delta.
    """
    xs, ys = grid_axes(region, grid)
    X, Y = np.meshgrid(xs, ys)
    inv = 1.0 / (1.0 + X)
    zeta = (Y - 1j * fam.delta * X) * inv
    w = np.asarray(f0.evaluate(zeta, fam.delta), dtype=complex)
    df = np.asarray(f0.derivative(zeta, fam.delta), dtype=complex)
    lam = (Y + 1j * fam.delta) * inv
    # zeta_x = -lambda/(1+x), zeta_y = 1/(1+x)
    wx = df * (-(lam * inv))
    wy = df * inv
    meta = {
        "delta": fam.delta,
        "f0": f0.descriptor(),
        "initial_line": "x=0",
        "evaluation": "full-rectangle (entire initial data)",
    }
    return ComplexField(xs, ys, w, wx=wx, wy=wy, meta=meta)


def _lambda_parts(fam: DeltaFamily, xs, ys):
    X, Y = np.meshgrid(xs, ys)
    inv = 1.0 / (1.0 + X)
    return X, Y, inv, Y * inv, fam.delta * inv  # X, Y, inv, a, b


def from_real_pair(fam: DeltaFamily, uv: RealPairField) -> ComplexField:
    """Spectral identification w = u + v*lambda = (u + a*v) + i*(b*v)."""
    X, Y, inv, a, b = _lambda_parts(fam, uv.xs, uv.ys)
    w = (uv.u + a * uv.v) + 1j * (b * uv.v)
    wx = wy = None
    if uv.has_partials:
        ux, uy, vx, vy = uv.partials
        a_x = -(a * inv)
        b_x = -(b * inv)
        wx = (ux + a_x * uv.v + a * vx) + 1j * (b_x * uv.v + b * vx)
        wy = (uy + inv * uv.v + a * vy) + 1j * (b * vy)  # a_y = inv, b_y = 0
    meta = dict(uv.meta)
    meta["delta"] = fam.delta
    return ComplexField(uv.xs, uv.ys, w, wx=wx, wy=wy, meta=meta)


def to_real_pair(fam: DeltaFamily, w: ComplexField) -> RealPairField:
    """Inverse identification u = Re(w) - (a/b)*Im(w), v = Im(w)/b.

    Requires delta > 0 (enforced at DeltaFamily construction) so that
    b = delta/(1+x) never vanishes.
    """
    X, Y, inv, a, b = _lambda_parts(fam, w.xs, w.ys)
    p = w.values.real
    q = w.values.imag
    ratio = a / b  # equals y/delta
    u = p - ratio * q
    v = q / b
    partials = None
    if w.has_partials:
        px, qx = w.wx.real, w.wx.imag
        py, qy = w.wy.real, w.wy.imag
        inv_delta = 1.0 / fam.delta
        # d(a/b)/dx = 0 and d(a/b)/dy = 1/delta; 1/b = (1+x)/delta.
        ux = px - ratio * qx
        uy = py - q * inv_delta - ratio * qy
        vx = (q + (1.0 + X) * qx) * inv_delta
        vy = (1.0 + X) * qy * inv_delta
        partials = (ux, uy, vx, vy)
    meta = dict(w.meta)
    meta["delta"] = fam.delta
    return RealPairField(w.xs, w.ys, u, v, partials=partials, meta=meta)


# ---------------------------------------------------------------------------
# Residual verification.

@dataclass
class ResidualReport:
    """Maxima and grids of the two system residuals
    r1 = u_x - alpha*v_y and r2 = v_x + u_y - beta*v_y."""

    max_r1: float
    max_r2: float
    r1: np.ndarray
    r2: np.ndarray
    mode: str            # "analytic" or "fd"
    hx: float | None
    hy: float | None
    boundary_excluded: bool

    @property
    def max_residual(self) -> float:
        return max(self.max_r1, self.max_r2)

    def to_dict(self) -> dict:
        return {
            "max_r1": self.max_r1,
            "max_r2": self.max_r2,
            "mode": self.mode,
            "hx": self.hx,
            "hy": self.hy,
            "boundary_excluded": self.boundary_excluded,
        }


def _grid_spacings(xs, ys):
    hx = np.diff(xs)
    hy = np.diff(ys)
    if (np.max(hx) - np.min(hx) > 1e-9 * (xs[-1] - xs[0])
            or np.max(hy) - np.min(hy) > 1e-9 * (ys[-1] - ys[0])):
        raise ValueError("finite differences require a uniformly spaced grid")
    return float(np.mean(hx)), float(np.mean(hy))


def _stride_for(h, hx, hy):
    """Map a requested step onto integer stencil strides per axis."""
    if h is None:
        return 1, 1
    kx, ky = h / hx, h / hy
    sx, sy = int(round(kx)), int(round(ky))
    if (sx < 1 or sy < 1 or abs(kx - sx) > 1e-9 * max(1.0, kx)
            or abs(ky - sy) > 1e-9 * max(1.0, ky)):
        raise ValueError(
            f"step h = {h:g} is not an integer multiple of the grid spacings "
            f"({hx:g}, {hy:g})"
        )
    return sx, sy


def _central_diffs(f, hx, hy, sx, sy):
    """Interior central differences with strides (sx, sy); returns the
    derivative grids restricted to the shared interior window."""
    if f.shape[0] <= 2 * sy or f.shape[1] <= 2 * sx:
        raise StencilOutOfDomain(
            f"grid {f.shape} too small for a stride ({sx}, {sy}) stencil"
        )
    fx = (f[sy:-sy, 2 * sx:] - f[sy:-sy, :-2 * sx]) / (2.0 * sx * hx)
    fy = (f[2 * sy:, sx:-sx] - f[:-2 * sy, sx:-sx]) / (2.0 * sy * hy)
    return fx, fy


def system_residual(
    field: CoefficientField,
    uv: RealPairField,
    mode: str = "fd",
    h: float | None = None,
) -> ResidualReport:
    """Residuals of the real system r1 = u_x - alpha*v_y,
    r2 = v_x + u_y - beta*v_y on the grid of ``uv``.

    mode="fd" uses central differences of the stored grids (a one-node
    rim per stride is excluded and recorded); mode="analytic" requires
    the field to carry closed-form partial grids.
    """
    xs, ys = uv.xs, uv.ys
    if mode == "analytic":
        if not uv.has_partials:
            raise ValueError("analytic mode needs a field carrying partial grids")
        ux, uy, vx, vy = uv.partials
        X, Y = np.meshgrid(xs, ys)
        alpha, beta = field.values(X, Y)
        r1 = ux - alpha * vy
        r2 = vx + uy - beta * vy
        return ResidualReport(
            float(np.abs(r1).max()), float(np.abs(r2).max()), r1, r2,
            "analytic", None, None, boundary_excluded=False,
        )
    if mode != "fd":
        raise ValueError(f"mode must be 'fd' or 'analytic', got {mode!r}")
    hx, hy = _grid_spacings(xs, ys)
    sx, sy = _stride_for(h, hx, hy)
    ux, uy = _central_diffs(uv.u, hx, hy, sx, sy)
    vx, vy = _central_diffs(uv.v, hx, hy, sx, sy)
    Xi, Yi = np.meshgrid(xs[sx:-sx], ys[sy:-sy])
    alpha, beta = field.values(Xi, Yi)
    r1 = ux - alpha * vy
    r2 = vx + uy - beta * vy
    return ResidualReport(
        float(np.abs(r1).max()), float(np.abs(r2).max()), r1, r2,
        "fd", sx * hx, sy * hy, boundary_excluded=True,
    )


def transport_residual(
    fam: DeltaFamily,
    w: ComplexField,
    mode: str = "fd",
    h: float | None = None,
):
    """Residual w_x + lambda*w_y of the scalar transport equation.

    Returns the complex residual grid: full-shape for analytic mode, the
    interior window for fd mode (one stencil rim excluded).
    """
    if mode == "analytic":
        if not w.has_partials:
            raise ValueError("analytic mode needs a field carrying wx, wy grids")
        X, Y = np.meshgrid(w.xs, w.ys)
        lam = (Y + 1j * fam.delta) / (1.0 + X)
        return w.wx + lam * w.wy
    if mode != "fd":
        raise ValueError(f"mode must be 'fd' or 'analytic', got {mode!r}")
    hx, hy = _grid_spacings(w.xs, w.ys)
    sx, sy = _stride_for(h, hx, hy)
    wx, wy = _central_diffs(w.values, hx, hy, sx, sy)
    Xi, Yi = np.meshgrid(w.xs[sx:-sx], w.ys[sy:-sy])
    lam = (Yi + 1j * fam.delta) / (1.0 + Xi)
    return wx + lam * wy


def transport_residual_from_field(field: CoefficientField, w: ComplexField,
                                  h: float | None = None):
    """fd transport residual with lambda derived from an arbitrary
    coefficient field instead of the built-in family."""
    hx, hy = _grid_spacings(w.xs, w.ys)
    sx, sy = _stride_for(h, hx, hy)
    wx, wy = _central_diffs(w.values, hx, hy, sx, sy)
    Xi, Yi = np.meshgrid(w.xs[sx:-sx], w.ys[sy:-sy])
    from .analysis import _spectral_at

    lam = _spectral_at(field, Xi, Yi)
    return wx + lam * wy


# ---------------------------------------------------------------------------
# Serialization: CSV data files plus a JSON header.  Values are written with
# repr (shortest round-trip form), so finite data survives a write/read
# cycle bit-exactly.

def write_complex_csv(field: ComplexField, path):
    _write_rows(path, ["x", "y", "re", "im"], field.xs, field.ys,
                [field.values.real, field.values.imag])


def write_real_pair_csv(field: RealPairField, path):
    _write_rows(path, ["x", "y", "u", "v"], field.xs, field.ys,
                [field.u, field.v])


def _write_rows(path, header, xs, ys, grids):
    X, Y = np.meshgrid(xs, ys)
    cols = [X.ravel(), Y.ravel()] + [g.ravel() for g in grids]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in zip(*cols):
            writer.writerow([repr(float(v)) for v in row])


def _read_rows(path, header):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        got = next(reader, None)
        if got is None or [c.strip() for c in got] != header:
            raise ValueError(f"{path}: expected header {','.join(header)}, got {got}")
        rows = [[float(c) for c in row] for row in reader if row]
    if not rows:
        raise ValueError(f"{path}: no data rows")
    return np.asarray(rows, dtype=float)


def read_complex_csv(path) -> ComplexField:
    data = _read_rows(path, ["x", "y", "re", "im"])
    xs, ys, (re, im) = lattice_from_columns(data[:, 0], data[:, 1],
                                            data[:, 2], data[:, 3])
    return ComplexField(xs, ys, re + 1j * im)


def read_real_pair_csv(path) -> RealPairField:
    data = _read_rows(path, ["x", "y", "u", "v"])
    xs, ys, (u, v) = lattice_from_columns(data[:, 0], data[:, 1],
                                          data[:, 2], data[:, 3])
    return RealPairField(xs, ys, u, v)


def field_header(field) -> dict:
    """JSON-serializable descriptor of a solution field."""
    region = field.region
    grid = field.grid
    header = {
        "region": list(region.as_tuple()),
        "grid": [grid.nx, grid.ny],
        "kind": "w" if isinstance(field, ComplexField) else "uv",
    }
    header.update(field.meta)
    return header


def write_field_header(field, path):
    with open(path, "w") as fh:
        json.dump(field_header(field), fh, indent=2)
        fh.write("\n")
