"""Directional multiscale analysis and synthesis on the sphere.

Analysis lifts a band-limited spin signal into one rotation-group signal
per scale plus a low-frequency sphere signal.  Because the analysis
functions only populate the outermost harmonic columns, every scale
signal lives on the sparse fast path of the Wigner transforms, and the
whole decomposition inverts exactly: synthesis recovers the input to
machine precision whenever the tiling resolves the identity.

Scale signals default to their own reduced band limit (multi-resolution);
pass multires=False to keep everything at the full band limit.

Coefficients come out in the unrotated frame, where the n = +-ell columns
are the native storage.  rotate_to_north moves a scale to the frame whose
analysis function is centred on the North pole, which is the frame the
coefficients are usually pictured in; rotate_from_north undoes it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .sphere import (
    HarmonicCoeffs,
    SphereGrid,
    SphereSignal,
    sht_forward,
    sht_forward_real,
    sht_inverse,
    sht_inverse_real,
)
from .so3 import (
    CurveletWignerCoeffs,
    SO3Grid,
    SO3Signal,
    WignerCoeffs,
    so3_forward_curvelet,
    so3_forward_curvelet_real,
    so3_inverse_curvelet,
    so3_inverse_curvelet_real,
    so3_inverse_general,
)
from .tiling import Tiling, TilingParams, curvelet_harmonics
from .wigner import wigner_d_edge_columns

__all__ = [
    "CurveletCoeffs",
    "analyze",
    "analyze_north_validation",
    "analyze_real",
    "rotate_from_north",
    "rotate_to_north",
    "scale_band_limit",
    "scaling_band_limit",
    "synthesize",
    "synthesize_real",
]


def scale_band_limit(params: TilingParams, j: int) -> int:
    """Smallest band limit that holds scale j losslessly."""
    if not params.j_min <= j <= params.j_max:
        raise ValueError(f"scale {j} outside [{params.j_min}, {params.j_max}]")
    return min(math.ceil(params.lam ** (j + 1)), params.band_limit)


def scaling_band_limit(params: TilingParams) -> int:
    """Smallest band limit that holds the low-frequency part losslessly."""
    return min(math.ceil(params.lam**params.j_min), params.band_limit)


@dataclass
class CurveletCoeffs:
    """One scale signal per analysis band plus the low-frequency residue.

    frame is "unrotated" or "north"; only unrotated coefficients can be
    synthesised directly.
    """

    params: TilingParams
    frame: str
    scaling: SphereSignal
    scales: list
    multires: bool = True
    real: bool = False

    def __post_init__(self):
        if self.frame not in ("unrotated", "north"):
            raise ValueError(f"unknown frame {self.frame!r}")
        if len(self.scales) != self.params.scale_count:
            raise ValueError(
                f"expected {self.params.scale_count} scale signals, got {len(self.scales)}"
            )

    def scale(self, j: int):
        if not self.params.j_min <= j <= self.params.j_max:
            raise ValueError(f"scale {j} out of range")
        return self.scales[j - self.params.j_min]


def _scale_wigner(flm: HarmonicCoeffs, t: Tiling, j: int, Lj: int) -> CurveletWignerCoeffs:
    """Sparse Wigner coefficients of scale j from sphere coefficients."""
    pos, neg = curvelet_harmonics(t, j)
    w = CurveletWignerCoeffs.zeros(Lj)
    c = Lj - 1
    for ell in range(1, Lj):
        if pos[ell] == 0.0 and neg[ell] == 0.0:
            continue
        row = (8.0 * math.pi**2 / (2 * ell + 1)) * flm.degree_slice(ell)
        w.values[0, ell, c - ell : c + ell + 1] = row * pos[ell]
        w.values[1, ell, c - ell : c + ell + 1] = row * neg[ell]
    return w


def _check_signal(f: SphereSignal, t: Tiling) -> None:
    p = t.params
    if f.grid.band_limit != p.band_limit:
        raise ValueError(
            f"signal band limit {f.grid.band_limit} does not match tiling {p.band_limit}"
        )
    if f.spin != p.spin:
        raise ValueError(f"signal spin {f.spin} does not match tiling spin {p.spin}")


def _scaling_coeffs(flm: HarmonicCoeffs, t: Tiling, Ls: int, real: bool) -> HarmonicCoeffs:
    vals = np.zeros(Ls * Ls, dtype=complex)
    for ell in range(Ls):
        amp = t.scaling[ell]
        if amp == 0.0:
            continue
        amp *= math.sqrt(4.0 * math.pi / (2 * ell + 1))
        vals[ell * ell : ell * ell + 2 * ell + 1] = amp * flm.degree_slice(ell)
    return HarmonicCoeffs(Ls, 0, vals, real=real)


def analyze(f: SphereSignal, t: Tiling, multires: bool = True) -> CurveletCoeffs:
    """Decompose a band-limited spin signal into directional scale signals."""
    _check_signal(f, t)
    p = t.params
    L = p.band_limit
    flm = sht_forward(f)
    scales = []
    for j in range(p.j_min, p.j_max + 1):
        Lj = scale_band_limit(p, j) if multires else L
        w = _scale_wigner(flm, t, j, Lj)
        scales.append(so3_inverse_curvelet(w, SO3Grid(Lj, Lj, Lj)))
    Ls = scaling_band_limit(p) if multires else L
    scaling_sig = sht_inverse(_scaling_coeffs(flm, t, Ls, real=False))
    return CurveletCoeffs(p, "unrotated", scaling_sig, scales, multires)


def synthesize(c: CurveletCoeffs, t: Tiling) -> SphereSignal:
    """Reassemble the sphere signal from its scale signals; exact."""
    p = t.params
    if c.params != p:
        raise ValueError("coefficients were built for a different tiling")
    if c.frame != "unrotated":
        raise ValueError("synthesis needs unrotated coefficients; apply rotate_from_north first")
    L = p.band_limit
    acc = np.zeros(L * L, dtype=complex)
    for j in range(p.j_min, p.j_max + 1):
        sig = c.scale(j)
        expected = scale_band_limit(p, j) if c.multires else L
        if sig.grid.L != expected:
            raise ValueError(f"scale {j} stored at band limit {sig.grid.L}, expected {expected}")
        w = so3_forward_curvelet(sig)
        pos, neg = curvelet_harmonics(t, j)
        cc = w.band_limit - 1
        for ell in range(1, w.band_limit):
            if pos[ell] == 0.0 and neg[ell] == 0.0:
                continue
            acc[ell * ell : ell * ell + 2 * ell + 1] += (
                w.values[0, ell, cc - ell : cc + ell + 1] * pos[ell]
                + w.values[1, ell, cc - ell : cc + ell + 1] * neg[ell]
            )
    slm = sht_forward(c.scaling)
    for ell in range(slm.band_limit):
        amp = t.scaling[ell]
        if amp == 0.0:
            continue
        amp *= math.sqrt(4.0 * math.pi / (2 * ell + 1))
        acc[ell * ell : ell * ell + 2 * ell + 1] += amp * slm.degree_slice(ell)
    acc[: p.spin * p.spin] = 0.0
    return sht_inverse(HarmonicCoeffs(L, p.spin, acc))


def analyze_real(f: SphereSignal, t: Tiling, multires: bool = True) -> CurveletCoeffs:
    """Analysis of a real signal through half-spectrum transforms.

    The scale signals of a real input are themselves real on the rotation
    group, so both the sphere and Wigner stages can run on half the
    spectrum; costs drop roughly in half against analyze().
    """
    if not f.real:
        raise ValueError("analyze_real requires a real-flagged signal")
    _check_signal(f, t)
    p = t.params
    L = p.band_limit
    flm = sht_forward_real(f)
    scales = []
    for j in range(p.j_min, p.j_max + 1):
        Lj = scale_band_limit(p, j) if multires else L
        w = _scale_wigner(flm, t, j, Lj)
        scales.append(so3_inverse_curvelet_real(w, SO3Grid(Lj, Lj, Lj)))
    Ls = scaling_band_limit(p) if multires else L
    scaling_sig = sht_inverse_real(_scaling_coeffs(flm, t, Ls, real=True))
    return CurveletCoeffs(p, "unrotated", scaling_sig, scales, multires, real=True)


def synthesize_real(c: CurveletCoeffs, t: Tiling) -> SphereSignal:
    """Synthesis matching analyze_real; returns a real-flagged signal."""
    p = t.params
    if not c.real:
        raise ValueError("synthesize_real requires real-flagged coefficients")
    if c.params != p:
        raise ValueError("coefficients were built for a different tiling")
    if c.frame != "unrotated":
        raise ValueError("synthesis needs unrotated coefficients; apply rotate_from_north first")
    L = p.band_limit
    acc = np.zeros(L * L, dtype=complex)
    for j in range(p.j_min, p.j_max + 1):
        sig = c.scale(j)
        expected = scale_band_limit(p, j) if c.multires else L
        if sig.grid.L != expected:
            raise ValueError(f"scale {j} stored at band limit {sig.grid.L}, expected {expected}")
        w = so3_forward_curvelet_real(sig)
        pos, neg = curvelet_harmonics(t, j)
        cc = w.band_limit - 1
        for ell in range(1, w.band_limit):
            if pos[ell] == 0.0 and neg[ell] == 0.0:
                continue
            acc[ell * ell : ell * ell + 2 * ell + 1] += (
                w.values[0, ell, cc - ell : cc + ell + 1] * pos[ell]
                + w.values[1, ell, cc - ell : cc + ell + 1] * neg[ell]
            )
    slm = sht_forward_real(c.scaling)
    for ell in range(slm.band_limit):
        amp = t.scaling[ell]
        if amp == 0.0:
            continue
        amp *= math.sqrt(4.0 * math.pi / (2 * ell + 1))
        acc[ell * ell : ell * ell + 2 * ell + 1] += amp * slm.degree_slice(ell)
    # Half-spectrum dust can leave the symmetry broken at the last digit;
    # re-impose it exactly before handing the coefficients on.
    for ell in range(L):
        row = acc[ell * ell : ell * ell + 2 * ell + 1]
        row[ell] = row[ell].real
        m = np.arange(1, ell + 1)
        row[ell - m] = np.where(m % 2 == 0, 1.0, -1.0) * np.conj(row[ell + m])
    return sht_inverse_real(HarmonicCoeffs(L, 0, acc, real=True))


def rotate_to_north(w: CurveletWignerCoeffs, j: int, t: Tiling) -> WignerCoeffs:
    """Move a scale's coefficients to the frame of the pole-centred function.

    The unrotated analysis function peaks along a ring of colatitude
    vartheta; rotating it onto the North pole densifies the coefficient
    planes, which is why this frame is for inspection rather than storage.
    """
    if not isinstance(w, CurveletWignerCoeffs):
        raise TypeError("rotate_to_north expects sparse coefficients")
    p = t.params
    if not p.j_min <= j <= p.j_max:
        raise ValueError(f"scale {j} outside [{p.j_min}, {p.j_max}]")
    theta = float(t.angles[j - p.j_min])
    L = w.band_limit
    dense = WignerCoeffs.zeros(L)
    c = L - 1
    for ell in range(L):
        dpos, dneg = wigner_d_edge_columns(ell, theta)
        plane = np.outer(w.values[0, ell, c - ell : c + ell + 1], dpos)
        if ell > 0:
            plane += np.outer(w.values[1, ell, c - ell : c + ell + 1], dneg)
        dense.planes[ell][:] = plane
    return dense


def rotate_from_north(w: WignerCoeffs, j: int, t: Tiling) -> CurveletWignerCoeffs:
    """Inverse of rotate_to_north; exact on its image."""
    if not isinstance(w, WignerCoeffs):
        raise TypeError("rotate_from_north expects dense coefficients")
    p = t.params
    if not p.j_min <= j <= p.j_max:
        raise ValueError(f"scale {j} outside [{p.j_min}, {p.j_max}]")
    theta = float(t.angles[j - p.j_min])
    L = w.band_limit
    out = CurveletWignerCoeffs.zeros(L)
    c = L - 1
    for ell in range(L):
        dpos, dneg = wigner_d_edge_columns(ell, theta)
        out.values[0, ell, c - ell : c + ell + 1] = w.planes[ell] @ dpos
        if ell > 0:
            out.values[1, ell, c - ell : c + ell + 1] = w.planes[ell] @ dneg
    return out


def analyze_north_validation(
    f: SphereSignal, t: Tiling, j: int, max_band_limit: int = 32
) -> SO3Signal:
    """Scale-j signal computed the slow way, through the dense frame.

    Builds the scale's coefficients, rotates them to the pole-centred
    frame and synthesises with the dense O(L^4) transform.  Exists purely
    to cross-check the fast path, hence the band-limit guard.
    """
    _check_signal(f, t)
    p = t.params
    if not p.j_min <= j <= p.j_max:
        raise ValueError(f"scale {j} outside [{p.j_min}, {p.j_max}]")
    Lj = scale_band_limit(p, j)
    if Lj > max_band_limit:
        raise ValueError(
            f"band limit {Lj} exceeds the dense validation cap {max_band_limit}"
        )
    flm = sht_forward(f)
    w = _scale_wigner(flm, t, j, Lj)
    dense = rotate_to_north(w, j, t)
    return so3_inverse_general(dense, SO3Grid(Lj, Lj, Lj))
