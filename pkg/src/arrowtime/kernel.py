"""Discretization of the forward/backward arrow operators and their traces.

The operators share one singular kernel, 1/(E - E' +- i0+), split by the
Sokhotski-Plemelj formula into a principal-value part and a delta part with
coefficient 1/2.  Discretely the principal value becomes a skip-diagonal
Cauchy matrix which is exactly antisymmetric once quadrature weights are
folded in on both sides; that antisymmetry makes expectation values real and
the forward/backward completeness identity exact at the matrix level.

Expectation values additionally carry a diagonal-cell correction: the
evolved kernel integrated exactly over each quadrature cell contributes
-(1/2pi) w_i gamma(w_i t) per node, with gamma built from the sine integral.
Without it the skip-diagonal rule drifts linearly in t; with it the discrete
forward trace has derivative -(1/2pi)|sum_i w_i psi_i(t)|^2 per channel, so
monotonicity holds to roundoff.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from scipy.special import sici

from .grids import ChannelState, EnergyGrid

Orientation = Literal["forward", "backward"]

REALITY_TOL = 1e-8
MONOTONICITY_STEP_TOL = 1e-9
TRACE_BOUND_TOL = 1e-8
TRACE_COMPLETENESS_TOL = 1e-10

__all__ = [
    "SingularKernel",
    "LyapunovTrace",
    "MonotonicityError",
    "build_kernel",
    "mf_expectation",
    "mb_expectation",
    "expectation_trace",
    "lyapunov_trace",
    "completeness_defect",
    "mpc_commutator_defect",
]


class MonotonicityError(RuntimeError):
    """Raised when a forward trace increases beyond the per-step tolerance.

    Attributes
    ----------
    violations : list of (index, t_left, t_right, increase)
    """

    def __init__(self, violations):
        self.violations = violations
        worst = max(v[3] for v in violations)
        super().__init__(
            f"forward trace increased at {len(violations)} step(s); worst increase {worst:.3e}"
        )


def _cauchy_offdiag_apply(nodes: np.ndarray, z: np.ndarray, block: int = 2048) -> np.ndarray:
    """S_i = sum_{i' != i} z_{i'} / (nodes_i - nodes_{i'}) for columns of z."""
    squeeze = z.ndim == 1
    if squeeze:
        z = z[:, None]
    zr = np.ascontiguousarray(z.real)
    zi = np.ascontiguousarray(z.imag)
    n = nodes.size
    out = np.empty((n, z.shape[1]), dtype=complex)
    for a in range(0, n, block):
        b = min(a + block, n)
        diff = nodes[a:b, None] - nodes[None, :]
        rng = np.arange(a, b)
        diff[rng - a, rng] = 1.0
        rec = 1.0 / diff
        rec[rng - a, rng] = 0.0
        out[a:b] = rec @ zr + 1j * (rec @ zi)
    return out[:, 0] if squeeze else out


def _gamma_cell(x: np.ndarray) -> np.ndarray:
    """2 Si(x) - 2(1 - cos x)/x: exact cell average of the evolved diagonal.

    Odd in x, ~ x - x^3/36 near zero, saturating at +-pi for large |x|.
    """
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    small = np.abs(x) < 1e-4
    xs = x[small]
    out[small] = xs - xs**3 / 36.0
    xl = x[~small]
    si = sici(xl)[0]
    out[~small] = 2.0 * si - 2.0 * (1.0 - np.cos(xl)) / xl
    return out


@dataclass(frozen=True, eq=False)
class SingularKernel:
    """Discrete Plemelj split of one orientation of the arrow kernel.

    pv_row_sums holds the skip-diagonal quadrature of the Cauchy kernel,
    sum_{i' != i} w_{i'} / (E_i - E_{i'}); endpoint_log holds the analytic
    principal-value integral of 1/(E_i - E') over the grid interval,
    ln((E_i - E_min)/(E_max - E_i)), zeroed at the two boundary nodes where
    it is undefined.  Their difference is the regularized-subtraction
    diagonal used by apply().
    """

    grid: EnergyGrid
    orientation: Orientation
    pv_row_sums: np.ndarray
    endpoint_log: np.ndarray

    delta_coefficient: float = field(default=0.5, init=False)

    @property
    def pv_matrix(self) -> np.ndarray:
        """Dense principal-value matrix w_i w_j / (E_i - E_j), zero diagonal.

        Weights are folded in on both sides, which keeps the matrix exactly
        antisymmetric on nonuniform grids.  Materialized on demand; intended
        for inspection and for modest grid sizes.
        """
        e = self.grid.nodes
        diff = e[:, None] - e[None, :]
        np.fill_diagonal(diff, 1.0)
        mat = (self.grid.weights[:, None] * self.grid.weights[None, :]) / diff
        np.fill_diagonal(mat, 0.0)
        return mat

    def apply(self, amplitudes: np.ndarray) -> np.ndarray:
        """Act on a channel amplitude vector.

        Forward orientation:
            (K v)_i = v_i / 2
                      - (1/2 pi i) sum_{i' != i} w_{i'} (v_{i'} - v_i)/(E_i - E_{i'})
                      - (1/2 pi i) v_i L_i
        with L_i the analytic endpoint integral.  The backward kernel is the
        complex conjugate, so forward + backward acts as the identity exactly.
        """
        v = np.asarray(amplitudes, dtype=complex)
        s = _cauchy_offdiag_apply(self.grid.nodes, self.grid.weights * v)
        pv = s - v * self.pv_row_sums + v * self.endpoint_log
        sign = 1.0 if self.orientation == "forward" else -1.0
        return 0.5 * v + sign * (1j / (2.0 * np.pi)) * pv

    def conjugate(self) -> "SingularKernel":
        other = "backward" if self.orientation == "forward" else "forward"
        return SingularKernel(self.grid, other, self.pv_row_sums, self.endpoint_log)


def build_kernel(grid: EnergyGrid, orientation: Orientation = "forward") -> SingularKernel:
    if orientation not in ("forward", "backward"):
        raise ValueError(f"unknown orientation: {orientation!r}")
    rows = _cauchy_offdiag_apply(grid.nodes, grid.weights.astype(complex)).real
    ell = np.zeros(grid.n)
    ell[1:-1] = np.log((grid.nodes[1:-1] - grid.nodes[0]) / (grid.nodes[-1] - grid.nodes[1:-1]))
    rows.setflags(write=False)
    ell.setflags(write=False)
    return SingularKernel(grid, orientation, rows, ell)


def _forward_values(state: ChannelState, times: np.ndarray) -> np.ndarray:
    """Forward expectation at each time via the Hermitian quadratic form."""
    grid = state.grid
    e, w = grid.nodes, grid.weights
    times = np.asarray(times, dtype=float)
    norm2 = state.norm_squared()
    vals = np.full(times.shape, 0.5 * norm2)
    # diagonal-cell correction, shared across channels
    cell = np.zeros(times.size)
    pv_imag = np.zeros(times.size)
    reality = 0.0
    for row in state.amplitudes:
        z = (w * row)[:, None] * np.exp(-1j * np.outer(e, times))
        s = _cauchy_offdiag_apply(e, z)
        pv = np.sum(np.conj(z) * s, axis=0)
        pv_imag += pv.imag
        reality = max(reality, float(np.max(np.abs(pv.real), initial=0.0)))
        cell += np.sum((w * np.abs(row) ** 2)[:, None] * _gamma_cell(np.outer(w, times)), axis=0)
    if reality / (2.0 * np.pi) > REALITY_TOL:
        raise RuntimeError(
            "expectation value acquired an imaginary part "
            f"({reality / (2.0 * np.pi):.3e}); the antisymmetric kernel is broken"
        )
    return vals - pv_imag / (2.0 * np.pi) - cell / (2.0 * np.pi)


def expectation_trace(
    state: ChannelState, times, orientation: Orientation = "forward"
) -> np.ndarray:
    """Vectorized expectation values over many times (one kernel pass)."""
    times = np.atleast_1d(np.asarray(times, dtype=float))
    fwd = _forward_values(state, times)
    if orientation == "forward":
        return fwd
    if orientation == "backward":
        return state.norm_squared() - fwd
    raise ValueError(f"unknown orientation: {orientation!r}")


def mf_expectation(state: ChannelState, t: float) -> float:
    """<psi(t)| M_F |psi(t)> for the forward arrow operator."""
    return float(expectation_trace(state, [t], "forward")[0])


def mb_expectation(state: ChannelState, t: float) -> float:
    """<psi(t)| M_B |psi(t)>; complements mf_expectation exactly."""
    return float(expectation_trace(state, [t], "backward")[0])


@dataclass(frozen=True, eq=False)
class LyapunovTrace:
    """Sampled forward/backward expectation values along strictly increasing times."""

    times: np.ndarray
    mf_values: np.ndarray
    mb_values: np.ndarray
    norm_squared: float

    def __post_init__(self):
        for name in ("times", "mf_values", "mb_values"):
            a = np.asarray(getattr(self, name), dtype=float)
            a.setflags(write=False)
            object.__setattr__(self, name, a)
        if self.times.size == 0:
            return
        if np.any(np.diff(self.times) <= 0.0):
            raise ValueError("times must be strictly increasing")
        scale = max(1.0, self.norm_squared)
        for vals in (self.mf_values, self.mb_values):
            if np.min(vals) < -TRACE_BOUND_TOL * scale or np.max(vals) > self.norm_squared + TRACE_BOUND_TOL * scale:
                raise ValueError("trace values escape [0, norm^2] beyond tolerance")
        defect = np.max(np.abs(self.mf_values + self.mb_values - self.norm_squared))
        if defect > TRACE_COMPLETENESS_TOL * scale:
            raise ValueError(f"forward + backward completeness defect {defect:.3e}")


def lyapunov_trace(state: ChannelState, times) -> LyapunovTrace:
    """Sample both arrow expectations; reject non-monotone forward traces.

    A forward step increasing by more than MONOTONICITY_STEP_TOL raises
    MonotonicityError carrying per-step diagnostics rather than returning a
    silently unphysical trace.
    """
    times = np.atleast_1d(np.asarray(times, dtype=float))
    if times.size and np.any(np.diff(times) <= 0.0):
        raise ValueError("times must be strictly increasing")
    if times.size == 0:
        empty = np.array([])
        return LyapunovTrace(empty, empty.copy(), empty.copy(), state.norm_squared())
    mf = _forward_values(state, times)
    norm2 = state.norm_squared()
    trace = LyapunovTrace(times, mf, norm2 - mf, norm2)
    steps = np.diff(mf)
    bad = np.nonzero(steps > MONOTONICITY_STEP_TOL)[0]
    if bad.size:
        raise MonotonicityError(
            [(int(i), float(times[i]), float(times[i + 1]), float(steps[i])) for i in bad]
        )
    return trace


def completeness_defect(state: ChannelState, t: float) -> float:
    """<M_F> + <M_B> - norm^2; identically zero by kernel antisymmetry."""
    return mf_expectation(state, t) + mb_expectation(state, t) - state.norm_squared()


def mpc_commutator_defect(state: ChannelState) -> tuple[float, float]:
    """Expected decrease rate and its incompatibility with the arrow operator.

    The rate operator D = -i[H, M_F] of the discrete evolved trace is the
    per-channel rank-one form <psi|D|psi> = (1/2pi) |sum_i w_i psi_i|^2,
    manifestly nonnegative and equal to -d<M_F>/dt at t = 0.  The returned
    noncommutativity is the spectral norm of [M_F, D] in symmetrized
    coordinates; it is strictly positive on generic grids, which is the
    failure of the measurement-compatibility assumption.
    """
    grid = state.grid
    w = grid.weights
    d_expect = sum(
        float(np.abs(np.sum(w * row)) ** 2) for row in state.amplitudes
    ) / (2.0 * np.pi)

    # D is rank one per channel, (1/2pi)|u><u| with u = sqrt(w) in symmetrized
    # coordinates, so [M_F, D] = (1/2pi)(|a><u| - |u><a|) with a = M_F u lives
    # in span{u, a}; its spectral norm follows from the 2x2 restriction.
    sw = np.sqrt(w)
    a = 0.5 * sw + (1j / (2.0 * np.pi)) * sw * _cauchy_offdiag_apply(
        grid.nodes, (sw * sw).astype(complex)
    )
    uu = float(np.vdot(sw, sw).real)
    aa = float(np.vdot(a, a).real)
    ua = complex(np.vdot(sw, a))
    trace = ua - np.conj(ua)
    det = uu * aa - abs(ua) ** 2
    eigs = np.roots([1.0, -trace, det])
    noncomm = float(np.max(np.abs(eigs))) / (2.0 * np.pi)
    return d_expect, noncomm
