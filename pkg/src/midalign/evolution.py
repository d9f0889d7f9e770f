"""Time integration of the truncated mode system and growth-rate measurement."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BlowUp, RateWindowError
from .spectral import CollisionKernel, CouplingTable, FourierState, NoiseSpectrum

__all__ = ["Trajectory", "evolve", "measure_rate"]

BLOWUP_GUARD = 10.0


@dataclass(frozen=True)
class Trajectory:
    """Sampled mode history of one deterministic integration."""

    times: np.ndarray      # strictly increasing sample times
    modes: np.ndarray      # (n_samples, K+1); column 0 is identically 1
    kernel: CollisionKernel
    spectrum: NoiseSpectrum
    dt: float

    @property
    def K(self) -> int:
        return self.modes.shape[1] - 1

    def state_at(self, i: int) -> FourierState:
        return FourierState(self.modes[i].copy())

    @property
    def final_state(self) -> FourierState:
        return self.state_at(-1)

    def amplitude(self, k: int) -> np.ndarray:
        """Time series of a_k."""
        return self.modes[:, k]


def evolve(
    initial: FourierState,
    table: CouplingTable,
    dt: float = 0.01,
    t_end: float = 10.0,
    sample_every: float = 0.1,
) -> Trajectory:
    """Integrate da_k/dt with classical RK4 at fixed step dt.

    The linearized spectrum of this system is O(1), so an explicit scheme with
    dt <= 0.1 is comfortably stable.  a_0 is never touched.  Aborts with
    BlowUp if any |a_k| exceeds 10.
    """
    if dt <= 0.0 or dt > 0.1:
        raise ValueError("need 0 < dt <= 0.1")
    if initial.K != table.K:
        raise ValueError("initial state and table disagree on K")
    n_steps = max(1, round(t_end / dt))
    stride = max(1, round(sample_every / dt))

    a = initial.coeffs.copy()
    work = a.copy()
    samples = [a.copy()]
    times = [0.0]

    def deriv(y):
        work[1:] = y
        return table.rhs_vec(work)

    y = a[1:].copy()
    for step in range(1, n_steps + 1):
        k1 = deriv(y)
        k2 = deriv(y + 0.5 * dt * k1)
        k3 = deriv(y + 0.5 * dt * k2)
        k4 = deriv(y + dt * k3)
        y = y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if np.max(np.abs(y)) > BLOWUP_GUARD:
            raise BlowUp(f"|a_k| exceeded {BLOWUP_GUARD} at t={step * dt:.6g}", time=step * dt)
        if step % stride == 0 or step == n_steps:
            full = np.concatenate(([1.0], y))
            samples.append(full)
            times.append(step * dt)

    return Trajectory(
        times=np.asarray(times),
        modes=np.asarray(samples),
        kernel=table.kernel,
        spectrum=table.spectrum,
        dt=dt,
    )


def measure_rate(traj: Trajectory, k: int, window: tuple[float, float]) -> float:
    """Least-squares e-folding rate of log |a_k(t)| over the given time window.

    Valid only in the linear regime: every sampled amplitude in the window
    must lie in [1e-8, 1e-2] and keep its sign, otherwise RateWindowError.
    """
    t0, t1 = window
    mask = (traj.times >= t0 - 1e-12) & (traj.times <= t1 + 1e-12)
    if mask.sum() < 3:
        raise RateWindowError("fewer than 3 samples inside the window")
    t = traj.times[mask]
    vals = traj.amplitude(k)[mask]
    amps = np.abs(vals)
    if amps.min() < 1e-8 or amps.max() > 1e-2:
        raise RateWindowError(
            f"mode {k} amplitude left the linear regime "
            f"[{amps.min():.3g}, {amps.max():.3g}]"
        )
    if np.any(vals > 0) and np.any(vals < 0):
        raise RateWindowError(f"mode {k} crosses zero inside the window")
    slope, _ = np.polyfit(t, np.log(amps), 1)
    return float(slope)
