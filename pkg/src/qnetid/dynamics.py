"""Closed-system network dynamics in the density-operator picture.

The state rho obeys d/dt rho = -(i/hbar) [H, rho] and is propagated
exactly through the eigendecomposition of the (time-independent)
Hermitian H: one decomposition per trajectory, unitary conjugation per
sample.  The module also builds the vectorized generator
L = -(i/hbar) (I kron H - H^T kron I), samples uniform-grid trajectories,
and provides a closed-form time integral of rho as an oracle for
quadrature-based estimates.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import hermitize, kron, vec

#: tolerated negative eigenvalue on density operators (round-off slack)
PSD_TOL = 1e-10
#: tolerated trace deviation on density operators
TRACE_TOL = 1e-10
#: |omega * tau| below this uses the linear-in-tau limit of the
#: oscillatory integral (removable singularity of the ratio formula)
OMEGA_TAU_TOL = 1e-8


def check_density(rho: np.ndarray, name: str = "rho") -> np.ndarray:
    """Validate Hermiticity, positive semidefiniteness and unit trace.

    Returns the symmetrized matrix; raises ValueError describing the
    violated property otherwise.
    """
    rho = hermitize(np.asarray(rho, dtype=complex))
    tr = float(np.trace(rho).real)
    if abs(tr - 1.0) > TRACE_TOL:
        raise ValueError(f"{name} has trace {tr!r}, expected 1")
    wmin = float(np.linalg.eigvalsh(rho)[0])
    if wmin < -PSD_TOL:
        raise ValueError(f"{name} is not positive semidefinite (min eig {wmin:.3e})")
    return rho


@dataclass(frozen=True)
class Trajectory:
    """Uniformly sampled density-operator trajectory on [0, tau].

    times[k] = k * dt, times[0] = 0, times[-1] = tau; states[k] is the
    d x d density operator at times[k].
    """

    times: np.ndarray   # (n_s + 1,)
    states: np.ndarray  # (n_s + 1, d, d)

    @property
    def dim(self) -> int:
        return self.states.shape[1]

    @property
    def dt(self) -> float:
        return float(self.times[1] - self.times[0])

    @property
    def tau(self) -> float:
        return float(self.times[-1])

    @property
    def n_samples(self) -> int:
        """Number of sampling intervals n_s (so len(times) == n_s + 1)."""
        return len(self.times) - 1


def liouvillian(h: np.ndarray, hbar: float = 1.0) -> np.ndarray:
    """Vectorized generator L = -(i/hbar) (I kron H - H^T kron I).

    Under column stacking, L @ vec(rho) = vec(-(i/hbar) [H, rho]).
    L is skew-Hermitian by construction.
    """
    if hbar <= 0:
        raise ValueError("hbar must be positive")
    h = hermitize(h)
    d = h.shape[0]
    eye = np.eye(d)
    return (-1j / hbar) * (kron(eye, h) - kron(h.T, eye))


def unitary_conjugate(h: np.ndarray, x: np.ndarray, t: float, hbar: float = 1.0) -> np.ndarray:
    """Evolve an arbitrary matrix X by U X U† with U = exp(-i H t / hbar).

    This is the linear extension of the state propagation to matrices
    that need not be valid density operators (used e.g. to evolve the
    terms of a basis-element decomposition); no state validation is done.
    """
    w, v = np.linalg.eigh(hermitize(h))
    phase = np.exp(-1j * w * (t / hbar))
    xt = v.conj().T @ np.asarray(x, dtype=complex) @ v
    return v @ (np.outer(phase, phase.conj()) * xt) @ v.conj().T


def propagate(h: np.ndarray, rho0: np.ndarray, t: float, hbar: float = 1.0) -> np.ndarray:
    """Propagate a density operator: rho_t = U rho_0 U†.

    Exact for time-independent H (no step-size error); preserves trace,
    Hermiticity and the spectrum of rho_0.
    """
    if t < 0:
        raise ValueError("t must be nonnegative")
    rho0 = check_density(rho0, "rho0")
    rho_t = unitary_conjugate(h, rho0, t, hbar)
    return 0.5 * (rho_t + rho_t.conj().T)


def sample_trajectory(
    h: np.ndarray, rho0: np.ndarray, tau: float, dt: float, hbar: float = 1.0
) -> Trajectory:
    """Sample rho_t on the uniform grid t_k = k*dt, k = 0..tau/dt.

    tau/dt must be an integer; a single eigendecomposition of H is reused
    for every sample.
    """
    if tau <= 0:
        raise ValueError("tau must be positive")
    if dt <= 0:
        raise ValueError("dt must be positive")
    n_float = tau / dt
    n = int(round(n_float))
    if n < 1 or abs(n_float - n) > 1e-9 * max(1.0, n_float):
        raise ValueError(f"tau/dt = {n_float!r} is not a positive integer")
    rho0 = check_density(rho0, "rho0")
    h = hermitize(h)
    d = h.shape[0]
    if rho0.shape != (d, d):
        raise ValueError(f"rho0 shape {rho0.shape} does not match H dimension {d}")
    w, v = np.linalg.eigh(h)
    rho_eig = v.conj().T @ rho0 @ v
    times = np.arange(n + 1) * dt
    states = np.empty((n + 1, d, d), dtype=complex)
    states[0] = rho0  # the t = 0 propagator is the identity, exactly
    for k in range(1, n + 1):
        phase = np.exp(-1j * w * (times[k] / hbar))
        st = v @ (np.outer(phase, phase.conj()) * rho_eig) @ v.conj().T
        states[k] = 0.5 * (st + st.conj().T)
    times[-1] = tau  # kill accumulated grid round-off at the endpoint
    return Trajectory(times=times, states=states)


def exact_gram(h: np.ndarray, rho0: np.ndarray, tau: float, hbar: float = 1.0) -> np.ndarray:
    """Closed form of the time integral of rho_t over [0, tau].

    In the eigenbasis of H the integrand factorizes mode by mode:
    entry (j, k) integrates to rho~_jk * (exp(-i w_jk tau) - 1)/(-i w_jk)
    with w_jk = (lambda_j - lambda_k)/hbar, and to rho~_jk * tau on the
    degenerate frequencies.  Serves as the quadrature-free oracle for
    trapezoid-based estimates.
    """
    if tau <= 0:
        raise ValueError("tau must be positive")
    rho0 = check_density(rho0, "rho0")
    w, v = np.linalg.eigh(hermitize(h))
    rho_eig = v.conj().T @ rho0 @ v
    omega = (w[:, None] - w[None, :]) / hbar
    small = np.abs(omega * tau) < OMEGA_TAU_TOL
    omega_safe = np.where(small, 1.0, omega)
    factor = np.where(small, tau, (np.exp(-1j * omega * tau) - 1.0) / (-1j * omega_safe))
    p = v @ (rho_eig * factor) @ v.conj().T
    return 0.5 * (p + p.conj().T)


# ---------------------------------------------------------------------------
# trajectory CSV: header t, re_1_1, im_1_1, re_2_1, im_2_1, ... in
# column-major (i, j) order; one row per sample; 17 significant digits
# ---------------------------------------------------------------------------

def _entry_order(d: int):
    return [(i, j) for j in range(d) for i in range(d)]


def write_trajectory_csv(traj: Trajectory, path) -> None:
    d = traj.dim
    cols = ["t"]
    for i, j in _entry_order(d):
        cols.append(f"re_{i + 1}_{j + 1}")
        cols.append(f"im_{i + 1}_{j + 1}")
    with open(path, "w", newline="") as fh:
        fh.write(",".join(cols) + "\n")
        for t, st in zip(traj.times, traj.states):
            row = [f"{t:.17g}"]
            for i, j in _entry_order(d):
                row.append(f"{st[i, j].real:.17g}")
                row.append(f"{st[i, j].imag:.17g}")
            fh.write(",".join(row) + "\n")


def read_trajectory_csv(path) -> Trajectory:
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        if not header or header[0] != "t" or (len(header) - 1) % 2 != 0:
            raise ValueError("malformed trajectory CSV header")
        d = int(round(np.sqrt((len(header) - 1) / 2)))
        if 2 * d * d + 1 != len(header):
            raise ValueError("trajectory CSV header does not describe a square matrix")
        times = []
        states = []
        for line in fh:
            line = line.strip()
            if not line:
                continue
            vals = [float(x) for x in line.split(",")]
            if len(vals) != len(header):
                raise ValueError("trajectory CSV row length mismatch")
            times.append(vals[0])
            flat = np.asarray(vals[1::2]) + 1j * np.asarray(vals[2::2])
            states.append(flat.reshape((d, d), order="F"))
    if len(times) < 2:
        raise ValueError("trajectory CSV needs at least two samples")
    return Trajectory(times=np.asarray(times), states=np.asarray(states))
