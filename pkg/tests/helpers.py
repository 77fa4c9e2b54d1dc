"""Independent numerical oracles shared across the test suite.

Everything here recomputes expected values through a different algorithm
than the library uses (direct series with log-factorials, dense matrix
exponentials), so agreement is evidence rather than restatement.
"""

import math

import numpy as np
import scipy.linalg


def coherent_amplitudes_direct(alpha, cutoff: int) -> np.ndarray:
    """``e^{-|a|^2/2} a^n / sqrt(n!)`` evaluated per term in log space."""
    alpha = complex(alpha)
    out = np.zeros(cutoff, dtype=complex)
    mag = abs(alpha)
    if mag == 0.0:
        out[0] = 1.0
        return out
    phase = alpha / mag
    for n in range(cutoff):
        logmag = -0.5 * mag * mag + n * math.log(mag) - 0.5 * math.lgamma(n + 1)
        out[n] = math.exp(logmag) * phase**n
    return out


def poisson_mass(abs_alpha: float, start: int, stop: int) -> float:
    """Photon-count mass of |alpha> between ``start`` (incl) and ``stop`` (excl)."""
    lam = abs_alpha * abs_alpha
    if lam == 0.0:
        return 1.0 if start <= 0 < stop else 0.0
    total = 0.0
    for n in range(start, stop):
        total += math.exp(-lam + n * math.log(lam) - math.lgamma(n + 1))
    return total


def annihilation(n: int) -> np.ndarray:
    a = np.zeros((n, n), dtype=complex)
    a[np.arange(n - 1), np.arange(1, n)] = np.sqrt(np.arange(1, n))
    return a


def dense_bs_unitary(r: float, na: int, nb: int) -> np.ndarray:
    """Beam splitter as one dense matrix exponential on the product space.

    Generator ``zeta (a+ b + a b+)`` with ``zeta = atan2(r, t)`` reproduces the
    label map (t alpha, i r alpha); rows/columns index ``m * nb + k``.
    """
    t = math.sqrt(1.0 - r * r)
    zeta = math.atan2(r, t)
    a = annihilation(na)
    b = annihilation(nb)
    big_a = np.kron(a, np.eye(nb))
    big_b = np.kron(np.eye(na), b)
    gen = big_a.conj().T @ big_b + big_a @ big_b.conj().T
    return scipy.linalg.expm(1j * zeta * gen)


def two_mode_vec(state) -> np.ndarray:
    """Flatten a TwoModeState to the vector the dense oracle acts on."""
    return state.amplitudes.reshape(-1)


def random_two_mode(rng, na: int, nb: int, support: int):
    """Normalized random state with occupation limited to ``support`` levels."""
    from catvis import TwoModeState

    amps = np.zeros((na, nb), dtype=complex)
    block = rng.standard_normal((support, support)) + 1j * rng.standard_normal(
        (support, support)
    )
    amps[:support, :support] = block
    amps /= np.linalg.norm(amps)
    return TwoModeState(amps)


def random_mode(rng, cutoff: int, support: int):
    from catvis import ModeState

    amps = np.zeros(cutoff, dtype=complex)
    amps[:support] = rng.standard_normal(support) + 1j * rng.standard_normal(support)
    amps /= np.linalg.norm(amps)
    return ModeState(amps)
