"""Independent reference computations used by the test-suite.

Nothing here goes through the package's gate networks or optimizer.
"""

from __future__ import annotations

import cmath
import math
from decimal import Decimal, getcontext

import numpy as np

X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)


def sigma_n(theta: float, phi: float) -> np.ndarray:
    return (
        math.sin(theta) * math.cos(phi) * X
        + math.sin(theta) * math.sin(phi) * Y
        + math.cos(theta) * Z
    )


def pauli_expectation(psi: np.ndarray, a: np.ndarray, b: np.ndarray) -> float:
    """<psi| a x b |psi> by direct matrix evaluation."""
    return float(np.real(np.vdot(psi, np.kron(a, b) @ psi)))


def imperfect_singlet(alpha: float) -> np.ndarray:
    """|Psi^-> + e^{i alpha/2} cos(alpha/2) |1>(|0> - |1>)/sqrt(2), written out by hand."""
    s = 1 / math.sqrt(2)
    singlet = np.array([0, s, -s, 0], dtype=complex)
    extra = cmath.exp(0.5j * alpha) * math.cos(alpha / 2) * np.array([0, 0, s, -s])
    return singlet + extra


def chsh_grid_max(alpha: float, n: int = 96) -> float:
    """max S over an n-point grid for a', b, b' with a = 0 (values depend only on differences)."""
    psi = imperfect_singlet(alpha)
    t = np.arange(n) * (2 * math.pi / n)
    # P(t1, t2) table over all grid pairs
    tyy, tyz, tzy, tzz = (
        pauli_expectation(psi, p, q) for p in (Y, Z) for q in (Y, Z)
    )
    s, c = np.sin(t), np.cos(t)
    corr = np.outer(s, tyy * s + tyz * c) + np.outer(c, tzy * s + tzz * c)
    p_ab = corr[0][:, None, None]  # b
    p_a2b = corr[:, :].T[:, :, None]  # [b, a2]
    p_a2b2 = corr[None, :, :]  # [a2, b2]
    p_ab2 = corr[0][None, None, :]  # b2
    total = p_ab + p_a2b + p_a2b2 - p_ab2
    return float(total.max())


def hand_wave_vector(energy_mev: str, mass_ratio: str) -> float:
    """sqrt(2 m* E)/hbar in nm^-1 with 40-digit decimal arithmetic."""
    getcontext().prec = 40
    hbar = Decimal("658.2119569")
    m_e = Decimal("5685.630")
    k = (2 * Decimal(mass_ratio) * m_e * Decimal(energy_mev)).sqrt() / hbar
    return float(k)


def si_wave_vector(energy_mev: float, mass_ratio: float) -> float:
    from scipy import constants as sc

    e = energy_mev * 1e-3 * sc.electron_volt
    return math.sqrt(2 * mass_ratio * sc.electron_mass * e) / sc.hbar * 1e-9


def transmission_square_region(k_out: float, k_in: float, width: float) -> complex:
    """Transmission amplitude through a constant-potential slab, by transfer matrices.

    Plane waves A e^{ikx} + B e^{-ikx} in each region; continuity of psi and
    psi' at x = 0 and x = width. Equal effective mass everywhere.
    """

    def basis(k: float, x: float) -> np.ndarray:
        # columns: (psi, psi') of e^{ikx} and e^{-ikx}
        ep, em = cmath.exp(1j * k * x), cmath.exp(-1j * k * x)
        return np.array([[ep, em], [1j * k * ep, -1j * k * em]])

    m = np.linalg.solve(basis(k_in, 0.0), basis(k_out, 0.0))
    m = np.linalg.solve(basis(k_out, width), basis(k_in, width)) @ m
    # incoming (1, r) on the left maps to (t, 0) on the right
    r = -m[1, 0] / m[1, 1]
    return m[0, 0] + m[0, 1] * r
