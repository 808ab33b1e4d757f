"""Batched statevector kernels.

A batch is a ``(P, C, D)`` complex array: ``P`` circuits (one per
individual), ``C`` states per circuit (one per test case) and ``D = 2**n``
amplitudes.  Circuit ``p`` is described by per-gene rows of ``kinds``,
``targets``, ``controls`` (-1 = uncontrolled) and 2x2 ``mats``.  Every
oracle gene applies the monomial map ``psi'[i] = phases[c, i] * psi[perms[c, i]]``
of test case ``c``.

Two interchangeable implementations exist: a numba loop kernel and a
vectorized numpy kernel.  ``evolve_states`` picks one according to
:data:`qaevo._accel.USE_NUMBA`.
"""
from __future__ import annotations

import numpy as np

from . import _accel
from .gates import PARAMETERIZED, GateKind, base_matrix

IDENTITY_CODE = int(GateKind.IDENTITY)
ORACLE_CODE = int(GateKind.ORACLE)

_FIXED_TABLE = np.zeros((len(GateKind), 2, 2), dtype=np.complex128)
for _k in GateKind:
    if _k not in PARAMETERIZED and _k != GateKind.ORACLE:
        _FIXED_TABLE[int(_k)] = base_matrix(_k)
_FIXED_TABLE[ORACLE_CODE] = np.eye(2)
_ROT = {
    axis: np.array([int(k) for k in PARAMETERIZED if k.name.endswith(axis)])
    for axis in ("X", "Y", "Z")
}


def gene_matrices(kinds: np.ndarray, angles: np.ndarray) -> np.ndarray:
    """2x2 target matrices for arrays of genes; shape ``kinds.shape + (2, 2)``."""
    mats = _FIXED_TABLE[kinds].copy()
    c = np.cos(angles / 2)
    s = np.sin(angles / 2)
    rx = np.isin(kinds, _ROT["X"])
    ry = np.isin(kinds, _ROT["Y"])
    rz = np.isin(kinds, _ROT["Z"])
    if rx.any():
        mats[rx] = np.stack(
            [np.stack([c[rx], -1j * s[rx]], -1), np.stack([-1j * s[rx], c[rx]], -1)], -2
        )
    if ry.any():
        mats[ry] = np.stack([np.stack([c[ry], -s[ry]], -1), np.stack([s[ry], c[ry]], -1)], -2)
    if rz.any():
        zero = np.zeros_like(c[rz])
        mats[rz] = np.stack(
            [np.stack([c[rz] - 1j * s[rz], zero], -1), np.stack([zero, c[rz] + 1j * s[rz]], -1)],
            -2,
        )
    return mats


@_accel.njit
def _evolve_states_numba(states, kinds, targets, controls, mats, perms, phases, num_qubits):
    n_pop, n_genes = kinds.shape
    n_cases, dim = perms.shape
    buf = np.empty(dim, dtype=np.complex128)
    for p in range(n_pop):
        for c in range(n_cases):
            psi = states[p, c]
            for g in range(n_genes):
                kind = kinds[p, g]
                if kind == IDENTITY_CODE:
                    continue
                if kind == ORACLE_CODE:
                    for i in range(dim):
                        buf[i] = phases[c, i] * psi[perms[c, i]]
                    for i in range(dim):
                        psi[i] = buf[i]
                    continue
                tbit = 1 << (num_qubits - 1 - targets[p, g])
                cbit = 0
                if controls[p, g] >= 0:
                    cbit = 1 << (num_qubits - 1 - controls[p, g])
                m00 = mats[p, g, 0, 0]
                m01 = mats[p, g, 0, 1]
                m10 = mats[p, g, 1, 0]
                m11 = mats[p, g, 1, 1]
                for i in range(dim):
                    if i & tbit:
                        continue
                    if cbit and not (i & cbit):
                        continue
                    j = i | tbit
                    a0 = psi[i]
                    a1 = psi[j]
                    psi[i] = m00 * a0 + m01 * a1
                    psi[j] = m10 * a0 + m11 * a1
    return states


def _evolve_states_numpy(states, kinds, targets, controls, mats, perms, phases, num_qubits):
    n_pop, n_genes = kinds.shape
    dim = perms.shape[1]
    idx = np.arange(dim)
    rows = np.arange(n_pop)[:, None]
    for g in range(n_genes):
        kind = kinds[:, g]
        tbit = 1 << (num_qubits - 1 - targets[:, g])
        bit = ((idx[None, :] & tbit[:, None]) != 0).astype(np.int64)
        partner = idx[None, :] ^ tbit[:, None]
        m = mats[:, g]
        diag = m[rows, bit, bit]
        off = m[rows, bit, 1 - bit]
        gathered = np.take_along_axis(
            states, np.broadcast_to(partner[:, None, :], states.shape), axis=2
        )
        new = diag[:, None, :] * states + off[:, None, :] * gathered
        ctl = controls[:, g]
        cbit = np.where(ctl >= 0, 1 << (num_qubits - 1 - np.maximum(ctl, 0)), 0)
        active = (cbit[:, None] == 0) | ((idx[None, :] & cbit[:, None]) != 0)
        active &= ((kind != IDENTITY_CODE) & (kind != ORACLE_CODE))[:, None]
        states = np.where(active[:, None, :], new, states)
        oracle = kind == ORACLE_CODE
        if oracle.any():
            sub = states[oracle]
            sub = phases[None] * np.take_along_axis(
                sub, np.broadcast_to(perms[None], sub.shape), axis=2
            )
            states[oracle] = sub
    return states


def evolve_states(states, kinds, targets, controls, mats, perms, phases, num_qubits, backend=None):
    """Apply each circuit to its batch of states; returns the evolved batch.

    ``backend`` is ``"numba"``, ``"numpy"`` or None (environment default).
    The input array may be modified in place.
    """
    if backend is None:
        backend = "numba" if _accel.USE_NUMBA else "numpy"
    args = (
        np.ascontiguousarray(states, dtype=np.complex128),
        np.ascontiguousarray(kinds, dtype=np.int64),
        np.ascontiguousarray(targets, dtype=np.int64),
        np.ascontiguousarray(controls, dtype=np.int64),
        np.ascontiguousarray(mats, dtype=np.complex128),
        np.ascontiguousarray(perms, dtype=np.int64),
        np.ascontiguousarray(phases, dtype=np.complex128),
        int(num_qubits),
    )
    if backend == "numba":
        if not _accel.HAS_NUMBA:
            raise RuntimeError("numba backend requested but numba is not installed")
        return _evolve_states_numba(*args)
    if backend == "numpy":
        return _evolve_states_numpy(*args)
    raise ValueError(f"unknown backend {backend!r}")


def zero_states(n_pop: int, n_cases: int, dim: int) -> np.ndarray:
    states = np.zeros((n_pop, n_cases, dim), dtype=np.complex128)
    states[:, :, 0] = 1.0
    return states
