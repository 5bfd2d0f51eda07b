"""Ancilla-assisted and non-destructive measurement protocols.

``hadamard_test`` reads off Re/Im Tr(S U rho) with one ancilla. The
product-measurement helpers reconstruct Tr(S G rho) for a self-inverse G
without any controlled gates: projecting onto the (I +/- G)/2 eigenspaces
recovers the anticommutator half, and conjugating by the rotations
exp(+/- i pi G / 4) recovers the commutator half.
"""

from __future__ import annotations

import numpy as np

from .circuits import HADAMARD, PAULI_X, PAULI_Y
from .linalg import as_matrix
from .observables import PauliObservable

_UNITARY_ATOL = 1e-10
_INVOLUTION_ATOL = 1e-10

_P0 = np.array([[1.0, 0.0], [0.0, 0.0]], dtype=complex)
_P1 = np.array([[0.0, 0.0], [0.0, 1.0]], dtype=complex)


def _obs_matrix(observable) -> np.ndarray:
    if isinstance(observable, PauliObservable):
        return observable.matrix()
    return np.asarray(observable, dtype=complex)


def hadamard_test(unitary: np.ndarray, companion, state, part: str = "real") -> float:
    """One-ancilla estimate of Re or Im of Tr(S U rho).

    Builds the ancilla circuit explicitly: ancilla in |0>, Hadamard,
    controlled-U onto the register, then the X (real part) or Y
    (imaginary part) ancilla readout taken jointly with the companion
    observable S on the register.
    """
    if part not in ("real", "imag"):
        raise ValueError(f"part must be 'real' or 'imag', got {part!r}")
    u = np.asarray(unitary, dtype=complex)
    rho = as_matrix(state)
    s = _obs_matrix(companion)
    d = rho.shape[0]
    if u.shape != (d, d) or s.shape != (d, d):
        raise ValueError(
            f"dimension mismatch: state {rho.shape}, unitary {u.shape}, companion {s.shape}"
        )
    dev = float(np.max(np.abs(u.conj().T @ u - np.eye(d))))
    if dev > _UNITARY_ATOL:
        raise ValueError(f"matrix is not unitary: |U^dag U - I| = {dev:.3e}")
    composite = np.kron(_P0, rho)
    h = np.kron(HADAMARD, np.eye(d, dtype=complex))
    composite = h @ composite @ h.conj().T
    ctrl = np.kron(_P0, np.eye(d, dtype=complex)) + np.kron(_P1, u)
    composite = ctrl @ composite @ ctrl.conj().T
    anc = PAULI_X if part == "real" else PAULI_Y
    val = complex(np.trace(np.kron(anc, s) @ composite))
    return float(val.real)


def involution_projectors(observable: PauliObservable):
    """Projectors onto the +1/-1 eigenspaces of a self-inverse observable.

    The observable must be a single Pauli string with coefficient +/-1 so
    that G^2 = I.
    """
    if not observable.is_single_string():
        raise ValueError("projective splitting needs a single Pauli string")
    g = observable.matrix()
    dev = float(np.max(np.abs(g @ g - np.eye(g.shape[0]))))
    if dev > _INVOLUTION_ATOL:
        raise ValueError(f"observable is not an involution: |G^2 - I| = {dev:.3e}")
    eye = np.eye(g.shape[0], dtype=complex)
    return (eye + g) / 2.0, (eye - g) / 2.0


def symmetric_product_measure(companion, observable: PauliObservable, state) -> float:
    """Anticommutator half Tr((S G + G S) rho / 2) via projective outcomes.

    Measures G projectively, weights the post-measurement states by the
    outcome, and reads S: returns sum_l l * Tr(S P_l rho P_l), which for
    Hermitian S equals Re Tr(S G rho).
    """
    s = _obs_matrix(companion)
    rho = as_matrix(state)
    p_plus, p_minus = involution_projectors(observable)
    if s.shape != rho.shape or p_plus.shape != rho.shape:
        raise ValueError(
            f"dimension mismatch: companion {s.shape}, state {rho.shape}, "
            f"projectors {p_plus.shape}"
        )
    val = complex(
        np.trace(s @ p_plus @ rho @ p_plus) - np.trace(s @ p_minus @ rho @ p_minus)
    )
    return float(val.real)


def antisymmetric_product_measure(companion, observable: PauliObservable, state) -> float:
    """Commutator half via the rotations R_l = exp(i l pi G / 4) = (I + i l G)/sqrt(2).

    Returns the real number (1/2) sum_l l Tr(S R_l rho R_l^dag), which
    equals i Tr((S G - G S) rho / 2), i.e. -Im Tr(S G rho) for Hermitian S.
    """
    s = _obs_matrix(companion)
    rho = as_matrix(state)
    p_plus, p_minus = involution_projectors(observable)
    g = p_plus - p_minus
    if s.shape != rho.shape:
        raise ValueError(f"dimension mismatch: companion {s.shape}, state {rho.shape}")
    eye = np.eye(g.shape[0], dtype=complex)
    r_plus = (eye + 1j * g) / np.sqrt(2.0)
    r_minus = (eye - 1j * g) / np.sqrt(2.0)
    val = 0.5 * complex(
        np.trace(s @ r_plus @ rho @ r_plus.conj().T)
        - np.trace(s @ r_minus @ rho @ r_minus.conj().T)
    )
    return float(val.real)


def product_expectation(companion, observable: PauliObservable, state) -> complex:
    """Tr(S G rho) reassembled from the two measurement halves.

    The symmetric half is the real part and the antisymmetric half a
    satisfies i a = Tr((S G - G S) rho / 2), so Tr(S G rho) = sym - i a.
    """
    sym = symmetric_product_measure(companion, observable, state)
    anti = antisymmetric_product_measure(companion, observable, state)
    return complex(sym, -anti)


def symmetrized_verified_estimate(state, dual, observable: PauliObservable) -> float:
    """Verified expectation from projective measurements alone.

    The verified numerator enters as Re Tr(rho_bar O rho), which is
    exactly the symmetric half with companion rho_bar: no controlled-O
    and no rotation machinery is needed. Divides by the overlap
    Tr(rho_bar rho).
    """
    rho = as_matrix(state)
    rbar = as_matrix(dual)
    num = symmetric_product_measure(rbar, observable, rho)
    den = complex(np.trace(rbar @ rho)).real
    if abs(den) < 1e-12:
        raise ZeroDivisionError(f"state/dual overlap {den:.3e} is numerically zero")
    return float(num / den)
