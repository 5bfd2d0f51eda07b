"""Pauli-sum observables and their text form.

The text grammar is a signed sum of weighted Pauli strings, e.g.
``0.5*ZI + 0.5*IZ`` or ``-0.25*XX + ZZ``. Coefficients are real; a bare
string means coefficient 1. All strings in a sum must share a width.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .circuits import I2, PAULI_X, PAULI_Y, PAULI_Z
from .linalg import check_dimension, kron_all

_PAULI = {"I": I2, "X": PAULI_X, "Y": PAULI_Y, "Z": PAULI_Z}


class ObservableFormatError(ValueError):
    """Malformed observable text; message points at the offending token."""


@dataclass(frozen=True)
class PauliObservable:
    """Real-weighted sum of Pauli strings on one register.

    terms: tuple of (coefficient, string) pairs, strings over IXYZ with a
    common width. Qubit 0 is the leftmost letter (most significant).
    """

    terms: tuple[tuple[float, str], ...]

    def __post_init__(self):
        if not self.terms:
            raise ValueError("observable needs at least one term")
        terms = tuple((float(c), str(s).upper()) for c, s in self.terms)
        object.__setattr__(self, "terms", terms)
        width = len(terms[0][1])
        for c, s in terms:
            if len(s) != width:
                raise ValueError(
                    f"Pauli strings must share a width: {s!r} vs width {width}"
                )
            if not s or any(ch not in _PAULI for ch in s):
                raise ValueError(f"invalid Pauli string {s!r} (letters must be I/X/Y/Z)")
            if not np.isfinite(c):
                raise ValueError(f"coefficient {c!r} is not finite")
        check_dimension(2**width)

    @property
    def n_qubits(self) -> int:
        return len(self.terms[0][1])

    @property
    def dim(self) -> int:
        return 2**self.n_qubits

    def matrix(self) -> np.ndarray:
        out = np.zeros((self.dim, self.dim), dtype=complex)
        for c, s in self.terms:
            out += c * pauli_string_matrix(s)
        return out

    def is_single_string(self) -> bool:
        return len(self.terms) == 1

    @classmethod
    def single(cls, string: str, coefficient: float = 1.0) -> "PauliObservable":
        return cls(((coefficient, string),))


def pauli_string_matrix(s: str) -> np.ndarray:
    return kron_all(_PAULI[ch] for ch in s.upper())


def parse_observable(text: str) -> PauliObservable:
    """Parse observable text into a PauliObservable.

    Raises ObservableFormatError naming the offending token on any
    malformed input.
    """
    src = text.replace("−", "-").strip()
    if not src:
        raise ObservableFormatError("empty observable text")
    terms = []
    pos = 0
    n = len(src)
    first = True
    while pos < n:
        while pos < n and src[pos].isspace():
            pos += 1
        if pos >= n:
            break
        sign = 1.0
        if src[pos] in "+-":
            sign = -1.0 if src[pos] == "-" else 1.0
            pos += 1
            while pos < n and src[pos].isspace():
                pos += 1
        elif not first:
            raise ObservableFormatError(
                f"expected '+' or '-' before term at {src[pos:pos + 12]!r}"
            )
        start = pos
        while pos < n and not src[pos].isspace() and src[pos] not in "+-":
            pos += 1
        # scientific exponent signs belong to the token
        while pos < n and src[pos] in "+-" and pos > start and src[pos - 1] in "eE":
            pos += 1
            while pos < n and not src[pos].isspace() and src[pos] not in "+-":
                pos += 1
        token = src[start:pos]
        if not token:
            raise ObservableFormatError(f"dangling sign at position {start} in {text!r}")
        if "*" in token:
            coeff_text, _, string = token.partition("*")
            try:
                coeff = float(coeff_text)
            except ValueError:
                raise ObservableFormatError(
                    f"bad coefficient {coeff_text!r} in term {token!r}"
                ) from None
        else:
            coeff, string = 1.0, token
        if not string or any(ch not in _PAULI for ch in string.upper()):
            raise ObservableFormatError(
                f"bad Pauli string {string!r} in term {token!r} (letters must be I/X/Y/Z)"
            )
        terms.append((sign * coeff, string.upper()))
        first = False
    if not terms:
        raise ObservableFormatError(f"no terms found in {text!r}")
    try:
        return PauliObservable(tuple(terms))
    except ValueError as exc:
        raise ObservableFormatError(str(exc)) from None


def format_observable(obs: PauliObservable) -> str:
    """Canonical text form; parse(format(x)) == x."""
    parts = []
    for i, (c, s) in enumerate(obs.terms):
        mag = abs(c)
        body = s if mag == 1.0 else f"{mag!r}*{s}"
        if i == 0:
            parts.append(body if c >= 0 else f"-{body}")
        else:
            parts.append(f"{'+' if c >= 0 else '-'} {body}")
    return " ".join(parts)
