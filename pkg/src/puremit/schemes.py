"""Mitigation schemes, from operator identities to circuit-level pipelines.

The estimators all measure a ratio. At operator level:

* multi-copy: Tr(O rho^M) / Tr(rho^M), realized on hardware as the
  cyclic-permutation contraction Tr(C_M O_1 rho^(x)M).
* state verification: Tr(rho_bar O rho) / Tr(rho_bar rho) with rho_bar
  the dual state of the inverse circuit.
* combined: Tr(O (rho rho_bar)^M) / Tr((rho rho_bar)^M), degree 2M from
  M registers.

Circuit-level pipelines build the ancilla-controlled measurement circuit
explicitly (Hadamard, controlled observable, controlled register swaps,
inverse circuits, ancilla readout) so machinery noise on the swaps and
ancilla gates can be studied. With noiseless machinery the pipeline
reproduces the operator-level value.

Register layout on the composite: ancilla is qubit 0 (most significant),
register r occupies qubits 1 + r*n .. n + r*n. The cyclic shift C_M
moves register k's content to register k-1 and factors into adjacent
register swaps S_{M-2,M-1} ... S_{0,1}, applied rightmost first.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from .channels import (
    NO_NOISE,
    NoiseModel,
    amplitude_damping_channel,
    dephasing_channel,
    depolarizing_channel,
    dual_state,
    prepare_noisy_state,
)
from .circuits import GateCircuit, circuit_unitary, gate_matrix, inverse_circuit
from .linalg import as_matrix, check_dimension, kron_all, kron_power
from .observables import PauliObservable, pauli_string_matrix
from .reports import EstimateReport
from .resources import ResourceProfile, check_scheme_kind, resource_profile

DENOMINATOR_FLOOR = 1e-12
# largest composite dimension for which the explicit permutation
# contraction is evaluated alongside the reduced matrix-power form
_COMPOSITE_LIMIT = 1024

_P0 = np.array([[1.0, 0.0], [0.0, 0.0]], dtype=complex)
_MULTICOPY_KINDS = ("multi-copy", "multi-copy-recycled")


class VanishingDenominatorError(ZeroDivisionError):
    """The scheme denominator is numerically zero; the ratio is undefined."""


def cyclic_permutation(n_copies: int, dim: int) -> np.ndarray:
    """Permutation C on dim**n_copies with C|k_1 k_2 ... k_M> = |k_2 ... k_M k_1>.

    Contracting it against a product operator chains the factors:
    Tr(C (A_1 (x) ... (x) A_M)) = Tr(A_1 A_2 ... A_M).
    """
    if n_copies < 1:
        raise ValueError(f"need n_copies >= 1, got {n_copies}")
    if dim < 1:
        raise ValueError(f"need dim >= 1, got {dim}")
    total = check_dimension(dim**n_copies)
    cols = np.arange(total)
    lead = dim ** (n_copies - 1)
    rows = (cols % lead) * dim + cols // lead
    c = np.zeros((total, total), dtype=complex)
    c[rows, cols] = 1.0
    return c


def register_swap(n_copies: int, dim: int, r: int) -> np.ndarray:
    """Permutation exchanging registers r and r+1 of an n_copies product."""
    if not 0 <= r < n_copies - 1:
        raise ValueError(f"register index {r} out of range for {n_copies} copies")
    total = check_dimension(dim**n_copies)
    cols = np.arange(total)
    base_r = dim ** (n_copies - 1 - r)
    base_s = dim ** (n_copies - 2 - r)
    k_r = (cols // base_r) % dim
    k_s = (cols // base_s) % dim
    rows = cols + (k_s - k_r) * base_r + (k_r - k_s) * base_s
    p = np.zeros((total, total), dtype=complex)
    p[rows, cols] = 1.0
    return p


def fredkin_matrix() -> np.ndarray:
    """Controlled qubit swap, control on the most significant qubit."""
    out = np.eye(8, dtype=complex)
    out[5, 5] = out[6, 6] = 0.0
    out[5, 6] = out[6, 5] = 1.0
    return out


def controlled_register_swap(n_qubits: int):
    """Controlled swap of two n-qubit registers, plus its Fredkin factorization.

    Returns (matrix, triples): the unitary on 1 + 2n qubits (control most
    significant) and the list of (control, qubit_a, qubit_b) Fredkin
    targets whose product equals it. One controlled register swap costs
    n qubit-level controlled swaps in depth 1.
    """
    if n_qubits < 1:
        raise ValueError(f"register width must be >= 1, got {n_qubits}")
    dim_reg = 2**n_qubits
    check_dimension(2 ** (1 + 2 * n_qubits))
    swap = register_swap(2, dim_reg, 0)
    mat = np.kron(_P0, np.eye(dim_reg**2, dtype=complex)) + np.kron(
        np.eye(2, dtype=complex) - _P0, swap
    )
    triples = [(0, 1 + i, 1 + n_qubits + i) for i in range(n_qubits)]
    return mat, triples


def _chain_trace(factors) -> complex:
    """Tr(A_1 A_2 ... A_M) by accumulating matrix products."""
    acc = None
    for f in factors:
        acc = f if acc is None else acc @ f
    return complex(np.trace(acc))


def _permutation_contraction(obs_mat, factors):
    """Tr(C_M O_1 (A_1 (x) ... (x) A_M)) evaluated on the composite space."""
    m = len(factors)
    dim = factors[0].shape[0]
    first = obs_mat @ factors[0]
    big = kron_all([first] + list(factors[1:]))
    # Tr(C X) picks one entry of X per column of the permutation
    cols = np.arange(big.shape[0])
    lead = dim ** (m - 1)
    rows = (cols % lead) * dim + cols // lead
    return complex(big[cols, rows].sum())


def _require_power_of_two(dim: int) -> int:
    n = int(dim).bit_length() - 1
    if 2**n != dim:
        raise ValueError(f"register dimension {dim} is not a power of two")
    return n


def multicopy_estimate(
    state, observable: PauliObservable, n_copies: int, kind: str = "multi-copy"
) -> EstimateReport:
    """Purified expectation from M copies: Tr(O rho^M) / Tr(rho^M).

    Uses the explicit cyclic-permutation contraction whenever the
    composite dimension stays small, and the equivalent matrix-power form
    beyond that. ``kind`` may be "multi-copy-recycled" to account two
    registers with serialized swaps instead of M registers in depth 1.
    """
    if kind not in _MULTICOPY_KINDS:
        raise ValueError(f"kind must be one of {_MULTICOPY_KINDS}, got {kind!r}")
    if n_copies < 1:
        raise ValueError(f"need n_copies >= 1, got {n_copies}")
    rho = as_matrix(state)
    dim = rho.shape[0]
    n_qubits = _require_power_of_two(dim)
    obs = observable.matrix()
    if obs.shape != rho.shape:
        raise ValueError(f"dimension mismatch: state {rho.shape}, observable {obs.shape}")
    check_dimension(dim**n_copies)
    details = {}
    power = np.linalg.matrix_power(rho, n_copies)
    num_reduced = complex(np.trace(obs @ power))
    den_reduced = complex(np.trace(power))
    if dim**n_copies <= _COMPOSITE_LIMIT:
        copies = [rho] * n_copies
        num = _permutation_contraction(obs, copies)
        den = _permutation_contraction(np.eye(dim, dtype=complex), copies)
        details["evaluation"] = "permutation-contraction"
        details["reduced_residual"] = float(
            max(abs(num - num_reduced), abs(den - den_reduced))
        )
    else:
        num, den = num_reduced, den_reduced
        details["evaluation"] = "matrix-power"
    if abs(den.real) < DENOMINATOR_FLOOR:
        raise VanishingDenominatorError(
            f"Tr(rho^{n_copies}) = {den.real:.3e} is numerically zero"
        )
    profile_kind = kind if n_copies >= 2 else "raw"
    resources = resource_profile(profile_kind, max(n_copies, 1), n_qubits)
    ratio = num.real / den.real
    return EstimateReport(
        kind=kind,
        ratio=ratio,
        numerator=num.real,
        denominator=den.real,
        resources=resources,
        exact_ratio=ratio,
        imag_residual=float(max(abs(num.imag), abs(den.imag))),
        details=details,
    )


def state_verification_estimate(state, dual, observable: PauliObservable) -> EstimateReport:
    """Verified expectation Re Tr(rho_bar O rho) / Tr(rho_bar rho).

    ``dual`` is the (possibly non-normalized) dual state; with an ideal
    dual equal to rho this reduces to degree-2 purification.
    """
    rho = as_matrix(state)
    rbar = as_matrix(dual)
    n_qubits = _require_power_of_two(rho.shape[0])
    obs = observable.matrix()
    if rho.shape != rbar.shape or obs.shape != rho.shape:
        raise ValueError(
            f"dimension mismatch: state {rho.shape}, dual {rbar.shape}, observable {obs.shape}"
        )
    num = complex(np.trace(rbar @ obs @ rho))
    den = complex(np.trace(rbar @ rho))
    if abs(den.real) < DENOMINATOR_FLOOR:
        raise VanishingDenominatorError(
            f"state/dual overlap {den.real:.3e} is numerically zero"
        )
    ratio = num.real / den.real
    return EstimateReport(
        kind="state-verification",
        ratio=ratio,
        numerator=num.real,
        denominator=den.real,
        resources=resource_profile("state-verification", 2, n_qubits),
        exact_ratio=ratio,
        imag_residual=float(max(abs(num.imag), abs(den.imag))),
    )


def combined_estimate(
    state,
    dual,
    observable: PauliObservable,
    n_copies: int,
    verified_copies: int | None = None,
) -> EstimateReport:
    """Degree-2M estimate Tr(O (rho rho_bar)^M) / Tr((rho rho_bar)^M).

    With ``verified_copies`` = k < M only the last k registers carry the
    inverse-circuit verification, giving the odd-degree family
    Tr(O rho^(M-k) (rho rho_bar)^k) at operator level.
    """
    if n_copies < 1:
        raise ValueError(f"need n_copies >= 1, got {n_copies}")
    k = n_copies if verified_copies is None else int(verified_copies)
    if not 0 <= k <= n_copies:
        raise ValueError(f"verified_copies {k} outside 0..{n_copies}")
    rho = as_matrix(state)
    rbar = as_matrix(dual)
    if rho.shape != rbar.shape:
        raise ValueError(f"dimension mismatch: state {rho.shape}, dual {rbar.shape}")
    n_qubits = _require_power_of_two(rho.shape[0])
    obs = observable.matrix()
    if obs.shape != rho.shape:
        raise ValueError(f"dimension mismatch: state {rho.shape}, observable {obs.shape}")
    factors = [rho] * (n_copies - k) + [rho @ rbar] * k
    chain = None
    for f in factors:
        chain = f if chain is None else chain @ f
    num = complex(np.trace(obs @ chain))
    den = complex(np.trace(chain))
    details = {"verified_copies": k, "evaluation": "matrix-chain"}
    if k == n_copies and rho.shape[0] ** n_copies <= _COMPOSITE_LIMIT:
        # cross-check against the full permutation contraction
        # Tr(rho_bar^(x)M C_M O_1 rho^(x)M)
        rb_m = kron_power(rbar, n_copies)
        num_comp = _composite_verified(rb_m, obs, rho, n_copies)
        den_comp = _composite_verified(
            rb_m, np.eye(rho.shape[0], dtype=complex), rho, n_copies
        )
        details["evaluation"] = "permutation-contraction"
        details["composite_numerator"] = num_comp.real
        details["composite_denominator"] = den_comp.real
        details["reduced_residual"] = float(
            max(abs(num_comp - num), abs(den_comp - den))
        )
    if abs(den.real) < DENOMINATOR_FLOOR:
        raise VanishingDenominatorError(
            f"verified chain trace {den.real:.3e} is numerically zero"
        )
    degree = n_copies + k
    if k == n_copies:
        resources = resource_profile("combined", degree, n_qubits)
    else:
        # odd-degree family: same machinery as the full combined scheme
        resources = ResourceProfile(
            "combined",
            degree,
            n_copies,
            n_copies - 1,
            (n_copies - 1) * n_qubits,
            2,
            1,
        )
    ratio = num.real / den.real
    return EstimateReport(
        kind="combined",
        ratio=ratio,
        numerator=num.real,
        denominator=den.real,
        resources=resources,
        exact_ratio=ratio,
        imag_residual=float(max(abs(num.imag), abs(den.imag))),
        details=details,
    )


def _composite_verified(rb_m, obs_mat, rho, n_copies):
    """Tr(rho_bar^(x)M C_M O_1 rho^(x)M) on the composite space."""
    dim = rho.shape[0]
    c = cyclic_permutation(n_copies, dim)
    o1 = np.kron(obs_mat, np.eye(dim ** (n_copies - 1), dtype=complex))
    return complex(np.trace(rb_m @ c @ o1 @ kron_power(rho, n_copies)))


# ---------------------------------------------------------------------------
# circuit-level pipelines


@dataclass(frozen=True)
class MeasurableTerm:
    """One ancilla-readout measurement: coefficient * Tr(observable state)."""

    coefficient: float
    state: np.ndarray
    observable: np.ndarray


@dataclass(frozen=True)
class SchemePipeline:
    """Fully built scheme circuit, ready for exact readout or shot sampling."""

    kind: str
    degree: int
    n_copies: int
    n_qubits: int
    numerator_terms: tuple
    denominator: MeasurableTerm
    resources: ResourceProfile
    ideal_value: float
    raw_value: float
    operator_ratio: float
    machinery_noise: NoiseModel = NO_NOISE

    def exact_numerator(self):
        total = 0.0
        resid = 0.0
        for term in self.numerator_terms:
            val = complex(np.trace(term.observable @ term.state))
            total += term.coefficient * val.real
            resid = max(resid, abs(val.imag))
        return total, resid

    def exact_denominator(self):
        val = complex(np.trace(self.denominator.observable @ self.denominator.state))
        return val.real, abs(val.imag)

    def exact_report(self) -> EstimateReport:
        num, resid_n = self.exact_numerator()
        den, resid_d = self.exact_denominator()
        if abs(den) < DENOMINATOR_FLOOR:
            raise VanishingDenominatorError(
                f"pipeline denominator {den:.3e} is numerically zero"
            )
        return EstimateReport(
            kind=self.kind,
            ratio=num / den,
            numerator=num,
            denominator=den,
            resources=self.resources,
            exact_ratio=self.operator_ratio,
            ideal_value=self.ideal_value,
            raw_value=self.raw_value,
            imag_residual=max(resid_n, resid_d),
            details={"evaluation": "pipeline-exact"},
        )


def _local_kraus_stack(noise: NoiseModel, n_targets: int) -> np.ndarray | None:
    """Kraus stack of a noise model restricted to ``n_targets`` qubits."""
    if noise.is_trivial:
        return None
    if noise.kind in ("depolarizing-local", "depolarizing-global"):
        return depolarizing_channel(n_targets, noise.strength).ops
    base = (
        dephasing_channel(noise.strength)
        if noise.kind == "dephasing"
        else amplitude_damping_channel(noise.strength)
    )
    ops = [kron_all(choice) for choice in product(base.ops, repeat=n_targets)]
    return np.array(ops)


def _apply_local(mat: np.ndarray, ops, targets, nq: int) -> np.ndarray:
    """sum_k (op_k on targets) mat (op_k on targets)^dag without embedding.

    ``ops`` is a stack of 2^k x 2^k operators acting on the listed qubits
    of an nq-qubit density matrix (qubit 0 most significant).
    """
    targets = list(targets)
    k = len(targets)
    rest = [q for q in range(nq) if q not in targets]
    order = targets + rest
    perm = order + [nq + q for q in order]
    dk = 2**k
    dr = 2 ** (nq - k)
    t = mat.reshape([2] * (2 * nq)).transpose(perm)
    t = np.ascontiguousarray(t).reshape(dk, dr, dk, dr)
    acc = np.zeros_like(t)
    for op in ops:
        acc += np.einsum("ab,brcs,dc->ards", op, t, op.conj(), optimize=True)
    inv = np.argsort(perm)
    return acc.reshape([2] * (2 * nq)).transpose(inv).reshape(mat.shape)


def _apply_global_depolarizing(mat: np.ndarray, p: float) -> np.ndarray:
    dim = mat.shape[0]
    return (1.0 - p) * mat + p * np.trace(mat) / dim * np.eye(dim, dtype=complex)


def _machinery_step(mat: np.ndarray, noise: NoiseModel, targets, nq: int) -> np.ndarray:
    if noise.is_trivial:
        return mat
    if noise.kind == "depolarizing-global":
        return _apply_global_depolarizing(mat, noise.strength)
    return _apply_local(mat, _local_kraus_stack(noise, len(targets)), targets, nq)


_CTRL_CACHE: dict = {}


def _controlled_pauli(letter: str) -> np.ndarray:
    if letter not in _CTRL_CACHE:
        p = pauli_string_matrix(letter)
        _CTRL_CACHE[letter] = np.kron(_P0, np.eye(2, dtype=complex)) + np.kron(
            np.eye(2, dtype=complex) - _P0, p
        )
    return _CTRL_CACHE[letter]


def build_pipeline(
    kind: str,
    circuit: GateCircuit,
    noise: NoiseModel,
    observable: PauliObservable,
    n_copies: int = 2,
    machinery_noise: NoiseModel | None = None,
    dual_noise: NoiseModel | None = None,
) -> SchemePipeline:
    """Construct the full scheme circuit and evaluate its final states.

    ``noise`` afflicts the state-preparation circuits (and, unless
    ``dual_noise`` overrides it, the inverse circuits of the verification
    schemes); ``machinery_noise`` afflicts the ancilla Hadamards and
    every Fredkin of the controlled register swaps. Controlled-Pauli
    insertions are treated as ideal.
    """
    check_scheme_kind(kind)
    machinery = NO_NOISE if machinery_noise is None else machinery_noise
    n = circuit.n_qubits
    if observable.n_qubits != n:
        raise ValueError(
            f"observable width {observable.n_qubits} does not match circuit width {n}"
        )
    obs_mat = observable.matrix()
    psi_dim = circuit.dim
    u = circuit_unitary(circuit)
    ideal_state = u[:, 0]
    ideal_value = float(np.vdot(ideal_state, obs_mat @ ideal_state).real)
    rho = prepare_noisy_state(circuit, noise)
    raw_value = float(np.trace(obs_mat @ rho.matrix).real)

    if kind == "raw":
        eye = np.eye(psi_dim, dtype=complex)
        terms = tuple(
            MeasurableTerm(c, rho.matrix, pauli_string_matrix(s))
            for c, s in observable.terms
        )
        den = MeasurableTerm(1.0, rho.matrix, eye)
        return SchemePipeline(
            kind="raw",
            degree=1,
            n_copies=1,
            n_qubits=n,
            numerator_terms=terms,
            denominator=den,
            resources=resource_profile("raw", 1, n),
            ideal_value=ideal_value,
            raw_value=raw_value,
            operator_ratio=raw_value,
            machinery_noise=machinery,
        )

    if kind == "state-verification":
        copies = 1
        degree = 2
    elif kind == "combined":
        if n_copies < 1:
            raise ValueError(f"need n_copies >= 1, got {n_copies}")
        copies = n_copies
        degree = 2 * n_copies
    else:
        if n_copies < 2:
            raise ValueError(f"{kind} needs n_copies >= 2, got {n_copies}")
        copies = n_copies
        degree = n_copies

    nq = 1 + copies * n
    check_dimension(2**nq)
    verify = kind in ("state-verification", "combined")

    base = np.kron(_P0, kron_power(rho.matrix, copies))
    base = _apply_local(base, [gate_matrix("H")], [0], nq)
    base = _machinery_step(base, machinery, [0], nq)

    # per-gate plan for the inverse circuits: (gate qubits, gate op,
    # noise stack, whether the noise hits the whole register)
    inv_plan = []
    if verify:
        inv = inverse_circuit(circuit)
        inv_noise = noise if dual_noise is None else dual_noise
        for g in inv.gates:
            gate_ops = [g.matrix()]
            if inv_noise.is_trivial:
                inv_plan.append((g.qubits, gate_ops, None, False))
            elif inv_noise.kind == "depolarizing-global":
                # global depolarizing acts register-wide after each gate
                stack = depolarizing_channel(n, inv_noise.strength).ops
                inv_plan.append((g.qubits, gate_ops, stack, True))
            else:
                stack = _local_kraus_stack(inv_noise, len(g.qubits))
                inv_plan.append((g.qubits, gate_ops, stack, False))

    fredkin = fredkin_matrix()

    def run_suffix(mat: np.ndarray) -> np.ndarray:
        for r in range(copies - 1):
            for i in range(n):
                targets = [0, 1 + r * n + i, 1 + (r + 1) * n + i]
                mat = _apply_local(mat, [fredkin], targets, nq)
                mat = _machinery_step(mat, machinery, targets, nq)
        for reg in range(copies if verify else 0):
            offset = 1 + reg * n
            for qubits, gate_ops, stack, whole_register in inv_plan:
                mat = _apply_local(mat, gate_ops, [offset + q for q in qubits], nq)
                if stack is None:
                    continue
                tgt = (
                    list(range(offset, offset + n))
                    if whole_register
                    else [offset + q for q in qubits]
                )
                mat = _apply_local(mat, stack, tgt, nq)
        mat = _apply_local(mat, [gate_matrix("H")], [0], nq)
        mat = _machinery_step(mat, machinery, [0], nq)
        return mat

    z_anc = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
    if verify:
        proj = kron_power(_projector_zero(psi_dim), copies)
    else:
        proj = np.eye(psi_dim**copies, dtype=complex)
    meas = np.kron(z_anc, proj)

    numerator_terms = []
    for coeff, string in observable.terms:
        mat = base.copy()
        for q, letter in enumerate(string):
            if letter == "I":
                continue
            mat = _apply_local(mat, [_controlled_pauli(letter)], [0, 1 + q], nq)
        mat = run_suffix(mat)
        numerator_terms.append(MeasurableTerm(float(coeff), mat, meas))
    den_state = run_suffix(base.copy())
    denominator = MeasurableTerm(1.0, den_state, meas)

    rbar = None
    if verify:
        rbar = dual_state(circuit, noise, dual_noise)
    if kind == "state-verification":
        reference = state_verification_estimate(rho, rbar, observable)
    elif kind == "combined":
        reference = combined_estimate(rho, rbar, observable, copies)
    else:
        reference = multicopy_estimate(rho, observable, copies, kind=kind)

    profile_kind = "raw" if (kind in _MULTICOPY_KINDS and copies < 2) else kind
    profile_degree = 1 if profile_kind == "raw" else degree
    return SchemePipeline(
        kind=kind,
        degree=degree,
        n_copies=copies,
        n_qubits=n,
        numerator_terms=tuple(numerator_terms),
        denominator=denominator,
        resources=resource_profile(profile_kind, profile_degree, n),
        ideal_value=ideal_value,
        raw_value=raw_value,
        operator_ratio=reference.ratio,
        machinery_noise=machinery,
    )


def _projector_zero(dim: int) -> np.ndarray:
    out = np.zeros((dim, dim), dtype=complex)
    out[0, 0] = 1.0
    return out


def circuit_level_combined(
    circuit: GateCircuit,
    noise: NoiseModel,
    observable: PauliObservable,
    n_copies: int = 2,
    machinery_noise: NoiseModel | None = None,
    dual_noise: NoiseModel | None = None,
) -> EstimateReport:
    """Exact circuit-level run of the combined scheme."""
    pipe = build_pipeline(
        "combined",
        circuit,
        noise,
        observable,
        n_copies=n_copies,
        machinery_noise=machinery_noise,
        dual_noise=dual_noise,
    )
    return pipe.exact_report()
