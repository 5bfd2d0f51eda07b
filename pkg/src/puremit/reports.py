"""Estimate reports shared by the exact and sampled execution paths."""

from __future__ import annotations

from dataclasses import dataclass, field

from .resources import ResourceProfile


@dataclass(frozen=True)
class EstimateReport:
    """Outcome of one mitigation estimate.

    The ratio fields describe numerator / denominator of the scheme; for
    exact (infinite-shot) evaluation the stderr fields are zero and
    ``shots_used`` is 0. ``exact_ratio`` is the noiseless-machinery
    operator-level reference the sampler should converge to;
    ``ideal_value`` is the noise-free circuit value the mitigation is
    trying to recover.
    """

    kind: str
    ratio: float
    numerator: float
    denominator: float
    resources: ResourceProfile
    shots_used: int = 0
    trials: int = 1
    ratio_stderr: float = 0.0
    numerator_stderr: float = 0.0
    denominator_stderr: float = 0.0
    exact_ratio: float | None = None
    ideal_value: float | None = None
    raw_value: float | None = None
    imag_residual: float = 0.0
    details: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        out = {
            "kind": self.kind,
            "ratio": self.ratio,
            "numerator": self.numerator,
            "denominator": self.denominator,
            "shots_used": self.shots_used,
            "trials": self.trials,
            "ratio_stderr": self.ratio_stderr,
            "numerator_stderr": self.numerator_stderr,
            "denominator_stderr": self.denominator_stderr,
            "exact_ratio": self.exact_ratio,
            "ideal_value": self.ideal_value,
            "raw_value": self.raw_value,
            "imag_residual": self.imag_residual,
            "resources": self.resources.as_dict(),
        }
        if self.details:
            out["details"] = dict(self.details)
        return out
