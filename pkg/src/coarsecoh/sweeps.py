"""Sweep parameters and verdict certificates shared across modules.

Every windowed verdict carries the scales it was checked at and a safety
margin against the window radius, so that truncation can never masquerade
as boundedness: a Bounded(B) verdict requires ``B + max(scales)`` to stay
strictly inside the window, and unbounded witnesses must reach the outer
margin of the window.  Anything in between is Inconclusive.
"""

from __future__ import annotations

from dataclasses import dataclass, field

BOUNDED = "bounded"
UNBOUNDED = "unbounded"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class Sweep:
    """Scales and margin for windowed verdicts.

    The default geometric scale list catches linear-in-scale growth of
    bounded cores; windows of at least eight times the top scale keep the
    margin rule comfortable.
    """

    scales: tuple = (1, 2, 4, 8)
    margin: float = 0.1

    def __post_init__(self):
        if not self.scales or any(s < 0 for s in self.scales):
            raise ValueError("scales must be nonempty and nonnegative")
        if not 0 < self.margin < 1:
            raise ValueError("margin must lie in (0, 1)")

    @property
    def max_scale(self):
        return max(self.scales)

    def far_threshold(self, space):
        return (1 - self.margin) * space.window_radius

    def classify(self, space, bound, empty=False):
        """Margin rule shared by all boundedness-style verdicts."""
        if empty:
            return BOUNDED
        if bound + self.max_scale < space.window_radius:
            return BOUNDED
        if bound >= self.far_threshold(space):
            return UNBOUNDED
        return INCONCLUSIVE


@dataclass
class BoundednessCertificate:
    """Outcome of a windowed boundedness check.

    ``bound`` is the largest observed member distance to the basepoint
    (meaningful for bounded and inconclusive verdicts); ``witnesses`` are
    far member points backing an unbounded verdict.
    """

    verdict: str
    bound: int = 0
    witnesses: list = field(default_factory=list)
    method: str = "scan"
    sweep: Sweep = field(default_factory=Sweep)
    notes: dict = field(default_factory=dict)

    @property
    def is_bounded(self):
        return self.verdict == BOUNDED

    @property
    def is_unbounded(self):
        return self.verdict == UNBOUNDED

    def to_json(self):
        out = {"verdict": self.verdict, "method": self.method}
        if self.verdict == BOUNDED or self.verdict == INCONCLUSIVE:
            out["bound"] = int(self.bound)
        if self.witnesses:
            out["witnesses"] = [list(w) if isinstance(w, tuple) else w for w in self.witnesses[:3]]
        return out
