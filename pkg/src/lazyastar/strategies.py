"""Evaluation strategies and the meta-reasoning pieces they use.

Everything here is pure bookkeeping or arithmetic; the search loop in
:mod:`lazyastar.search` calls into it.  Decision functions are written with
plain operators so they also work on ``Fraction`` or sympy symbols.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional


class Variant(str, Enum):
    H1 = "h1"
    H2 = "h2"
    MAX = "max"
    LAZY = "lazy"
    RATIONAL = "rlazy"


class Rule(str, Enum):
    GENERAL = "general"
    LOG_OPEN = "logopen"
    RATIO = "ratio"


class Decision(str, Enum):
    COMPUTE = "compute"
    BYPASS = "bypass"


class ReemergeAction(str, Enum):
    EVALUATE_H2 = "evaluate_h2_and_reinsert"
    EXPAND = "expand"


class OpenAction(str, Enum):
    BYPASS_OPEN = "bypass_open"
    INSERT = "insert"


class HbpAction(str, Enum):
    SKIP_H1 = "skip_h1_use_lower_h2"
    EVALUATE_H1 = "evaluate_h1"


FIXED = "fixed"
MEASURED = "measured"


@dataclass
class CostModel:
    """Time parameters for the decision rules.

    In ``measured`` mode ``t1``/``t2`` become the running means of observed
    evaluation times once at least one observation exists; before that the
    configured values act as priors.  ``tau > 0`` switches the OPEN
    operation cost to ``tau * ln(N_o)``; otherwise the constant ``t_o`` is used.
    """

    t1: float = 1.0
    t2: float = 10.0
    t_o: float = 0.1
    t_c: float = 0.0
    tau: float = 0.0
    mode: str = FIXED
    _sum: list = field(default_factory=lambda: [0.0, 0.0], repr=False)
    _n: list = field(default_factory=lambda: [0, 0], repr=False)

    def __post_init__(self):
        if self.mode not in (FIXED, MEASURED):
            raise ValueError(f"unknown cost mode {self.mode!r}")
        for name in ("t1", "t2", "t_o", "t_c", "tau"):
            v = getattr(self, name)
            if isinstance(v, (int, float)) and (v < 0 or math.isnan(v)):
                raise ValueError(f"{name} must be a finite value >= 0")

    def observe(self, which: int, seconds: float) -> None:
        self._sum[which - 1] += seconds
        self._n[which - 1] += 1

    def mean_time(self, which: int):
        if self.mode == MEASURED and self._n[which - 1]:
            return self._sum[which - 1] / self._n[which - 1]
        return self.t1 if which == 1 else self.t2

    @property
    def eval_time_h1(self):
        return self.mean_time(1)

    @property
    def eval_time_h2(self):
        return self.mean_time(2)

    def open_time(self, n_open: int):
        if self.tau:
            return self.tau * math.log(max(n_open, 1))
        return self.t_o

    def fresh(self) -> "CostModel":
        """Same constants, empty accumulators (one per search run)."""
        return CostModel(self.t1, self.t2, self.t_o, self.t_c, self.tau, self.mode)

    @classmethod
    def parse(cls, text: str) -> "CostModel":
        """``fixed:t1=1,t2=10,to=0.1,tc=0,tau=0`` or ``measured:...``."""
        mode, _, rest = text.partition(":")
        mode = mode.strip().lower() or FIXED
        aliases = {"t1": "t1", "t2": "t2", "to": "t_o", "t_o": "t_o", "tc": "t_c", "t_c": "t_c", "tau": "tau"}
        kwargs = {}
        for item in filter(None, (s.strip() for s in rest.split(","))):
            key, eq, val = item.partition("=")
            if not eq or key.strip() not in aliases:
                raise ValueError(f"bad cost-model entry {item!r}")
            kwargs[aliases[key.strip()]] = float(val)
        return cls(mode=mode, **kwargs)


@dataclass
class PhEstimator:
    """Helpfulness probability with ``k`` imagined observations at ``p_init``.

    ``A`` counts states whose h2 was computed and that have not been expanded
    yet, ``B`` all states whose h2 was computed.  With ``adaptive=False`` the
    estimate is the constant ``p_init``.
    """

    k: float = 1000
    p_init: float = 0.5
    A: int = 0
    B: int = 0
    adaptive: bool = True

    def observe_h2(self) -> None:
        self.A += 1
        self.B += 1

    def observe_expanded(self) -> None:
        self.A -= 1

    @property
    def estimate(self) -> float:
        if not self.adaptive:
            return self.p_init
        return update_ph(self)

    def fresh(self) -> "PhEstimator":
        return PhEstimator(self.k, self.p_init, adaptive=self.adaptive)


def update_ph(est: PhEstimator) -> float:
    if est.B == 0:
        return est.p_init
    return (est.A + est.p_init * est.k) / (est.B + est.k)


@dataclass
class EvaluationStrategy:
    variant: Variant = Variant.LAZY
    rule: Rule = Rule.RATIO
    cost_model: CostModel = field(default_factory=CostModel)
    ph: PhEstimator = field(default_factory=PhEstimator)
    # replaces the rule entirely; used for degeneracy checks
    decision_override: Optional[Callable[["DecisionInput"], Decision]] = None

    def __post_init__(self):
        self.variant = Variant(self.variant)
        self.rule = Rule(self.rule)

    @property
    def lazy(self) -> bool:
        return self.variant in (Variant.LAZY, Variant.RATIONAL)

    @property
    def name(self) -> str:
        if self.variant is Variant.RATIONAL:
            return f"rlazy-{self.rule.value}"
        return self.variant.value


@dataclass(frozen=True)
class EnhancementOptions:
    open_bypass: bool = False
    heuristic_bypass: bool = False


# ---------------------------------------------------------------------------
# Decision rules


@dataclass(frozen=True)
class DecisionInput:
    b: int
    n_open: int


def regret_compute(td, ph):
    return (1 - ph) * td


def regret_bypass(td, te, ph, b):
    return ph * (te + (b - 1) * td)


def prefer_compute_by_regret(td, te, ph, b) -> bool:
    """Compute h2 when its expected regret is the smaller one."""
    return regret_compute(td, ph) < regret_bypass(td, te, ph, b)


def prefer_compute_rearranged(td, te, ph, b) -> bool:
    return (1 - b * ph) * td < ph * te


def criterion_general(td, te, ph, b) -> bool:
    if ph * b >= 1:
        return True
    return td < ph / (1 - ph * b) * te


def delay_time(cost: CostModel, n_open: int):
    return cost.eval_time_h2 + cost.open_time(n_open)


def expand_time(cost: CostModel, b: int, n_open: int):
    to = cost.open_time(n_open)
    return to + cost.t_c + b * cost.eval_time_h1 + b * to


def rational_decide(inp: DecisionInput, cost: CostModel, ph, rule: Rule = Rule.GENERAL) -> Decision:
    b = inp.b
    if ph * b >= 1:
        return Decision.COMPUTE
    denom = 1 - ph * b
    rule = Rule(rule)
    if rule is Rule.GENERAL:
        td = delay_time(cost, inp.n_open)
        te = expand_time(cost, b, inp.n_open)
        ok = criterion_general(td, te, ph, b)
    elif rule is Rule.LOG_OPEN:
        ok = cost.eval_time_h2 * denom < cost.tau * ph * (b + 1) * math.log(max(inp.n_open, 1))
    else:
        # t2/t1 < ph*b/denom, multiplied out so t1 = 0 is harmless
        ok = cost.eval_time_h2 * denom < ph * b * cost.eval_time_h1
    return Decision.COMPUTE if ok else Decision.BYPASS


def lazy_reemerge(awaiting_h2: bool, strategy: EvaluationStrategy,
                  inp: DecisionInput | None = None, ph=None) -> tuple[ReemergeAction, Decision | None]:
    """What to do with a node just popped as best (goal test already done)."""
    if not awaiting_h2 or not strategy.lazy:
        return ReemergeAction.EXPAND, None
    if strategy.variant is Variant.LAZY:
        return ReemergeAction.EVALUATE_H2, None
    if strategy.decision_override is not None:
        decision = strategy.decision_override(inp)
    else:
        if ph is None:
            ph = strategy.ph.estimate
        decision = rational_decide(inp, strategy.cost_model, ph, strategy.rule)
    if decision is Decision.BYPASS:
        return ReemergeAction.EXPAND, decision
    return ReemergeAction.EVALUATE_H2, decision


def always(decision: Decision) -> Callable[[DecisionInput], Decision]:
    return lambda inp: decision


# ---------------------------------------------------------------------------
# OPEN bypassing and heuristic bypassing


def ob_check(f_new, f_best) -> OpenAction:
    """``f_best`` is the minimum f in OPEN, ``None`` when OPEN is empty."""
    if f_best is None or f_new <= f_best:
        return OpenAction.BYPASS_OPEN
    return OpenAction.INSERT


@dataclass(frozen=True)
class HbpBounds:
    lower: int
    upper: int

    def __post_init__(self):
        if self.lower > self.upper:
            raise ValueError("lower bound above upper bound")

    def contains(self, value) -> bool:
        return self.lower <= value <= self.upper

    @property
    def exact(self) -> bool:
        return self.lower == self.upper


def hbp_bounds(parent, op_cost: int, bidirectional: bool = True,
               consistent: bool = True) -> HbpBounds | None:
    """Bounds on a child's value from its parent's value (or bounds).

    ``None`` when the edge is not bidirectional or the heuristic is not
    consistent; callers then evaluate normally.
    """
    if not (bidirectional and consistent) or parent is None:
        return None
    if isinstance(parent, HbpBounds):
        lo, hi = parent.lower, parent.upper
    else:
        lo = hi = parent
    return HbpBounds(max(0, lo - op_cost), hi + op_cost)


def hbp_apply_lazy(bounds1: HbpBounds | None, bounds2: HbpBounds | None) -> HbpAction:
    if bounds1 is None or bounds2 is None:
        return HbpAction.EVALUATE_H1
    if bounds1.upper < bounds2.lower:
        return HbpAction.SKIP_H1
    return HbpAction.EVALUATE_H1


def hbp_max_skip(bounds1: HbpBounds | None, bounds2: HbpBounds | None) -> int | None:
    """Which heuristic a max-combining search may skip from bounds alone
    (1 or 2), or ``None``."""
    if bounds1 is None or bounds2 is None:
        return None
    if bounds1.upper <= bounds2.lower:
        return 1
    if bounds2.upper <= bounds1.lower:
        return 2
    return None


# ---------------------------------------------------------------------------
# Overhead model


_OVERHEAD = {
    # (strategy, class): (h2 computed?, number of OPEN operations)
    ("max", "ER"): (True, 2),
    ("max", "SR"): (True, 1),
    ("max", "SG"): (True, 1),
    ("lazy", "ER"): (True, 4),
    ("lazy", "SR"): (True, 3),
    ("lazy", "SG"): (False, 1),
}


def predicted_overhead(node_class: str, strategy: str, cost: CostModel | None = None, *,
                       t1=None, t2=None, t_o=None):
    """Per-node time overhead of a node class under A*max or Lazy A*."""
    if cost is not None:
        t1 = cost.t1 if t1 is None else t1
        t2 = cost.t2 if t2 is None else t2
        t_o = cost.t_o if t_o is None else t_o
    key = (str(strategy).lower(), node_class.upper())
    if key not in _OVERHEAD:
        raise ValueError(f"no overhead entry for {key}")
    with_h2, ops = _OVERHEAD[key]
    total = t1 + ops * t_o
    if with_h2:
        total = total + t2
    return total
