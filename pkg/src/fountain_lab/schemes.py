"""Encoder and receiver state machines for the three feedback-driven schemes.

Three encoders share one completion phase (degree-adaptive symbols at the
optimal degree for the last fed-back recovery fraction) and differ in how
they get there:

* ``OFC``   -- degree-2 symbols grow one large component to a fraction
  ``beta0`` of the nodes, then degree-1 symbols until that component turns
  black, then completion.
* ``OFCNB`` -- random degree-1 symbols until a fraction ``gamma0`` is
  recovered, then completion immediately (no component build-up stage).
* ``SOFC``  -- every source symbol is sent exactly once, in index order,
  then completion.

The receiver drives all phase changes through feedback messages.  Zero
feedback latency and a lossless feedback channel are assumed; a configurable
delay exists in the session driver for experimentation.
"""

from __future__ import annotations

import enum
import math
import random
import warnings
from dataclasses import dataclass

from .channel import encoder_seed
from .degree import optimal_degree, useful_prob
from .graph import Case, CodedSymbol, DecodeGraph, SourceBlock

__all__ = [
    "OFC",
    "OFCNB",
    "SOFC",
    "SchemeConfig",
    "EveryDegreeChange",
    "Threshold",
    "FeedbackPolicy",
    "Phase",
    "FeedbackKind",
    "FeedbackMsg",
    "ProtocolError",
    "Encoder",
    "Receiver",
    "degree_update_due",
    "scheme_name",
]


class ProtocolError(RuntimeError):
    """A feedback message arrived that the current phase cannot accept."""


@dataclass(frozen=True)
class OFC:
    """Two-phase scheme: component build-up to fraction beta0, then completion."""

    beta0: float = 0.5

    def __post_init__(self):
        if not 0.0 < self.beta0 < 1.0:
            raise ValueError(f"beta0 must be in (0, 1), got {self.beta0}")


@dataclass(frozen=True)
class OFCNB:
    """Build-up-free scheme: degree-1 seeding to fraction gamma0, then completion."""

    gamma0: float

    def __post_init__(self):
        if not 0.0 < self.gamma0 <= 1.0:
            raise ValueError(f"gamma0 must be in (0, 1], got {self.gamma0}")
        if self.gamma0 > 0.5:
            warnings.warn(
                "gamma0 > 0.5 buys no extra intermediate performance and "
                "inflates the full-recovery overhead",
                UserWarning,
                stacklevel=2,
            )


@dataclass(frozen=True)
class SOFC:
    """Systematic scheme: each source symbol sent once, then completion."""


SchemeConfig = OFC | OFCNB | SOFC


def scheme_name(config: SchemeConfig) -> str:
    return {OFC: "ofc", OFCNB: "ofcnb", SOFC: "sofc"}[type(config)]


@dataclass(frozen=True)
class EveryDegreeChange:
    """Feed back whenever the optimal degree changes."""


@dataclass(frozen=True)
class Threshold:
    """Feed back only when the usable probability improves by more than delta_p."""

    delta_p: float = 0.01

    def __post_init__(self):
        if not 0.0 < self.delta_p < 1.0:
            raise ValueError(f"delta_p must be in (0, 1), got {self.delta_p}")


FeedbackPolicy = EveryDegreeChange | Threshold


class Phase(enum.Enum):
    BUILD_UP = "build-up"
    DEGREE1_SEEDING = "degree1-seeding"
    SYSTEMATIC = "systematic"
    COMPLETION = "completion"
    DONE = "done"


class FeedbackKind(enum.IntEnum):
    LARGEST_COMPONENT_REACHED = 0
    COMPONENT_BLACK = 1
    BETA_UPDATE = 2
    COMPLETE = 3


@dataclass(frozen=True)
class FeedbackMsg:
    """Receiver-to-sender control message; ``recovered`` is the black count."""

    kind: FeedbackKind
    recovered: int = 0


def degree_update_due(m_current: int, beta: float, k: int, policy: FeedbackPolicy) -> bool:
    """Completion-phase rule: should the receiver feed back a new degree?

    With the threshold policy the update is sent only when the freshly
    optimal degree beats the degree the encoder is still using by more than
    ``delta_p`` in usable probability, both evaluated at the current beta.
    """
    m_new = optimal_degree(beta, k)
    if m_new == m_current:
        return False
    if isinstance(policy, EveryDegreeChange):
        return True
    return useful_prob(m_new, beta) > useful_prob(m_current, beta) + policy.delta_p


class Encoder:
    """Sender-side phase machine; emits coded symbols, consumes feedback."""

    def __init__(
        self,
        config: SchemeConfig,
        source: SourceBlock,
        seed: int = 0,
        trial_id: int = 0,
        payload_mode: str = "full",
    ):
        if payload_mode not in ("full", "counting"):
            raise ValueError(f"unknown payload_mode {payload_mode!r}")
        self.config = config
        self.source = source
        self.k = source.k
        self.payload_mode = payload_mode
        self.rng = random.Random(encoder_seed(seed, trial_id))
        if isinstance(config, OFC):
            self.phase = Phase.BUILD_UP
        elif isinstance(config, OFCNB):
            self.phase = Phase.DEGREE1_SEEDING
        else:
            self.phase = Phase.SYSTEMATIC
        self.known_recovered = 0
        self.current_m = 2 if isinstance(config, OFC) else 1
        self.sent_count = 0
        self.phase_sent: dict[str, int] = {}
        self._next_index = 0

    @property
    def known_beta(self) -> float:
        return self.known_recovered / self.k

    def _emit(self, indices: tuple[int, ...]) -> CodedSymbol:
        payload = self.source.encode(indices) if self.payload_mode == "full" else None
        self.sent_count += 1
        label = self.phase.value
        self.phase_sent[label] = self.phase_sent.get(label, 0) + 1
        return CodedSymbol(indices, payload)

    def _enter_completion(self) -> None:
        self.phase = Phase.COMPLETION
        self.current_m = optimal_degree(self.known_beta, self.k)

    def next_symbol(self) -> CodedSymbol:
        if self.phase is Phase.DONE:
            raise ProtocolError("session already complete")
        if self.phase is Phase.BUILD_UP:
            return self._emit(tuple(sorted(self.rng.sample(range(self.k), 2))))
        if self.phase is Phase.DEGREE1_SEEDING:
            return self._emit((self.rng.randrange(self.k),))
        if self.phase is Phase.SYSTEMATIC:
            if self._next_index < self.k:
                idx = self._next_index
                self._next_index += 1
                return self._emit((idx,))
            # All indexes sent and no feedback seen yet (tail frames erased):
            # fall through to completion with the stale recovery estimate.
            self._enter_completion()
        return self._emit(tuple(sorted(self.rng.sample(range(self.k), self.current_m))))

    def on_feedback(self, msg: FeedbackMsg) -> None:
        if self.phase is Phase.DONE:
            raise ProtocolError("feedback after session completion")
        kind = msg.kind
        if kind is FeedbackKind.COMPLETE:
            self.phase = Phase.DONE
            self.known_recovered = msg.recovered
            return
        if kind is FeedbackKind.LARGEST_COMPONENT_REACHED:
            if not (isinstance(self.config, OFC) and self.phase is Phase.BUILD_UP):
                raise ProtocolError(f"unexpected {kind.name} in phase {self.phase.name}")
            self.phase = Phase.DEGREE1_SEEDING
            self.current_m = 1
            return
        if kind is FeedbackKind.COMPONENT_BLACK:
            if not (isinstance(self.config, OFC) and self.phase is Phase.DEGREE1_SEEDING):
                raise ProtocolError(f"unexpected {kind.name} in phase {self.phase.name}")
            self.known_recovered = msg.recovered
            self._enter_completion()
            return
        # BETA_UPDATE
        if isinstance(self.config, OFC) and self.phase is not Phase.COMPLETION:
            raise ProtocolError(f"unexpected BETA_UPDATE in phase {self.phase.name}")
        self.known_recovered = msg.recovered
        if self.phase in (Phase.DEGREE1_SEEDING, Phase.SYSTEMATIC):
            self._enter_completion()
        else:
            self.current_m = optimal_degree(self.known_beta, self.k)


class Receiver:
    """Decoder plus feedback generator.

    Mirrors the encoder's phase so it knows which event to watch for:
    component-size threshold and component-black for OFC, the recovered-count
    threshold for OFCNB, and end of the systematic pass for SOFC (detected
    from delivered sequence numbers, so it works identically over the framed
    link).  During completion it applies the degree-update policy.  Emits at
    most one message per delivered symbol; COMPLETE subsumes anything else.
    """

    def __init__(
        self,
        k: int,
        config: SchemeConfig,
        policy: FeedbackPolicy = EveryDegreeChange(),
        track_values: bool = True,
    ):
        self.k = k
        self.config = config
        self.policy = policy
        self.graph = DecodeGraph(k, track_values=track_values)
        if isinstance(config, OFC):
            self._mirror = Phase.BUILD_UP
            self._threshold = math.ceil(config.beta0 * k)
        elif isinstance(config, OFCNB):
            self._mirror = Phase.DEGREE1_SEEDING
            self._threshold = math.ceil(config.gamma0 * k)
        else:
            self._mirror = Phase.SYSTEMATIC
            self._threshold = k
        self._encoder_m = 2 if isinstance(config, OFC) else 1
        self._marker: int | None = None
        self._complete_sent = False
        self.feedback_sent = 0

    @property
    def recovered(self) -> int:
        return self.graph.recovered_count

    @property
    def complete(self) -> bool:
        return self.graph.complete

    def recovered_payloads(self) -> list[bytes | None]:
        return list(self.graph.values)

    def _make(self, kind: FeedbackKind) -> FeedbackMsg:
        self.feedback_sent += 1
        return FeedbackMsg(kind, self.graph.recovered_count)

    def _sync_degree(self) -> None:
        self._encoder_m = optimal_degree(self.graph.beta(), self.k)

    def receive(self, sym: CodedSymbol, seq: int | None = None) -> FeedbackMsg | None:
        """Process one delivered symbol; returns the feedback to send, if any."""
        cls, newly = self.graph.process(sym)
        if self.graph.complete and not self._complete_sent:
            self._complete_sent = True
            self._mirror = Phase.DONE
            return self._make(FeedbackKind.COMPLETE)
        if self._mirror is Phase.BUILD_UP:
            if self.graph.largest_white_component() >= self._threshold:
                # Remember one member of the threshold component; components
                # only merge, so it stays inside as the component grows.
                self._marker = cls.a if cls.case is Case.CASE2 else sym.indices[0]
                self._mirror = Phase.DEGREE1_SEEDING
                return self._make(FeedbackKind.LARGEST_COMPONENT_REACHED)
            return None
        if self._mirror is Phase.DEGREE1_SEEDING and isinstance(self.config, OFC):
            if self._marker is not None and self.graph.color[self._marker]:
                self._mirror = Phase.COMPLETION
                self._sync_degree()
                return self._make(FeedbackKind.COMPONENT_BLACK)
            return None
        if self._mirror is Phase.DEGREE1_SEEDING:   # OFCNB seeding
            if self.graph.recovered_count >= self._threshold:
                self._mirror = Phase.COMPLETION
                self._sync_degree()
                return self._make(FeedbackKind.BETA_UPDATE)
            return None
        if self._mirror is Phase.SYSTEMATIC:
            # seq k-1 is the last systematic slot; any larger seq means the
            # sender has moved on and some tail frames were erased.
            if seq is not None and seq >= self.k - 1:
                self._mirror = Phase.COMPLETION
                self._sync_degree()
                return self._make(FeedbackKind.BETA_UPDATE)
            return None
        if self._mirror is Phase.COMPLETION:
            if degree_update_due(self._encoder_m, self.graph.beta(), self.k, self.policy):
                self._sync_degree()
                return self._make(FeedbackKind.BETA_UPDATE)
        return None
