"""Trigger logic, load-excess computation and actuation planning.

A hard underfrequency pickup acts immediately; soft pickups act on the rate
of change of frequency with a delay looked up from a band table (steeper
decline, shorter delay). The load excess factor converts a predicted
frequency excursion into the per-unit overload to shed or to cover with DER
injection.
"""

import math
from collections import deque
from dataclasses import dataclass

from .errors import ConfigurationError
from .validation import check_in_range, check_int_at_least, check_non_negative, check_positive

# Only the end rows are fixed by relay practice (3 cycles for the steepest
# band, 21 for the shallowest); the interior fills in monotone steps.
DEFAULT_ROCOF_TABLE = (
    (0.33, 0.37, 21),
    (0.38, 0.99, 15),
    (1.00, 2.32, 8),
    (2.33, 15.0, 3),
)

RELAY_CYCLE_HZ = 60.0


@dataclass(frozen=True)
class RocofBand:
    """One soft-threshold row: |R| band in Hz/s and its delay in cycles."""

    low: float
    high: float
    delay_cycles: int

    def __post_init__(self):
        check_positive(self.low, "band low")
        if not self.high > self.low:
            raise ConfigurationError(f"band high must exceed low, got {self.low}..{self.high}")
        check_non_negative(self.delay_cycles, "delay cycles")

    @property
    def delay_seconds(self):
        return self.delay_cycles / RELAY_CYCLE_HZ


@dataclass(frozen=True)
class Thresholds:
    """Hard frequency pickup plus the soft ROCOF band table.

    rocof_window_s is the averaging window dt of the rate computation on
    the estimate stream.
    """

    f_hard: float = 59.3
    rocof_window_s: float = 1.0
    table: tuple = tuple(RocofBand(*row) for row in DEFAULT_ROCOF_TABLE)

    def __post_init__(self):
        check_positive(self.f_hard, "f_hard")
        check_positive(self.rocof_window_s, "rocof_window_s")
        if not self.table:
            raise ConfigurationError("rocof table must contain at least one band")
        rows = sorted(self.table, key=lambda b: b.low)
        for prev, cur in zip(rows, rows[1:]):
            if cur.low <= prev.high:
                raise ConfigurationError(
                    f"rocof bands overlap: {prev.low}..{prev.high} and {cur.low}..{cur.high}"
                )
            if cur.delay_cycles > prev.delay_cycles:
                raise ConfigurationError("rocof delays must be non-increasing with |R|")
        object.__setattr__(self, "table", tuple(rows))


@dataclass(frozen=True)
class ShedPolicy:
    """Staging of corrective actions.

    stage_fraction is the share of the computed excess shed per stage (1.0
    single-stage, 0.5 multi-stage); predictions repeat every
    repredict_interval while the event is active; sheds take effect
    processing_delay after being issued. A prediction at or above
    recovery_band suppresses further action.
    """

    stages: int = 1
    stage_fraction: float = 1.0
    repredict_interval: float = 1.0
    processing_delay: float = 1.0
    recovery_band: float = 59.9

    def __post_init__(self):
        if self.stages < 1:
            raise ConfigurationError(f"stages must be >= 1, got {self.stages!r}")
        check_in_range(self.stage_fraction, "stage_fraction", 0.0, 1.0, inclusive_low=False)
        check_non_negative(self.repredict_interval, "repredict_interval")
        check_non_negative(self.processing_delay, "processing_delay")
        check_positive(self.recovery_band, "recovery_band")


@dataclass(frozen=True)
class ShedAction:
    """Load disconnection order: issued, effective after the processing delay."""

    t_issue: float
    t_effect: float
    amount: float

    def __post_init__(self):
        check_non_negative(self.amount, "shed amount")
        if self.t_effect < self.t_issue:
            raise ConfigurationError("shed effect time precedes issue time")


@dataclass(frozen=True)
class DerCommand:
    """DER injection setpoint order, effective after the actuation delay."""

    t_issue: float
    t_effect: float
    setpoint: float

    def __post_init__(self):
        check_non_negative(self.setpoint, "der setpoint")
        if self.t_effect < self.t_issue:
            raise ConfigurationError("DER effect time precedes issue time")


def rocof(f1, f2, dt):
    """Average rate of change of frequency over the window dt."""
    if not dt > 0:
        raise ConfigurationError(f"dt must be > 0, got {dt!r}")
    return (f2 - f1) / dt


def load_excess(R_p, H, p, f1, f_p):
    """Per-unit load excess implied by a frequency excursion.

    L = R_p * H * (1 - f_p^2/f1^2) / (p * (f_p - f1)). The removable
    singularity at f_p == f1 returns 0: no deviation, no excess.
    """
    if not p > 0:
        raise ConfigurationError(f"power factor must be > 0, got {p!r}")
    if not f1 > 0:
        raise ConfigurationError(f"f1 must be > 0, got {f1!r}")
    if abs(f_p - f1) < 1e-6:
        return 0.0
    return R_p * H * (1.0 - (f_p * f_p) / (f1 * f1)) / (p * (f_p - f1))


@dataclass(frozen=True)
class Trigger:
    """Fired trigger decision."""

    t: float
    reason: str  # "hard" or "soft"
    rocof: float
    band: RocofBand | None = None


class TriggerMonitor:
    """Consumes the estimate stream and fires hard/soft triggers.

    Soft bands behave as pickup elements: a band is picked up while the
    windowed |R| is at or above its lower edge, and trips after enough
    consecutive qualifying samples to cover its delay. A single qualifying
    sample never trips. Steeper sustained rates therefore never trip later
    than shallower ones.
    """

    def __init__(self, thresholds, rate):
        check_positive(rate, "rate")
        self.thresholds = thresholds
        self.rate = float(rate)
        window_samples = max(1, round(thresholds.rocof_window_s * rate))
        self._history = deque(maxlen=window_samples + 1)
        self._required = [
            max(2, math.ceil(band.delay_seconds * rate)) for band in thresholds.table
        ]
        self._counts = [0] * len(thresholds.table)
        self.fired = None

    def push(self, t, f):
        """Feed one estimate; returns a Trigger the first time one fires."""
        if self.fired is not None:
            return None
        self._history.append((t, f))
        if f < self.thresholds.f_hard:
            self.fired = Trigger(t=t, reason="hard", rocof=self._window_rocof())
            return self.fired
        r = self._window_rocof()
        if r is None:
            return None
        mag = abs(r)
        for i, band in enumerate(self.thresholds.table):
            if mag >= band.low:
                self._counts[i] += 1
                if self._counts[i] >= self._required[i]:
                    self.fired = Trigger(t=t, reason="soft", rocof=r, band=band)
                    return self.fired
            else:
                self._counts[i] = 0
        return None

    def _window_rocof(self):
        if len(self._history) < 2:
            return None
        t0, f0 = self._history[0]
        t1, f1 = self._history[-1]
        return rocof(f0, f1, t1 - t0)


def check_trigger(samples, thresholds, rate):
    """Replay a (t, f) sequence through a fresh monitor; earliest trigger or None.

    Accepts (t, f) pairs or anything with .t and .f_meas attributes.
    """
    monitor = TriggerMonitor(thresholds, rate)
    for s in samples:
        t, f = (s.t, s.f_meas) if hasattr(s, "f_meas") else (s[0], s[1])
        hit = monitor.push(t, f)
        if hit is not None:
            return hit
    return None


def plan_shed(pred, grid, policy, t_now, connected_load=1.0):
    """Turn a horizon prediction into one shed stage, or decline.

    Returns None when the prediction shows recovery (f_p at or above the
    recovery band) or when the computed excess is non-positive. The shed
    amount is stage_fraction of the excess, as per-unit of connected load.
    """
    if pred.f_p >= policy.recovery_band:
        return None
    r_p = rocof(pred.f1, pred.f_p, pred.t_p)
    excess = load_excess(r_p, grid.H, grid.pf, pred.f1, pred.f_p)
    if excess <= 0.0:
        return None
    amount = policy.stage_fraction * excess * connected_load
    return ShedAction(t_issue=t_now, t_effect=t_now + policy.processing_delay, amount=amount)


def der_setpoint(f_now, grid, t_now, window_s=0.5, load_base=1.0, delay_s=0.5):
    """Instantaneous DER order for the continuous-compensation mode.

    The mismatch is evaluated against the nominal-frequency reference: the
    rate is the deviation spread over the sliding window, which makes the
    commanded injection track the depth of the excursion and vanish once
    frequency is back at nominal.
    """
    r_p = rocof(grid.f0, f_now, window_s)
    excess = load_excess(r_p, grid.H, grid.pf, grid.f0, f_now)
    setpoint = max(0.0, excess * load_base)
    return DerCommand(t_issue=t_now, t_effect=t_now + delay_s, setpoint=setpoint)


class DerController:
    """Continuous mismatch compensation via DER injection.

    Arms after ``persistence`` consecutive estimates deviate from nominal by
    more than ``deadband_hz`` (so measurement noise alone never actuates),
    then emits one setpoint command per estimate, effective ``delay_s``
    later. Once armed it stays armed; the commanded injection itself decays
    to zero as frequency recovers.
    """

    def __init__(self, grid, window_s=0.5, deadband_hz=0.08, persistence=3, delay_s=0.5, load_base=1.0):
        check_positive(window_s, "window_s")
        check_non_negative(deadband_hz, "deadband_hz")
        check_non_negative(delay_s, "delay_s")
        self.grid = grid
        self.window_s = float(window_s)
        self.deadband_hz = float(deadband_hz)
        self.persistence = check_int_at_least(persistence, "persistence", 1)
        self.delay_s = float(delay_s)
        self.load_base = float(load_base)
        self.armed_at = None
        self._deviating = 0

    def update(self, t, f_est):
        """Feed one estimate; returns the DerCommand to issue now, if armed."""
        if self.armed_at is None:
            if abs(f_est - self.grid.f0) > self.deadband_hz:
                self._deviating += 1
                if self._deviating >= self.persistence:
                    self.armed_at = t
            else:
                self._deviating = 0
        if self.armed_at is None:
            return None
        return der_setpoint(
            f_est, self.grid, t,
            window_s=self.window_s, load_base=self.load_base, delay_s=self.delay_s,
        )
