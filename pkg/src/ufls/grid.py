"""Reduced-order grid frequency model.

Single-machine swing equation with a first-order droop governor, integrated
with fixed-step classic Runge-Kutta (RK4). Load shedding and DER injection
enter as scheduled events that modify the power balance at step boundaries.

    df/dt  = (f0 / 2H) * (Pm + Pder - Pe - D * (f - f0)/f0)
    dPm/dt = ((Pm_ref - (1/droop) * (f - f0)/f0) - Pm) / Tg

Setting ``Tg = math.inf`` freezes the governor (dPm/dt = 0).
"""

import math
from bisect import insort
from dataclasses import dataclass, replace

from .errors import ConfigurationError, LatencyViolationError, SimulationFault
from .validation import check_in_range, check_non_negative, check_positive

# Events landing between grid steps are applied at the start of the enclosing
# step; the epsilon keeps events scheduled exactly on a step boundary from
# slipping a step due to float accumulation.
_TIME_EPS = 1e-9

EVENT_KINDS = ("generation-loss", "load-step", "shed", "der-setpoint")


@dataclass(frozen=True)
class GridParams:
    """Electromechanical parameters of the aggregated system.

    f0     nominal frequency, Hz
    H      inertia constant, s
    D      load damping, pu power per pu frequency
    droop  governor droop, dimensionless
    Tg     governor time constant, s (math.inf disables the governor)
    pf     system power factor
    Sbase  base power, pu reference
    """

    f0: float = 60.0
    H: float = 3.0
    D: float = 1.0
    droop: float = 0.08
    Tg: float = 2.5
    pf: float = 1.0
    Sbase: float = 1.0

    def __post_init__(self):
        check_positive(self.f0, "f0")
        check_positive(self.H, "H")
        check_non_negative(self.D, "D")
        if not self.droop > 0:
            raise ConfigurationError(f"droop must be > 0, got {self.droop!r}")
        if not self.Tg > 0:
            raise ConfigurationError(f"Tg must be > 0, got {self.Tg!r}")
        check_in_range(self.pf, "pf", 0.0, 1.0, inclusive_low=False)
        check_positive(self.Sbase, "Sbase")


@dataclass
class GridState:
    """Instantaneous grid state.

    Pm_ref is the governor's power reference (pre-disturbance dispatch);
    generation-loss events reduce it together with Pm.
    """

    t: float = 0.0
    f: float = 60.0
    Pm: float = 1.0
    Pe: float = 1.0
    Pder: float = 0.0
    shed_total: float = 0.0
    Pm_ref: float = 1.0

    def is_finite(self):
        return all(
            math.isfinite(v)
            for v in (self.t, self.f, self.Pm, self.Pe, self.Pder, self.shed_total, self.Pm_ref)
        )


@dataclass(frozen=True, order=True)
class GridEvent:
    """A scheduled change to the power balance, applied at ``at`` seconds."""

    at: float
    kind: str
    magnitude: float

    def __post_init__(self):
        if self.kind not in EVENT_KINDS:
            raise ConfigurationError(f"unknown event kind {self.kind!r}; expected one of {EVENT_KINDS}")
        check_non_negative(self.at, "event time")
        check_non_negative(self.magnitude, "event magnitude")


def _apply_event(state, event):
    if event.kind == "generation-loss":
        state.Pm -= event.magnitude
        state.Pm_ref -= event.magnitude
    elif event.kind == "load-step":
        state.Pe += event.magnitude
    elif event.kind == "shed":
        state.Pe = max(0.0, state.Pe - event.magnitude)
        state.shed_total += event.magnitude
    elif event.kind == "der-setpoint":
        state.Pder = event.magnitude


def _derivs(f, Pm, state, params):
    dev = (f - params.f0) / params.f0
    df = (params.f0 / (2.0 * params.H)) * (Pm + state.Pder - state.Pe - params.D * dev)
    if math.isinf(params.Tg):
        dPm = 0.0
    else:
        dPm = ((state.Pm_ref - dev / params.droop) - Pm) / params.Tg
    return df, dPm


def step(state, params, events, dt, *, _check=True):
    """Advance one RK4 step of length ``dt``, consuming events due in it.

    ``events`` must be sorted by effect time; due entries are popped from the
    front and applied at the step start. Returns the new state; the input
    state is not modified.
    """
    if dt <= 0:
        raise ConfigurationError(f"dt must be > 0, got {dt!r}")
    new = replace(state)
    t_next = new.t + dt
    while events and events[0].at < t_next - _TIME_EPS:
        _apply_event(new, events.pop(0))

    kf1, kp1 = _derivs(new.f, new.Pm, new, params)
    kf2, kp2 = _derivs(new.f + 0.5 * dt * kf1, new.Pm + 0.5 * dt * kp1, new, params)
    kf3, kp3 = _derivs(new.f + 0.5 * dt * kf2, new.Pm + 0.5 * dt * kp2, new, params)
    kf4, kp4 = _derivs(new.f + dt * kf3, new.Pm + dt * kp3, new, params)
    new.f += (dt / 6.0) * (kf1 + 2.0 * kf2 + 2.0 * kf3 + kf4)
    new.Pm += (dt / 6.0) * (kp1 + 2.0 * kp2 + 2.0 * kp3 + kp4)
    new.t = t_next

    if _check and (not new.is_finite() or new.f <= 0.0):
        raise SimulationFault(f"invalid grid state at t={state.t:.6f}: {new!r}", t=state.t)
    return new


def run_until(state, params, events, t_end, dt):
    """Integrate from ``state.t`` to ``t_end``; returns the post-step states.

    The returned trajectory holds one state per step (t0 + dt ... t_end) and
    is empty when ``t_end`` equals the current time. Deterministic for
    identical inputs.
    """
    if t_end < state.t - _TIME_EPS:
        raise ConfigurationError(f"t_end={t_end} precedes state.t={state.t}")
    n_steps = round((t_end - state.t) / dt)
    trajectory = []
    for _ in range(n_steps):
        state = step(state, params, events, dt)
        trajectory.append(state)
    return trajectory


def apply_actuation(events, action, now=None):
    """Insert the grid event for a shed or DER actuation, keeping time order.

    ``action`` is anything with ``t_effect`` and either ``amount`` (load
    shed) or ``setpoint`` (DER injection). Rejects effect times already in
    the simulated past when ``now`` is given.
    """
    if now is not None and action.t_effect < now - _TIME_EPS:
        raise LatencyViolationError(
            f"actuation effect time {action.t_effect:.6f} precedes simulation time {now:.6f}"
        )
    if hasattr(action, "amount"):
        event = GridEvent(at=action.t_effect, kind="shed", magnitude=action.amount)
    elif hasattr(action, "setpoint"):
        event = GridEvent(at=action.t_effect, kind="der-setpoint", magnitude=action.setpoint)
    else:
        raise ConfigurationError(f"unsupported actuation {action!r}")
    insort(events, event)
    return events
