"""Time-varying schedules for boundary data, withdrawals and boost ratios.

A profile maps time in seconds to a value; profiles with a ``period`` wrap
time first (``t mod period``).  Instances are immutable and freely shared.
"""

from __future__ import annotations

import bisect
import math
import warnings


class TimeProfile:
    """Base class; subclasses implement ``_value`` on wrapped time."""

    kind = ""

    def __init__(self, period: float | None = None):
        if period is not None and period <= 0:
            raise ValueError("period must be positive")
        self.period = period

    def evaluate(self, t: float) -> float:
        if self.period is not None:
            t = t % self.period
        return self._value(t)

    __call__ = evaluate

    def _value(self, t: float) -> float:
        raise NotImplementedError

    def to_config(self) -> dict:
        cfg = {"type": self.kind}
        if self.period is not None:
            cfg["period"] = self.period
        cfg.update(self._config_fields())
        return cfg

    def _config_fields(self) -> dict:
        raise NotImplementedError

    def __eq__(self, other):
        return type(self) is type(other) and self.to_config() == other.to_config()

    def __repr__(self):
        fields = ", ".join(f"{k}={v!r}" for k, v in self.to_config().items()
                           if k != "type")
        return f"{type(self).__name__}({fields})"


class Constant(TimeProfile):
    kind = "constant"

    def __init__(self, value: float, period: float | None = None):
        super().__init__(period)
        self.value = float(value)

    def _value(self, t):
        return self.value

    def _config_fields(self):
        return {"value": self.value}


class Harmonic(TimeProfile):
    """Affine sinusoid ``offset + amplitude * sin(omega (t - phase))``.

    With ``relative=True`` the amplitude is a fraction of the offset:
    ``offset * (1 + amplitude * sin(omega (t - phase)))``.
    """

    kind = "harmonic"

    def __init__(self, offset: float, amplitude: float, omega: float,
                 phase: float = 0.0, relative: bool = False,
                 period: float | None = None):
        super().__init__(period)
        self.offset = float(offset)
        self.amplitude = float(amplitude)
        self.omega = float(omega)
        self.phase = float(phase)
        self.relative = bool(relative)

    def _value(self, t):
        s = math.sin(self.omega * (t - self.phase))
        if self.relative:
            return self.offset * (1.0 + self.amplitude * s)
        return self.offset + self.amplitude * s

    def _config_fields(self):
        return {"offset": self.offset, "amplitude": self.amplitude,
                "omega": self.omega, "phase": self.phase,
                "relative": self.relative}


class PiecewiseLinear(TimeProfile):
    """Linear interpolation through ``(t, value)`` knots; clamped outside."""

    kind = "piecewise_linear"

    def __init__(self, knots, period: float | None = None, strict: bool = False):
        super().__init__(period)
        knots = [(float(t), float(v)) for t, v in knots]
        if len(knots) < 2:
            raise ValueError("need at least two knots")
        times = [t for t, _ in knots]
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError("knot times must be strictly increasing")
        self.knots = tuple(knots)
        self.strict = strict
        self._times = times
        self._values = [v for _, v in knots]

    def _value(self, t):
        times, values = self._times, self._values
        if t <= times[0]:
            if self.strict and t < times[0]:
                warnings.warn(f"profile evaluated at t={t} before first knot "
                              f"{times[0]}; clamping", stacklevel=3)
            return values[0]
        if t >= times[-1]:
            return values[-1]
        i = bisect.bisect_right(times, t)
        t0, t1 = times[i - 1], times[i]
        v0, v1 = values[i - 1], values[i]
        return v0 + (v1 - v0) * (t - t0) / (t1 - t0)

    def _config_fields(self):
        return {"knots": [[t, v] for t, v in self.knots]}


class StepSequence(TimeProfile):
    """Piecewise-constant values on right-open intervals ``[t_k, t_{k+1})``.

    ``intervals`` lists ``(t_end, value)`` pairs in increasing ``t_end``
    order; the final value also applies beyond the last ``t_end``.
    """

    kind = "step_sequence"

    def __init__(self, intervals, period: float | None = None):
        super().__init__(period)
        intervals = [(float(te), float(v)) for te, v in intervals]
        if not intervals:
            raise ValueError("need at least one interval")
        ends = [te for te, _ in intervals]
        if any(b <= a for a, b in zip(ends, ends[1:])):
            raise ValueError("interval ends must be strictly increasing")
        self.intervals = tuple(intervals)
        self._ends = ends
        self._values = [v for _, v in intervals]

    def _value(self, t):
        i = bisect.bisect_right(self._ends, t)
        return self._values[min(i, len(self._values) - 1)]

    def _config_fields(self):
        return {"intervals": [[te, v] for te, v in self.intervals]}


_KINDS = {cls.kind: cls for cls in (Constant, Harmonic, PiecewiseLinear,
                                    StepSequence)}


def profile_from_config(cfg, strict: bool = False) -> TimeProfile:
    """Build a profile from its config dict; bare numbers mean constant."""
    if isinstance(cfg, (int, float)):
        return Constant(float(cfg))
    if not isinstance(cfg, dict) or "type" not in cfg:
        raise ValueError(f"profile config must be a number or a dict with "
                         f"'type', got {cfg!r}")
    kind = cfg["type"]
    if kind not in _KINDS:
        raise ValueError(f"unknown profile type {kind!r}")
    kwargs = {k: v for k, v in cfg.items() if k != "type"}
    if kind == "piecewise_linear":
        kwargs.setdefault("strict", strict)
    return _KINDS[kind](**kwargs)
