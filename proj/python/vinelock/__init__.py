"""Shape-locking vine robot toolkit.

Structured values (shapes, plans, designs) use the same JSON layout as the
command-line tool; the helpers below convert to and from Python objects.
"""

import json

from . import _vinelock
from ._vinelock import (
    VinelockError,
    beam_tip_force,
    bend_angle_from_lengths,
    calibrate_fastener,
    contraction_ratio,
    growth_for_bend,
    mean_config_error,
    min_bend_radius,
    resistance_torque,
    separation_pressure,
    tip_deflection,
)

__all__ = [
    "Session",
    "VinelockError",
    "beam_tip_force",
    "bend_angle_from_lengths",
    "calibrate_fastener",
    "contraction_ratio",
    "fit_shape",
    "forward_kinematics",
    "growth_for_bend",
    "mean_config_error",
    "min_bend_radius",
    "plan_from_shape",
    "predict",
    "resistance_torque",
    "separation_pressure",
    "tip_deflection",
]


def _dump(obj):
    if obj is None:
        return ""
    return obj if isinstance(obj, str) else json.dumps(obj)


def forward_kinematics(shape, samples_per_mm=0.2):
    return _vinelock.forward_kinematics(_dump(shape), samples_per_mm)


def plan_from_shape(shape, design=None, pressure_kpa=7.0, mode="proportional"):
    return json.loads(_vinelock.plan_from_shape(_dump(shape), _dump(design), pressure_kpa, mode))


def predict(plan, design=None, samples_per_mm=0.2):
    return _vinelock.predict(_dump(plan), _dump(design), samples_per_mm)


def fit_shape(waypoints, design=None, tol_mm=5.0):
    return json.loads(_vinelock.fit_shape(waypoints, _dump(design), tol_mm))


class Session:
    """One simulated deployment driven by protocol messages."""

    def __init__(self, design=None, pressure_kpa=7.0, disturbance=False):
        self._session = _vinelock.Session(_dump(design), pressure_kpa, disturbance)

    def send(self, message):
        return json.loads(self._session.handle_line(_dump(message)))

    def handle_line(self, line):
        return self._session.handle_line(line)
