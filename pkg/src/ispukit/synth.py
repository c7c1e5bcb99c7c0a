"""Deterministic synthetic accelerometer streams for the five activity classes.

The real recordings behind the task are not redistributable, so end-to-end
tests and trainer smoke runs use generated streams with class-characteristic
signatures:

* idle      - gravity offset on z plus low Gaussian noise
* stand_up  - one negative-then-positive transient on z, forward lean on x
* sit_down  - the mirrored transient on z, backward lean on x
* rotate    - sustained quadrature sinusoid on x/y
* move      - leaky random walk on all three axes

The lean bump keeps stand_up and sit_down distinguishable inside any single
window (the z transients alone are point-symmetric between the two classes).

Randomness comes from the counter-based generator in :mod:`ispukit.rng`; a
fixed seed reproduces a stream byte for byte. Each acquisition consumes a
fixed budget of six Gaussian draws (three noise, three walk steps), so
segment values do not depend on how the stream is chunked during generation.
Gravity is a constant +16384 counts on z (the +-2 g full-scale convention);
every sample is clamped to the signed 16-bit range.
"""

from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

from . import rng
from .features import INT16_MAX, INT16_MIN
from .labels import ClassLabel

GRAVITY_COUNTS = 16384
DEFAULT_NOISE_FLOOR = 32.0

TRANSIENT_AMPLITUDE = 4000.0   # stand_up / sit_down z swing per unit intensity
LEAN_AMPLITUDE = 1000.0        # signed x bump accompanying the z transient
ROTATE_AMPLITUDE = 1500.0      # x/y sinusoid per unit intensity
ROTATE_PERIOD = 64             # acquisitions per revolution
WALK_STEP = 600.0              # move step scale per unit intensity
WALK_DECAY = 0.9

_DRAWS_PER_ACQ = 6             # 3 noise draws + 3 walk-step draws, always reserved


@dataclass(frozen=True)
class Segment:
    label: ClassLabel
    duration: int              # acquisitions
    intensity: float = 1.0

    def __post_init__(self):
        if self.duration <= 0:
            raise ValueError("segment duration must be positive")
        if self.intensity <= 0:
            raise ValueError("segment intensity must be positive")


@dataclass(frozen=True)
class ActivityScript:
    segments: tuple
    seed: int = 0
    noise_floor: float = DEFAULT_NOISE_FLOOR

    def __post_init__(self):
        object.__setattr__(self, "segments", tuple(self.segments))
        if self.noise_floor < 0:
            raise ValueError("noise floor must be nonnegative")

    @property
    def total_acquisitions(self) -> int:
        return sum(seg.duration for seg in self.segments)


def _segment_values(seg: Segment, start_index: int, seed: int,
                    noise_floor: float) -> np.ndarray:
    """(duration, 3) float samples for one segment, before clamping."""
    n = seg.duration
    draw0 = _DRAWS_PER_ACQ * start_index
    noise = rng.gaussians(seed, draw0, _DRAWS_PER_ACQ * n).reshape(n, _DRAWS_PER_ACQ)
    out = noise_floor * noise[:, 0:3]
    out[:, 2] += GRAVITY_COUNTS

    phase = (np.arange(n) + 0.5) / n           # position within the segment, (0, 1)
    lean = seg.intensity * LEAN_AMPLITUDE * np.sin(np.pi * phase) ** 2
    if seg.label == ClassLabel.STAND_UP:
        out[:, 2] += -seg.intensity * TRANSIENT_AMPLITUDE * np.sin(2 * np.pi * phase)
        out[:, 0] += lean
    elif seg.label == ClassLabel.SIT_DOWN:
        out[:, 2] += seg.intensity * TRANSIENT_AMPLITUDE * np.sin(2 * np.pi * phase)
        out[:, 0] -= lean
    elif seg.label == ClassLabel.ROTATE:
        angle = 2 * np.pi * np.arange(n) / ROTATE_PERIOD
        out[:, 0] += seg.intensity * ROTATE_AMPLITUDE * np.sin(angle)
        out[:, 1] += seg.intensity * ROTATE_AMPLITUDE * np.cos(angle)
    elif seg.label == ClassLabel.MOVE:
        # leaky integration of the reserved step draws, state 0 at segment start
        steps = seg.intensity * WALK_STEP * noise[:, 3:6]
        walk = lfilter([1.0], [1.0, -WALK_DECAY], steps, axis=0)
        out += walk
    return out


def generate(script: ActivityScript):
    """Yield (index, x, y, z, label) tuples; values are ints in 16-bit range."""
    index = 0
    for seg in script.segments:
        values = _segment_values(seg, index, script.seed, script.noise_floor)
        clamped = np.clip(np.rint(values), INT16_MIN, INT16_MAX).astype(np.int64)
        for row in clamped:
            yield index, int(row[0]), int(row[1]), int(row[2]), seg.label
            index += 1


def parse_script(text: str) -> tuple:
    """Parse inline segment syntax 'label:duration[:intensity],...'."""
    from .labels import parse_label

    segments = []
    text = text.strip()
    if not text:
        return tuple(segments)
    for token in text.split(","):
        parts = token.strip().split(":")
        if len(parts) not in (2, 3):
            raise ValueError(
                f"segment {token!r} must look like label:duration[:intensity]"
            )
        label = parse_label(parts[0])
        duration = int(parts[1])
        intensity = float(parts[2]) if len(parts) == 3 else 1.0
        segments.append(Segment(label, duration, intensity))
    return tuple(segments)
