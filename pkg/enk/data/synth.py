"""Synthetic ERP-style epochs.

Each trial is white noise plus the event of its class: a raised-cosine bump
``amplitude * (1 - cos(2 pi k / width)) / 2`` for ``k`` in ``[0, width)``,
starting at ``latency`` on the event's channels. Noiseless, a trial's energy
is ``len(channels) * 3 * width * amplitude**2 / 8`` (width >= 3).
"""

import logging
from typing import List, Optional

import numpy as np
from pydantic import BaseModel, Field, ValidationError, model_validator

from ..errors import ParameterError
from ..presets import get_preset
from .epochs import EpochSet

logger = logging.getLogger(__name__)


class ClassEvent(BaseModel):
    latency: int = Field(default=0, ge=0, description="First sample of the event")
    width: int = Field(default=1, ge=1, description="Event length in samples")
    amplitude: float = 0.0
    channels: Optional[List[int]] = Field(default=None, description="Channel subset; None means all channels")


class SynthSpec(BaseModel):
    channels: int = Field(..., ge=1)
    samples: int = Field(..., ge=1)
    trials: int = Field(..., ge=1)
    class_count: int = Field(..., ge=2)
    sample_rate: float = Field(default=250.0, gt=0)
    events: List[ClassEvent]
    noise_std: float = Field(default=0.1, ge=0)
    seed: int = Field(default=0, ge=0)

    @model_validator(mode="after")
    def check_events(self):
        if len(self.events) != self.class_count:
            raise ValueError(f"{len(self.events)} class events for {self.class_count} classes")
        for k, event in enumerate(self.events):
            if event.latency + event.width > self.samples:
                raise ValueError(f"class {k}: latency + width = {event.latency + event.width} exceeds {self.samples} samples")
            if event.channels is not None and any(c < 0 or c >= self.channels for c in event.channels):
                raise ValueError(f"class {k}: event channel outside [0, {self.channels})")
        return self


def raised_cosine(width: int, amplitude: float) -> np.ndarray:
    return amplitude * 0.5 * (1.0 - np.cos(2.0 * np.pi * np.arange(width) / width))


def event_energy(event: ClassEvent, channels: int) -> float:
    """Closed-form sum of squares of one noiseless event (valid for width >= 3)."""
    n_channels = channels if event.channels is None else len(event.channels)
    return n_channels * 3.0 * event.width * event.amplitude ** 2 / 8.0


def event_template(spec: SynthSpec, class_idx: int) -> np.ndarray:
    """Noiseless ``[channels, samples]`` waveform of one class."""
    event = spec.events[class_idx]
    template = np.zeros((spec.channels, spec.samples))
    rows = slice(None) if event.channels is None else event.channels
    template[rows, event.latency:event.latency + event.width] = raised_cosine(event.width, event.amplitude)
    return template


def balanced_labels(trials: int, class_count: int, rng: np.random.Generator) -> np.ndarray:
    """Class counts differ by at most one; order is shuffled."""
    return rng.permutation(np.arange(trials) % class_count)


def synth_generate(spec: SynthSpec) -> EpochSet:
    label_seq, noise_seq = np.random.SeedSequence(spec.seed).spawn(2)
    labels = balanced_labels(spec.trials, spec.class_count, np.random.default_rng(label_seq))
    templates = np.stack([event_template(spec, k) for k in range(spec.class_count)])
    data = templates[labels]
    if spec.noise_std > 0:
        data = data + spec.noise_std * np.random.default_rng(noise_seq).standard_normal(data.shape)
    logger.debug("generated %d trials (%d classes, noise %.3g, seed %d)", spec.trials, spec.class_count,
                 spec.noise_std, spec.seed)
    return EpochSet(data=data, labels=labels, sample_rate=spec.sample_rate, class_count=spec.class_count)


def _ms(sample_rate: float, ms: float) -> int:
    return int(round(sample_rate * ms / 1000.0))


def _region(channels: int, where: str) -> List[int]:
    """A quarter of the channels at the front, middle or back of the montage."""
    n = max(1, channels // 4)
    start = {"front": 0, "middle": (channels - n) // 2, "back": channels - n}[where]
    return list(range(start, start + n))


def preset_spec(name: str, trials: int = 200, noise_std: float = 0.1, amplitude: float = 1.0,
                seed: int = 0) -> SynthSpec:
    """SynthSpec with a preset's shape and ERP-motivated events.

    * cc / phrc: class 1 carries a frontal negative deflection 150-250 ms after onset.
    * p300: class 1 carries a parietal positive deflection starting at 0.3 * samples.
    * mrcp: four classes with negative central deflections at staggered latencies.
    * latency: two classes with the same event at different latencies, so only
      time position separates them (4 channels x 64 samples).
    """
    if name.lower() == "latency":
        return latency_task_spec(trials=trials, noise_std=noise_std, amplitude=amplitude, seed=seed)
    preset = get_preset(name)
    rate, c, t = preset.sample_rate, preset.channels, preset.samples
    if preset.name in ("cc", "phrc"):
        events = [ClassEvent(), ClassEvent(latency=_ms(rate, 150), width=_ms(rate, 100), amplitude=-amplitude,
                                           channels=_region(c, "front"))]
    elif preset.name == "p300":
        events = [ClassEvent(), ClassEvent(latency=int(round(0.3 * t)), width=_ms(rate, 100), amplitude=amplitude,
                                           channels=_region(c, "back"))]
    else:
        width = t // 10
        events = [ClassEvent(latency=int(round(t * (0.15 + 0.2 * k))), width=width, amplitude=-amplitude,
                             channels=_region(c, "middle")) for k in range(preset.class_count)]
    try:
        return SynthSpec(channels=c, samples=t, trials=trials, class_count=preset.class_count, sample_rate=rate,
                         events=events, noise_std=noise_std, seed=seed)
    except ValidationError as exc:
        raise ParameterError(str(exc)) from exc


def latency_task_spec(channels: int = 4, samples: int = 64, trials: int = 200, noise_std: float = 0.1,
                      amplitude: float = 1.0, seed: int = 0, sample_rate: float = 250.0) -> SynthSpec:
    """Two classes distinguished only by event latency."""
    width = max(3, samples // 8)
    events = [
        ClassEvent(latency=samples // 4, width=width, amplitude=amplitude),
        ClassEvent(latency=(samples * 5) // 8, width=width, amplitude=amplitude),
    ]
    try:
        return SynthSpec(channels=channels, samples=samples, trials=trials, class_count=2, sample_rate=sample_rate,
                         events=events, noise_std=noise_std, seed=seed)
    except ValidationError as exc:
        raise ParameterError(str(exc)) from exc


SYNTH_PRESETS = ("cc", "phrc", "p300", "mrcp", "latency")
