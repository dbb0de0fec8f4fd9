"""Epoch sets: synthetic generation, file formats, splitting"""

from .batching import split_and_batch, stratified_split
from .epochs import EpochSet, csv_import, decode_epochs, encode_epochs, epochs_read, epochs_write
from .synth import (
    SYNTH_PRESETS,
    ClassEvent,
    SynthSpec,
    event_energy,
    event_template,
    latency_task_spec,
    preset_spec,
    raised_cosine,
    synth_generate,
)

__all__ = [
    "SYNTH_PRESETS",
    "ClassEvent",
    "EpochSet",
    "SynthSpec",
    "csv_import",
    "decode_epochs",
    "encode_epochs",
    "epochs_read",
    "epochs_write",
    "event_energy",
    "event_template",
    "latency_task_spec",
    "preset_spec",
    "raised_cosine",
    "split_and_batch",
    "stratified_split",
    "synth_generate",
]
