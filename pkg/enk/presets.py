"""Dataset shape presets for the cc, phrc, p300 and mrcp EEG recordings"""

from typing import Dict, List

from pydantic import BaseModel, Field


class DatasetPreset(BaseModel):
    name: str
    channels: int = Field(..., ge=1)
    samples: int = Field(..., ge=1)
    class_count: int = Field(..., ge=2)
    sample_rate: float = Field(..., gt=0, description="Hz")
    source_trials: int = Field(..., ge=1, description="Trial count of the original recording")
    batch_size: int = Field(..., ge=1, description="Training batch size used for this dataset")
    description: str = ""


PRESETS: Dict[str, DatasetPreset] = {
    "cc": DatasetPreset(
        name="cc", channels=62, samples=1200, class_count=2, sample_rate=1000.0,
        source_trials=6841, batch_size=16,
        description="Cognitive conflict: frontal negative deflection 150-250 ms after a conflicting stimulus",
    ),
    "phrc": DatasetPreset(
        name="phrc", channels=32, samples=1200, class_count=2, sample_rate=1000.0,
        source_trials=4895, batch_size=16,
        description="Physical human-robot collaboration conflict, same ERP as cc recorded in the field",
    ),
    "p300": DatasetPreset(
        name="p300", channels=64, samples=240, class_count=2, sample_rate=240.0,
        source_trials=340, batch_size=8,
        description="Oddball paradigm: parietal positive deflection 250-350 ms after a rare target",
    ),
    "mrcp": DatasetPreset(
        name="mrcp", channels=28, samples=500, class_count=4, sample_rate=1000.0,
        source_trials=316, batch_size=4,
        description="Movement-related cortical potentials over central/midline channels, four movements",
    ),
}


def get_preset(name: str) -> DatasetPreset:
    from .errors import ParameterError

    try:
        return PRESETS[name.lower()]
    except KeyError:
        raise ParameterError(f"unknown preset '{name}'; choose one of {sorted(PRESETS)}")


def preset_names() -> List[str]:
    return list(PRESETS)
