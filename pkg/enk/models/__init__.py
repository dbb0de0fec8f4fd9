from .zoo import (
    FAMILIES,
    VARIANTS,
    ModelSpec,
    ModelWidths,
    build_control,
    build_model,
    list_presets,
    slot_index,
)

__all__ = [
    "FAMILIES",
    "VARIANTS",
    "ModelSpec",
    "ModelWidths",
    "build_control",
    "build_model",
    "list_presets",
    "slot_index",
]
