"""The five chair-activity classes and their stable integer codes."""

from enum import IntEnum


class ClassLabel(IntEnum):
    IDLE = 0
    STAND_UP = 1
    SIT_DOWN = 2
    ROTATE = 3
    MOVE = 4


CLASS_NAMES = ("idle", "stand_up", "sit_down", "rotate", "move")

_ALIASES = {
    "idle": ClassLabel.IDLE,
    "stand": ClassLabel.STAND_UP,
    "standup": ClassLabel.STAND_UP,
    "stand_up": ClassLabel.STAND_UP,
    "sit": ClassLabel.SIT_DOWN,
    "sitdown": ClassLabel.SIT_DOWN,
    "sit_down": ClassLabel.SIT_DOWN,
    "rotate": ClassLabel.ROTATE,
    "move": ClassLabel.MOVE,
}


def parse_label(text: str) -> ClassLabel:
    """Accept class names (plus common aliases) or integer codes."""
    token = text.strip().lower()
    if token in _ALIASES:
        return _ALIASES[token]
    try:
        return ClassLabel(int(token))
    except (ValueError, KeyError):
        raise ValueError(f"unknown activity class {text!r}") from None
