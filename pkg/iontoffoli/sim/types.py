from typing import NewType, TypedDict, Union

import numpy as np

QubitWord = Union[int, str]
FockLevel = int
FlatIndex = NewType("FlatIndex", int)
Seconds = float
Radians = float
ComplexArray = np.ndarray

# Segment name -> (first, last) pulse numbers, 1-based and inclusive
SegmentTags = dict[str, tuple[int, int]]

ENCODING = "Encoding"
CONTROLLED_NOT = "ControlledNOT"
DECODING = "Decoding"


class GateCheck(TypedDict):
    deviation: float
    global_phase: complex
    overlap: float
    unitarity_error: float
    leakage: float
    passed: bool
