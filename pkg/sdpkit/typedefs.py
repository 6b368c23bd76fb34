from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

Number = Union[int, float]
JsonValue = Optional[Union[bool, str, Number]]
JsonObject = Dict[str, "JSON"]
JsonArray = List["JSON"]
JSON = Union[JsonValue, JsonArray, JsonObject]

# anything numpy can turn into a dense 2D float array
MatrixLike = Union[np.ndarray, Sequence[Sequence[Number]]]
VectorLike = Union[np.ndarray, Sequence[Number]]

# exponent vector of a monomial, one entry per variable
Exponent = Tuple[int, ...]
# unordered vertex pair, 1-indexed
Edge = Tuple[int, int]
