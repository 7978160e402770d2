from typing import Union, Tuple, List, Optional, Dict, Callable, Iterable, Sequence
import numpy as np

RealFn = Callable[[float], float]
Probs4 = Tuple[float, float, float, float]
Times = Union[float, Sequence[float], np.ndarray]
