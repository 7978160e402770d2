import numpy as np

from .constants import DEFAULT_GRID_DENSITY
from .errors import DomainError


class TimeGrid:
    def __init__(self, t_max: float, n_steps: int):
        """Uniform time grid used to sample noise paths and integrate phases

        Args:
            t_max: Final time (dimensionless)
            n_steps: Number of intervals, so the grid has :code:`n_steps + 1` nodes :code:`t_k = k * t_max / n_steps`
        """
        if not t_max > 0:
            raise DomainError(f'Require t_max > 0 but got {t_max}')
        if not int(n_steps) == n_steps or n_steps < 1:
            raise DomainError(f'Require integer n_steps >= 1 but got {n_steps}')
        self.t_max = float(t_max)
        self.n_steps = int(n_steps)

    @classmethod
    def from_density(cls, t_max: float, grid_density: int = DEFAULT_GRID_DENSITY) -> "TimeGrid":
        """Grid spanning :code:`[0, t_max]` with at least :code:`grid_density` intervals per unit time

        Args:
            t_max: Final time
            grid_density: Intervals per unit time

        Returns:
            The grid (at least one interval)

        """
        if grid_density < 1:
            raise DomainError(f'Require grid_density >= 1 but got {grid_density}')
        return cls(t_max, max(1, int(np.ceil(t_max * grid_density))))

    @property
    def spacing(self) -> float:
        return self.t_max / self.n_steps

    @property
    def pos(self) -> np.ndarray:
        # the first node is exactly zero and the last exactly t_max
        pos = np.arange(self.n_steps + 1) * self.spacing
        pos[-1] = self.t_max
        return pos

    @property
    def size(self) -> int:
        return self.n_steps + 1

    def trapezoid(self, values: np.ndarray) -> np.ndarray:
        """Trapezoid rule over the grid along the last axis

        Args:
            values: Array of shape :code:`(..., n_steps + 1)` sampled on the nodes

        Returns:
            The integrals over :code:`[0, t_max]`

        """
        values = np.asarray(values)
        if not values.shape[-1] == self.size:
            raise DomainError(f'Require values.shape[-1] == {self.size} but got {values.shape[-1]}')
        return self.spacing * (values[..., 1:-1].sum(axis=-1) + (values[..., 0] + values[..., -1]) / 2)

    def __repr__(self):
        return f'TimeGrid(t_max={self.t_max}, n_steps={self.n_steps})'
