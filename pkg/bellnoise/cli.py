import argparse
import dataclasses
import logging
import sys
from logging import getLogger

import numpy as np
import pandas as pd
import xarray as xr

from .constants import DEFAULT_GRID_DENSITY, DEFAULT_RATIO, DEFAULT_SEED
from .dynamics import EvolutionParams, evolve, mc_evolve, negativity_curve, trajectory
from .errors import BellnoiseError, ParseError
from .processes import (ProcessKind, ProcessSpec, SeededRng, characteristic_function,
                        mc_characteristic_function)
from .states import BellMixture, EnvTopology, initial_negativity
from .timescales import (SCATTER_COLUMNS, bound_curves, preserving_time, scatter_study, survival_time,
                         tstar_sweep)
from .typing import Callable, Dict, List, Optional, Tuple, Union
from .utils import format_process, parse_floats, parse_process, parse_state, write_csv

logger = getLogger(__name__)

Table = Union[xr.Dataset, pd.DataFrame]

DEFAULT_T_MAX = 2.0
DEFAULT_N_POINTS = 200
DEFAULT_MC_SAMPLES = 10000
DEFAULT_N_STATES = 1000
DEFAULT_TIMES = '0.2,1'

# default parameter ranges of the sweep command, log-spaced for ou and linear for fgn
SWEEP_RANGES = {
    ProcessKind.OU: (1e-2, 1e2),
    ProcessKind.FGN: (0.05, 0.95)
}


@dataclasses.dataclass(frozen=True)
class RunConfig:
    """Validated options of a single command-line run.

    Attributes:
        command: Subcommand name
        processes: Noise processes (only :code:`curve` takes more than one)
        env: Environment topology
        state: Initial Bell mixture
        lam: Coupling
        omega0: Qubit frequency
        ratio: Preserved fraction :math:`r` of the initial negativity
        t_max: Final time of curves and trajectories
        n_points: Rows of curves, trajectories, sweeps and bound curves
        mc_samples: Monte Carlo realizations
        grid_density: Phase-integration nodes per unit time
        seed: 64-bit seed
        workers: Threads for Monte Carlo and scatter studies
        output: CSV path, stdout if :code:`None`
        times: Evaluation times of :code:`mc-validate` and :code:`charfn`
        kappa: Coupling of :code:`charfn`, :math:`2 \\lambda` if :code:`None`
        family: Process family of :code:`sweep`
        param_range: Parameter range of :code:`sweep`
        n_states: Random states of :code:`scatter`
        face: Index of the vanishing weight of the :code:`scatter` states, anywhere in the simplex if :code:`None`
    """
    command: str
    processes: Tuple[ProcessSpec, ...]
    env: EnvTopology = EnvTopology.INDEPENDENT
    state: BellMixture = BellMixture(1, 0, 0, 0)
    lam: float = 1.0
    omega0: float = 1.0
    ratio: float = DEFAULT_RATIO
    t_max: float = DEFAULT_T_MAX
    n_points: int = DEFAULT_N_POINTS
    mc_samples: int = DEFAULT_MC_SAMPLES
    grid_density: int = DEFAULT_GRID_DENSITY
    seed: int = DEFAULT_SEED
    workers: int = 1
    output: Optional[str] = None
    times: Tuple[float, ...] = (0.2, 1.0)
    kappa: Optional[float] = None
    family: ProcessKind = ProcessKind.OU
    param_range: Tuple[float, float] = SWEEP_RANGES[ProcessKind.OU]
    n_states: int = DEFAULT_N_STATES
    face: Optional[int] = None

    def __post_init__(self):
        if not self.processes:
            raise ParseError('At least one --process is required')
        if len(self.processes) > 1 and self.command != 'curve':
            raise ParseError(f'Only curve accepts more than one --process but {self.command} got '
                             f'{[format_process(p) for p in self.processes]}')
        for name in ('n_points', 'mc_samples', 'grid_density', 'workers', 'n_states'):
            if getattr(self, name) < 1:
                raise ParseError(f'Require --{name.replace("_", "-")} >= 1 but got {getattr(self, name)}')
        if not 0 <= self.seed < 2 ** 64:
            raise ParseError(f'Require 0 <= --seed < 2**64 but got {self.seed}')
        if not self.t_max > 0:
            raise ParseError(f'Require --t-max > 0 but got {self.t_max}')

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        family = ProcessKind(args.family)
        lo, hi = SWEEP_RANGES[family]
        return cls(
            command=args.command,
            processes=tuple(parse_process(p) for p in (args.process or ['white'])),
            env=EnvTopology(args.env),
            state=parse_state(args.state),
            lam=args.lam,
            omega0=args.omega0,
            ratio=args.r,
            t_max=args.t_max,
            n_points=args.n_points,
            mc_samples=args.mc_samples,
            grid_density=args.grid_density,
            seed=args.seed,
            workers=args.workers,
            output=args.output,
            times=tuple(parse_floats(args.times)),
            kappa=args.kappa,
            family=family,
            param_range=(lo if args.param_min is None else args.param_min,
                         hi if args.param_max is None else args.param_max),
            n_states=args.n_states,
            face=args.face
        )

    @property
    def process(self) -> ProcessSpec:
        return self.processes[0]

    @property
    def params(self) -> EvolutionParams:
        return EvolutionParams(self.process, self.env, self.lam, self.omega0)

    @property
    def rng(self) -> SeededRng:
        return SeededRng(self.seed)

    @property
    def budget(self) -> float:
        return 4 / np.sqrt(self.mc_samples)


def cmd_curve(cfg: RunConfig) -> xr.Dataset:
    """Negativity on a uniform grid of :code:`n_points` times over :code:`[0, t_max]`"""
    t = np.linspace(0, cfg.t_max, cfg.n_points)
    if len(cfg.processes) == 1:
        data_vars = {'negativity': ('t', negativity_curve(cfg.state, cfg.params, t))}
    else:
        data_vars = {
            f'negativity_{format_process(spec)}':
                ('t', negativity_curve(cfg.state, dataclasses.replace(cfg.params, spec=spec), t))
            for spec in cfg.processes
        }
    return xr.Dataset(data_vars=data_vars, coords={'t': t})


def cmd_trajectory(cfg: RunConfig) -> xr.Dataset:
    return trajectory(cfg.state, cfg.params, np.linspace(0, cfg.t_max, cfg.n_points))


def cmd_tstar(cfg: RunConfig) -> pd.DataFrame:
    value = preserving_time(cfg.state, cfg.process, cfg.lam, cfg.ratio, cfg.env)
    outcome = 'finite' if np.isfinite(value) else 'never'
    return pd.DataFrame({'N0': [initial_negativity(cfg.state)], 'value': [value], 'outcome': [outcome]})


def cmd_tes(cfg: RunConfig) -> pd.DataFrame:
    outcome = survival_time(cfg.state, cfg.process, cfg.lam, cfg.env)
    return pd.DataFrame({'N0': [initial_negativity(cfg.state)], 'value': [outcome.time],
                         'outcome': [outcome.kind.value]})


def cmd_scatter(cfg: RunConfig) -> pd.DataFrame:
    study = scatter_study(cfg.n_states, cfg.process, cfg.lam, cfg.env, cfg.ratio, cfg.rng, cfg.workers,
                          face=cfg.face)
    return study.to_dataframe().reset_index()[list(SCATTER_COLUMNS)]


def cmd_mc_validate(cfg: RunConfig) -> pd.DataFrame:
    """Largest element-wise deviation of the Monte Carlo density matrix from the analytic one"""
    rows: List[Dict] = []
    for t in cfg.times:
        rho_mc = mc_evolve(cfg.state, cfg.params, t, cfg.mc_samples, cfg.grid_density, cfg.rng, cfg.workers)
        error = float(np.max(np.abs(np.asarray(rho_mc) - np.asarray(evolve(cfg.state, cfg.params, t)))))
        logger.debug(f'mc-validate t={t}: max_abs_error={error:.3g}')
        rows.append({'t': t, 'max_abs_error': error, 'budget': cfg.budget, 'pass': error <= cfg.budget})
    return pd.DataFrame(rows)


def cmd_sweep(cfg: RunConfig) -> xr.Dataset:
    lo, hi = cfg.param_range
    if cfg.family == ProcessKind.OU:
        if not 0 < lo <= hi:
            raise ParseError(f'Require 0 < --param-min <= --param-max for ou but got {lo}, {hi}')
        values = np.geomspace(lo, hi, cfg.n_points)
    else:
        values = np.linspace(lo, hi, cfg.n_points)
    return tstar_sweep(values, cfg.family, cfg.lam, cfg.ratio, cfg.env)


def cmd_bounds(cfg: RunConfig) -> xr.Dataset:
    n0 = np.linspace(0, 1, cfg.n_points + 1)[1:]
    return bound_curves(n0, cfg.ratio, cfg.env.bound_constant, cfg.process, cfg.lam)


def cmd_charfn(cfg: RunConfig) -> pd.DataFrame:
    """Empirical against analytic characteristic function of the accumulated phase"""
    kappa = 2 * cfg.lam if cfg.kappa is None else cfg.kappa
    rows: List[Dict] = []
    for t in cfg.times:
        mc = mc_characteristic_function(cfg.process, kappa, t, cfg.mc_samples, cfg.grid_density, cfg.rng,
                                        cfg.workers)
        analytic = characteristic_function(cfg.process, kappa, t)
        error = abs(mc - analytic)
        rows.append({'t': t, 'real': mc.real, 'imag': mc.imag, 'analytic': analytic, 'abs_error': error,
                     'budget': cfg.budget, 'pass': error <= cfg.budget})
    return pd.DataFrame(rows)


COMMANDS: Dict[str, Callable[[RunConfig], Table]] = {
    'curve': cmd_curve,
    'trajectory': cmd_trajectory,
    'tstar': cmd_tstar,
    'tes': cmd_tes,
    'scatter': cmd_scatter,
    'mc-validate': cmd_mc_validate,
    'sweep': cmd_sweep,
    'bounds': cmd_bounds,
    'charfn': cmd_charfn
}

COMMAND_HELP = {
    'curve': 'Negativity against time (one column per --process)',
    'trajectory': 'Bloch coefficients and negativity against time',
    'tstar': 'Entanglement-preserving time of --state',
    'tes': 'Entanglement-survival time of --state',
    'scatter': 'Timescales and lower bounds of random entangled mixtures',
    'mc-validate': 'Monte Carlo against analytic density matrices',
    'sweep': 'Bell-state preserving time against gamma (ou) or H (fgn)',
    'bounds': 'Lower-bound curves against the initial negativity',
    'charfn': 'Monte Carlo against analytic characteristic function of the phase'
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--state', type=str, default='phi+',
                        help='Initial state: phi+, phi-, psi+, psi-, mixed, c=c1,c2,c3,c4 or a=a1,a2,a3.')
    common.add_argument('--process', type=str, action='append',
                        help='Noise process: ou:gamma=G, fgn:h=H, wiener or white (default white).')
    common.add_argument('--env', type=str, choices=[e.value for e in EnvTopology], default='indep',
                        help='Independent or common environment.')
    common.add_argument('--lambda', dest='lam', type=float, default=1.0, help='Coupling.')
    common.add_argument('--omega0', type=float, default=1.0, help='Qubit frequency.')
    common.add_argument('--r', type=float, default=DEFAULT_RATIO, help='Preserved fraction of the negativity.')
    common.add_argument('--t-max', type=float, default=DEFAULT_T_MAX, help='Final time of curves.')
    common.add_argument('--n-points', type=int, default=DEFAULT_N_POINTS, help='Number of rows.')
    common.add_argument('--mc-samples', type=int, default=DEFAULT_MC_SAMPLES, help='Monte Carlo realizations.')
    common.add_argument('--grid-density', type=int, default=DEFAULT_GRID_DENSITY,
                        help='Phase-integration nodes per unit time.')
    common.add_argument('--seed', type=int, default=DEFAULT_SEED, help='64-bit random seed.')
    common.add_argument('--workers', type=int, default=1, help='Worker threads (results do not depend on it).')
    common.add_argument('--times', type=str, default=DEFAULT_TIMES,
                        help='Comma-separated times for mc-validate and charfn.')
    common.add_argument('--kappa', type=float, default=None, help='Coupling for charfn (default 2 * lambda).')
    common.add_argument('--family', type=str, choices=[ProcessKind.OU.value, ProcessKind.FGN.value],
                        default=ProcessKind.OU.value, help='Process family of sweep.')
    common.add_argument('--param-min', type=float, default=None, help='Lower end of the sweep.')
    common.add_argument('--param-max', type=float, default=None, help='Upper end of the sweep.')
    common.add_argument('--n-states', type=int, default=DEFAULT_N_STATES, help='Random states for scatter.')
    common.add_argument('--face', type=int, choices=range(4), default=None,
                        help='Index (0..3) of the Bell weight that vanishes in scatter states.')
    common.add_argument('--output', type=str, default=None, help='CSV path (default stdout).')
    common.add_argument('--verbose', action='store_true', help='Log at DEBUG level on stderr.')

    parser = argparse.ArgumentParser(prog='bellnoise',
                                     description='Two-qubit dephasing under classical Gaussian noise.')
    subparsers = parser.add_subparsers(dest='command', required=True)
    for name, help_text in COMMAND_HELP.items():
        subparsers.add_parser(name, parents=[common], help=help_text)
    return parser


def run(cfg: RunConfig) -> str:
    logger.debug(f'Running {cfg}')
    return write_csv(COMMANDS[cfg.command](cfg), cfg.output)


def main(argv: Optional[List[str]] = None) -> int:
    """Entry point, returning 0 on success, 1 on a domain or numerical error and 2 on a usage error"""
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        return e.code
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, stream=sys.stderr,
                        format='%(levelname)s %(name)s: %(message)s')
    try:
        run(RunConfig.from_args(args))
    except ParseError as e:
        print(f'error: {e}', file=sys.stderr)
        return 2
    except (BellnoiseError, OSError) as e:
        print(f'error: {e}', file=sys.stderr)
        return 1
    return 0


if __name__ == '__main__':
    sys.exit(main())
