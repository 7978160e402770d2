import numpy as np

INV_E = np.exp(-1.0)       # branch point of the principal Lambert W is -INV_E
DEFAULT_TOL = 1e-12        # absolute tolerance for root finding
DEFAULT_MAX_ITER = 200
PROB_TOL = 1e-12           # slack on probabilities and density-matrix invariants
EIG_TOL = 1e-10            # slack on positivity of density-matrix eigenvalues
DEFAULT_RATIO = 0.99       # fraction of the initial negativity defining t*
DEFAULT_GRID_DENSITY = 256  # phase-integration nodes per unit time
DEFAULT_SEED = 42
CHOLESKY_JITTER = 1e-12    # relative diagonal jitter, applied at most once
ENTANGLED_TOL = 1e-6       # minimum initial negativity of rejection-sampled mixtures
