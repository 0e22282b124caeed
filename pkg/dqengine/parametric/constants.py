SYMMETRY_TOLERANCE = 1e-12
ATOM_NORM_TOLERANCE = 1e-10

# Expectile root-finding on the standard marginal
EXPECTILE_BRACKET = 1.0
EXPECTILE_XTOL = 1e-14
EXPECTILE_MAX_EXPANSIONS = 60

# Projected gradient with Armijo backtracking for the elliptical weight problem
QP_TOLERANCE = 1e-10
QP_MAX_ITERATIONS = 10_000
ARMIJO_SLOPE = 1e-4
ARMIJO_BACKTRACK = 0.5
ARMIJO_MIN_STEP = 1e-16

# Small-sample experiment
SIMULATION_SIZE = 49
SIMULATION_REPS = 1000
