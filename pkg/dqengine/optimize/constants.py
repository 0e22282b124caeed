LP_TOLERANCE = 1e-9
LP_MAX_ITERATIONS = 50_000

BIG_M_HEADROOM = 1e4
BIG_M_DOUBLINGS = 10

# Second stage: objective slack among optimal portfolios
TIE_BREAK_RELATIVE = 1e-9
TIE_BREAK_ABSOLUTE = 1e-12

FRONTIER_POINTS = 40
FRONTIER_FLOOR = 0.05
FRONTIER_XTOL = 1e-10

KINK_TOLERANCE = 1e-12

ARMIJO_SLOPE = 1e-4
ARMIJO_BACKTRACK = 0.5
ARMIJO_MIN_STEP = 1e-16
DESCENT_MAX_ITERATIONS = 500
DESCENT_TOLERANCE = 1e-8

# Relative to the largest scenario excess; tried in order until a step is found
KINK_BANDS = (1e-9, 1e-6, 1e-3)
FACE_TOLERANCE = 1e-14

LP = "lp"
FRONTIER = "frontier"
GRADIENT = "gradient"
METHODS = (LP, FRONTIER, GRADIENT)
