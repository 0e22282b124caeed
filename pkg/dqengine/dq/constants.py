# Level bracket for root-finding on beta -> ex_beta(S)
LEVEL_FLOOR = 1e-15
LEVEL_CEILING = 1 - 1e-15

LEVEL_XTOL = 1e-15
LEVEL_RTOL = 4 * 2.220446049250313e-16
