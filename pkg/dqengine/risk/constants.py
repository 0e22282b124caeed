WEIGHT_SUM_TOLERANCE = 1e-12  # weights must sum to one within this
TAIL_MASS_TOLERANCE = 1e-12  # slack when matching a level to quantile steps
EXCEEDANCE_TOLERANCE = 1e-12  # relative slack when counting S > t

LOWER_HALF = 0.5  # expectiles are coherent below this level
