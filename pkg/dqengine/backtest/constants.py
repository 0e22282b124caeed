DEFAULT_WINDOW = 500
MONTHLY = "monthly"

TRADING_DAYS = 252

# Annualized volatility below this is reported as zero
VOLATILITY_FLOOR = 1e-12

THRESHOLD_MULTIPLES = (1.0, 1.5, 2.0)
