VALIDATION_EXIT = 2
SOLVER_EXIT = 3
IO_EXIT = 4

TRUE_VALUES = ("1", "true", "yes", "on")
FALSE_VALUES = ("0", "false", "no", "off")

MEASURES = ("expectile", "var", "es")
