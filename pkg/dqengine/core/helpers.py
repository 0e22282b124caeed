import math
import os
import tempfile
from pathlib import Path

from django.conf import settings

import log


def significant(value: float | None, digits: int | None = None) -> float | None:
    """Round to the configured number of significant digits."""
    if value is None or not math.isfinite(value) or value == 0:
        return value
    digits = digits or settings.DQ_SIGNIFICANT_DIGITS
    return float(f"{value:.{digits}g}")


def atomic_write(path: str | Path, text: str) -> Path:
    """Write through a temporary sibling file and rename it into place."""
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    handle, temporary = tempfile.mkstemp(dir=target.parent, prefix=f".{target.name}.")
    try:
        with os.fdopen(handle, "w", encoding="utf-8", newline="") as stream:
            stream.write(text)
        os.replace(temporary, target)
    except BaseException:
        Path(temporary).unlink(missing_ok=True)
        raise
    log.debug(f"Wrote {len(text)} characters to {target}")
    return target


def read_config(path: str | Path) -> dict[str, str]:
    """Parse key=value lines, skipping blanks and # comments."""
    values = {}
    for number, line in enumerate(Path(path).read_text().splitlines(), start=1):
        text = line.split("#", 1)[0].strip()
        if not text:
            continue
        key, separator, value = text.partition("=")
        if not separator or not key.strip():
            raise ValueError(f"Line {number} of {path} is not key=value: {line!r}")
        values[key.strip().replace("-", "_")] = value.strip()
    return values
