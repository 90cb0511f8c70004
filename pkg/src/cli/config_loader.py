"""
Experiment config files: plain `key = value` lines with `#` comments.

    graph = sg
    levels = 2, 3, 4
    epsilon = 0.5
    horizon = 1.0
"""
import configparser
import logging
from pathlib import Path

from src.common.errors import InputError, ParseError, ValidationError
from src.ergodicity_harness.experiment import PROBES, ExperimentConfig

logger = logging.getLogger(__name__)

SECTION = "experiment"

# file key -> (ExperimentConfig field, converter)
_KEYS = {
    "graph": ("graph", str),
    "horizon": ("horizon", float),
    "levels": ("levels", lambda s: tuple(int(v) for v in _items(s))),
    "epsilon": ("eps", lambda s: tuple(float(v) for v in _items(s))),
    "block_radius": ("block_radius", float),
    "block_size": ("block_size", lambda s: None if s.lower() == "none" else int(s)),
    "bundle": ("bundle", str),
    "fields": ("fields", lambda s: tuple(_items(s))),
    "delta": ("delta", float),
    "alpha": ("alpha", float),
    "trajectories": ("trajectories", int),
    "seed": ("seed", int),
    "confidence": ("confidence", float),
    "probes": ("probes", lambda s: PROBES if s.strip() == "all" else tuple(_items(s))),
    "reservoirs": ("reservoirs", str),
    "lambda_plus": ("lambda_plus", float),
    "lambda_minus": ("lambda_minus", float),
    "boundary_weight": ("boundary_weight", str),
    "volume_mode": ("volume_mode", str),
    "exit_mode": ("exit_mode", str),
    "threads": ("threads", int),
}
_ALIASES = {"eps": "epsilon", "m": "trajectories", "t": "horizon"}


def _items(text: str) -> list[str]:
    return [item.strip() for item in text.split(",") if item.strip()]


def _parse(text: str) -> dict[str, str]:
    parser = configparser.ConfigParser(
        strict=True,
        comment_prefixes=("#",),
        inline_comment_prefixes=("#",),
        interpolation=None,
        delimiters=("=",),
    )
    # The header is synthetic, so every reported line number is shifted back by one
    try:
        parser.read_string(f"[{SECTION}]\n{text}")
    except configparser.ParsingError as e:
        line = e.errors[0][0] - 1 if e.errors else None
        raise ParseError("expected `key = value`", line) from e
    except configparser.Error as e:
        line = getattr(e, "lineno", None)
        raise ParseError(e.message.splitlines()[0], line - 1 if line else None) from e
    if len(parser.sections()) != 1:
        raise ParseError("section headers are not allowed in experiment configs")
    return dict(parser[SECTION])


def load_config(path: Path | str) -> ExperimentConfig:
    path = Path(path)
    if not path.is_file():
        raise InputError(f"Experiment config not found: {path}")
    raw = _parse(path.read_text(encoding="utf-8"))

    values = {}
    for key, text in raw.items():
        key = _ALIASES.get(key, key)
        if key not in _KEYS:
            raise ValidationError(key, "unknown key")
        name, convert = _KEYS[key]
        try:
            values[name] = convert(text.strip())
        except ValueError as e:
            raise ValidationError(key, f"cannot read {text!r}: {e}") from e

    for required in ("graph", "horizon"):
        if required not in values:
            raise ValidationError(required, "is required")
    config = ExperimentConfig(**values)
    logger.info(f"Loaded experiment config from {path}: {config.as_dict()}")
    return config
