import configparser
import os
from dataclasses import dataclass
from pathlib import Path

from dotenv import load_dotenv

# Load environment variables from .env file so os.path.expandvars can find them
load_dotenv()

PROJECT_ROOT = Path(__file__).resolve().parents[2]
DEFAULT_CONFIG_PATH = PROJECT_ROOT / "config" / "config.ini"

TOOL_VERSION = "0.3.0"


@dataclass(frozen=True)
class Settings:
    log_file: Path | None
    log_level: str
    connection_string: str
    database_enabled: bool
    tolerance: float
    state_cap: int
    dense_state_limit: int
    ball_enumeration_cap: int
    canonical_enumeration_cap: int
    max_vertices: int
    volume_mode: str
    exit_mode: str
    probe_pairs: int
    threads: int


def _resolve_connection_string(template: str) -> str:
    conn = os.path.expandvars(template)
    if "${" in conn:
        raise ValueError(f"Unexpanded placeholder in connection string: {template}")
    # Relative sqlite paths are anchored at the project root
    if conn.startswith("sqlite:///") and not conn.startswith("sqlite:////"):
        db_path = PROJECT_ROOT / conn.split("///", 1)[1]
        db_path.parent.mkdir(parents=True, exist_ok=True)
        conn = f"sqlite:///{db_path}"
    return conn


def resolve_threads(requested: int | None, settings: "Settings") -> int:
    """--threads wins, then RESISTOR_SEP_THREADS, then the config value; 0 means auto."""
    threads = requested
    if threads is None:
        env = os.environ.get("RESISTOR_SEP_THREADS")
        threads = int(env) if env else settings.threads
    if threads <= 0:
        threads = os.cpu_count() or 1
    return threads


def load_settings(config_path: Path | str | None = None) -> Settings:
    config_path = Path(config_path) if config_path else DEFAULT_CONFIG_PATH
    config = configparser.ConfigParser()
    config.read(config_path)
    if not config.sections():
        raise FileNotFoundError(f"Config file not found or empty at {config_path}")

    log_file = config.get("LOGGING", "log_file", fallback="").strip()
    log_level = os.environ.get("RESISTOR_SEP_LOG_LEVEL") or config.get(
        "LOGGING", "log_level", fallback="INFO"
    )
    conn_template = os.environ.get("RESISTOR_SEP_DB") or config.get(
        "DATABASE", "connection_string", fallback="sqlite:///results/resistor_sep.db"
    )

    return Settings(
        log_file=PROJECT_ROOT / log_file if log_file else None,
        log_level=log_level,
        connection_string=_resolve_connection_string(conn_template),
        database_enabled=config.getboolean("DATABASE", "enabled", fallback=True),
        tolerance=config.getfloat("NUMERICS", "tolerance", fallback=1e-10),
        state_cap=config.getint("NUMERICS", "state_cap", fallback=14),
        dense_state_limit=config.getint("NUMERICS", "dense_state_limit", fallback=1024),
        ball_enumeration_cap=config.getint("NUMERICS", "ball_enumeration_cap", fallback=20),
        canonical_enumeration_cap=config.getint(
            "NUMERICS", "canonical_enumeration_cap", fallback=22
        ),
        max_vertices=config.getint("NUMERICS", "max_vertices", fallback=2_000_000),
        volume_mode=config.get("SCALING", "volume_mode", fallback="measure"),
        exit_mode=config.get("SCALING", "exit_mode", fallback="max"),
        probe_pairs=config.getint("SCALING", "probe_pairs", fallback=8),
        threads=config.getint("RUN", "threads", fallback=0),
    )
