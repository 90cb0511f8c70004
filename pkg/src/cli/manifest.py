import hashlib
import json
import logging
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from src.cli.reports import to_builtin, write_json
from src.common.seeding import RNG_ALGORITHM
from src.common.settings import TOOL_VERSION

logger = logging.getLogger(__name__)


@dataclass
class RunManifest:
    """
    Provenance of one run. The run id hashes only the deterministic inputs,
    so two runs with the same id must produce identical machine outputs.
    """
    command: str
    argv: list[str]
    seed: int | None
    tolerances: dict
    graph_hash: str | None = None
    inputs: dict = field(default_factory=dict)
    tool_version: str = TOOL_VERSION
    rng: str = RNG_ALGORITHM
    outputs: list[str] = field(default_factory=list)
    timestamp: str = field(default_factory=lambda: datetime.now(timezone.utc).isoformat(timespec="seconds"))

    @property
    def run_id(self) -> str:
        inputs = {
            "command": self.command,
            "argv": self.argv,
            "seed": self.seed,
            "tolerances": self.tolerances,
            "graph_hash": self.graph_hash,
            "inputs": self.inputs,
            "tool_version": self.tool_version,
            "rng": self.rng,
        }
        payload = json.dumps(to_builtin(inputs), sort_keys=True).encode("utf-8")
        return hashlib.sha256(payload).hexdigest()

    def as_dict(self) -> dict:
        return asdict(self) | {"run_id": self.run_id}

    def provenance(self) -> dict:
        """The deterministic part, embedded in every machine output."""
        return {
            "run_id": self.run_id,
            "seed": self.seed,
            "tolerances": self.tolerances,
            "graph_hash": self.graph_hash,
            "tool_version": self.tool_version,
            "rng": self.rng,
        }

    def write(self, out: Path | str) -> Path:
        out = Path(out)
        return write_json(out.with_name(out.name + ".manifest.json"), self.as_dict())
