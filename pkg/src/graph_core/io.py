"""Canonical JSON graph files and content hashing."""
import hashlib
import json
import logging
from pathlib import Path

from src.common.errors import InputError
from src.graph_core.graph import WeightedGraph, build_graph

logger = logging.getLogger(__name__)

# v -> (lambda_plus, lambda_minus)
Reservoirs = dict[int, tuple[float, float]]


def graph_to_dict(g: WeightedGraph, reservoirs: Reservoirs | None = None) -> dict:
    document = {
        "vertices": list(g.vertices),
        "edges": [{"u": u, "v": v, "c": c} for u, v, c in g.edges],
    }
    if g.corners:
        document["corners"] = list(g.corners)
    if reservoirs:
        document["boundary"] = [
            {"v": v, "lambda_plus": lp, "lambda_minus": lm}
            for v, (lp, lm) in sorted(reservoirs.items())
        ]
    return document


def graph_from_dict(document: dict) -> tuple[WeightedGraph, Reservoirs | None]:
    try:
        edges = [(e["u"], e["v"], e["c"]) for e in document["edges"]]
        vertices = document.get("vertices")
        reservoirs = None
        if document.get("boundary"):
            reservoirs = {
                int(b["v"]): (float(b["lambda_plus"]), float(b["lambda_minus"]))
                for b in document["boundary"]
            }
    except (KeyError, TypeError) as e:
        raise InputError(f"Malformed graph document: missing {e}") from e
    g = build_graph(edges, vertices=vertices, corners=document.get("corners", ()))
    return g, reservoirs


def canonical_json(document: dict) -> str:
    return json.dumps(document, sort_keys=True, indent=2) + "\n"


def graph_hash(g: WeightedGraph, reservoirs: Reservoirs | None = None) -> str:
    payload = canonical_json(graph_to_dict(g, reservoirs)).encode("utf-8")
    return hashlib.sha256(payload).hexdigest()


def write_graph(g: WeightedGraph, path: Path | str, reservoirs: Reservoirs | None = None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(canonical_json(graph_to_dict(g, reservoirs)), encoding="utf-8")
    logger.info(f"Wrote graph with {g.n} vertices to {path}.")
    return path


def read_graph(path: Path | str) -> tuple[WeightedGraph, Reservoirs | None]:
    path = Path(path)
    try:
        document = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise InputError(f"{path} is not valid JSON: {e}") from e
    return graph_from_dict(document)
