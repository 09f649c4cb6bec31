"""
Pulse-level simulator of a three-ion Toffoli gate mediated by a shared
motional mode, with its characterization pipeline (truth tables, process
tomography, mean gate fidelity).
"""
import json
import logging
import os
from typing import Any

logger = logging.getLogger(__name__)

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
CONFIG_FILE = os.environ.get("IONTOFFOLI_CONFIG", os.path.join(ROOT, "config.json"))
EMPTY_CONF: dict[str, Any] = {"verbose": False, "defaults": {}, "presets": {}}


def load_conf(path: str = CONFIG_FILE) -> dict[str, Any]:
    """Read a configuration file; a missing file yields the built-in defaults."""
    if not os.path.exists(path):
        logger.debug(f"No configuration file at {path}, using built-in defaults")
        return dict(EMPTY_CONF)
    with open(path, "r", encoding="utf8") as fp:
        conf = json.load(fp)
    return {**EMPTY_CONF, **conf}


CONF = load_conf()
