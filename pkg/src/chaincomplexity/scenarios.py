"""
JSON scenario files for the simulators.

Common keys: ``kind`` (``pow``, ``nxt`` or ``coinage``), ``seed``,
``duration`` (seconds).  Per kind:

``pow``
    ``name``, ``block_time``, ``hashrate``.
``nxt``
    ``accounts``: list of ``{"label", "stake", "public_key"?, "receipts"?}``
    (public keys in hex, defaulting to SHA-256 of the label); optional
    ``constants`` (inline mapping) or ``constants_file``; ``tx_rate``,
    ``fee_per_tx``.
``coinage``
    ``outputs``: list of ``{"owner", "amount", "age_days", "count"?}``;
    ``target_per_coinday`` or ``block_time`` for calibration; ``whole_days``.

Keys starting with ``_`` are comments.
"""
from __future__ import annotations

import json
from importlib import resources
from pathlib import Path

from .coinage import SECONDS_PER_DAY, WalletOutput
from .nxt import ForgingAccount, NxtConstants, load_constants, make_account
from .pow import CurrencyParams, Protocol
from .sim import (
    SimulationConfigError,
    SimulationReport,
    simulate_coinage_kernel,
    simulate_nxt_forging,
    simulate_pow,
)

__all__ = ["KINDS", "bundled_scenario", "load_scenario", "run_scenario", "scenario_constants"]

KINDS = ("pow", "nxt", "coinage")


def load_scenario(path: str | Path) -> dict:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise SimulationConfigError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise SimulationConfigError(f"{path}: line {exc.lineno}: {exc.msg}") from None
    if not isinstance(data, dict):
        raise SimulationConfigError(f"{path}: scenario must be a JSON object")
    base = Path(path).parent
    if "constants_file" in data:
        data["constants_file"] = str(base / data["constants_file"])
    return data


def bundled_scenario(kind: str) -> dict:
    name = {"pow": "pow_scaled", "nxt": "nxt_default", "coinage": "coinage_default"}[kind]
    return json.loads(resources.files("chaincomplexity.data").joinpath(f"{name}.json").read_text())


def _accounts(items) -> list[ForgingAccount]:
    accounts = []
    for item in items:
        receipts = tuple(tuple(r) for r in item.get("receipts", ()))
        if "public_key" in item:
            accounts.append(ForgingAccount(item["label"], bytes.fromhex(item["public_key"]),
                                           item["stake"], receipts))
        else:
            accounts.append(make_account(item["label"], item["stake"], receipts))
    return accounts


def _outputs(items) -> list[WalletOutput]:
    outputs = []
    for item in items:
        received = -float(item.get("age_days", 0)) * SECONDS_PER_DAY
        for _ in range(int(item.get("count", 1))):
            outputs.append(WalletOutput(float(item["amount"]), received, item.get("owner", "")))
    return outputs


def scenario_constants(config) -> NxtConstants | None:
    if "constants_file" in config:
        return load_constants(config["constants_file"])
    if "constants" in config:
        return NxtConstants.from_mapping(config["constants"])
    return None


def run_scenario(config: dict, kind: str | None = None, seed: int | None = None,
                 duration: int | None = None) -> SimulationReport:
    """Run a scenario; explicit ``kind``/``seed``/``duration`` override the file."""
    kind = kind or config.get("kind")
    if kind not in KINDS:
        raise SimulationConfigError(f"unknown simulation kind {kind!r}")
    if config.get("kind") not in (None, kind):
        raise SimulationConfigError(f"scenario is for {config['kind']!r}, not {kind!r}")
    seed = config.get("seed") if seed is None else seed
    duration = config.get("duration") if duration is None else duration
    if seed is None or duration is None:
        raise SimulationConfigError("seed and duration are required")
    try:
        if kind == "pow":
            params = CurrencyParams(config.get("name", "pow"), Protocol.POW,
                                    config["block_time"], config["hashrate"])
            return simulate_pow(params, duration, seed)
        if kind == "nxt":
            return simulate_nxt_forging(_accounts(config["accounts"]), duration, seed,
                                        constants=scenario_constants(config),
                                        tx_rate=config.get("tx_rate", 0.2),
                                        fee_per_tx=config.get("fee_per_tx", 0))
        return simulate_coinage_kernel(_outputs(config["outputs"]), duration, seed,
                                       target_per_coinday=config.get("target_per_coinday"),
                                       block_time=config.get("block_time", 600.0),
                                       whole_days=config.get("whole_days", False))
    except KeyError as exc:
        raise SimulationConfigError(f"scenario is missing {exc.args[0]!r}") from None
    except (TypeError, ValueError) as exc:
        if isinstance(exc, SimulationConfigError):
            raise
        raise SimulationConfigError(str(exc)) from None
