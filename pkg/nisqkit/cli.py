"""Command-line front end: ``nisqkit <command> [options]``."""

import argparse
import csv
import json
import sys
import time
from pathlib import Path
from typing import Any, Dict, Iterator, List, Optional, Tuple, get_args

import numpy as np
from pydantic import BaseModel, ValidationError

from nisqkit.circuits.qasm import parse_circuit
from nisqkit.core.config import settings
from nisqkit.core.errors import InputError, NisqError
from nisqkit.core.logging import configure_logging, get_logger
from nisqkit.models.noise import NoiseModel
from nisqkit.models.report import (
    BenchmarkRequest,
    CompileRequest,
    MitigateRequest,
    MitigationMethod,
    RunReport,
    SimulateRequest,
    VQARequest,
)
from nisqkit.services.benchmark_service import BenchmarkService
from nisqkit.services.compile_service import CompileService
from nisqkit.services.mitigation_service import MitigationService
from nisqkit.services.simulation_service import SimulationService
from nisqkit.services.vqa_service import VQAService

logger = get_logger(__name__)

# Option names the config file may set in addition to Settings fields.
GLOBAL_OPTIONS = ("seed", "threads", "out", "format", "log_level")


def read_text(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as e:
        raise InputError(f"Error reading '{path}': {str(e)}") from e


def read_json(path: str) -> Dict[str, Any]:
    try:
        data = json.loads(read_text(path))
    except json.JSONDecodeError as e:
        raise InputError(f"Error parsing JSON in '{path}': {str(e)}") from e
    if not isinstance(data, dict):
        raise InputError(f"'{path}' must hold a JSON object")
    return data


def text_or_file(value: Optional[str]) -> Optional[str]:
    """Contents of `value` when it names an existing file, else the value itself."""
    if value is None:
        return None
    path = Path(value)
    return path.read_text() if path.is_file() else value


def float_list(text: str) -> List[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def int_list(text: str) -> List[int]:
    return [int(v) for v in text.split(",") if v.strip()]


def str_list(text: str) -> List[str]:
    return [v.strip() for v in text.split(",") if v.strip()]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, help="Master seed (default: settings.SEED)")
    common.add_argument("--threads", type=int, help="Worker count (default: available parallelism)")
    common.add_argument("--out", help="Write the report to this path instead of stdout")
    common.add_argument("--format", choices=["json", "csv"], help="Report format (default: json)")
    common.add_argument("--config", help="JSON file of settings and option defaults; flags win")
    common.add_argument("--log-level", dest="log_level", help="Logging level")

    parser = argparse.ArgumentParser(prog="nisqkit", description="Classical toolkit for near-term quantum circuits")
    commands = parser.add_subparsers(dest="command", required=True)

    sim = commands.add_parser("simulate", parents=[common], help="Run a circuit on a simulator backend")
    sim.add_argument("circuit", help="Circuit file")
    sim.add_argument("--backend", choices=["sv", "mps", "peps", "density", "mc", "feynman"])
    sim.add_argument("--task", choices=["amplitude", "sample", "expectation", "probabilities"])
    sim.add_argument("--bits", help="Output bitstring for amplitudes")
    sim.add_argument("--observable", help="Observable text or file")
    sim.add_argument("--shots", type=int)
    sim.add_argument("--params", type=float_list, help="Comma-separated parameter values")
    sim.add_argument("--noise", help="Noise-model JSON file")
    sim.add_argument("--max-bond", dest="max_bond", type=int)
    sim.add_argument("--truncation", type=float)
    sim.add_argument("--grid", help="PEPS grid HxV")
    sim.add_argument("--partition", type=int_list, help="Qubits of the first Schrodinger-Feynman half")

    bench = commands.add_parser("benchmark", parents=[common], help="Run a benchmarking protocol")
    bench.add_argument("protocol", choices=["rb", "xeb", "qv", "mirror", "rqc-xeb"])
    bench.add_argument("--noise", help="Noise-model JSON file")
    bench.add_argument("--n-qubits", dest="n_qubits", type=int)
    bench.add_argument("--lengths", type=int_list, help="Comma-separated sequence lengths")
    bench.add_argument("--sequences", type=int)
    bench.add_argument("--shots", type=int)
    bench.add_argument("--max-width", dest="max_width", type=int)
    bench.add_argument("--circuits", dest="circuits_per_width", type=int, help="QV circuits per width")
    bench.add_argument("--route", help="Route QV circuits onto 'line' or 'complete' graphs")
    bench.add_argument("--circuit", help="Clifford base circuit file for mirror circuits")
    bench.add_argument("--repetitions", type=int)
    bench.add_argument("--grid", help="RQC grid HxV")
    bench.add_argument("--cycles", type=int)
    bench.add_argument("--samples", type=int)

    mit = commands.add_parser("mitigate", parents=[common], help="Apply an error-mitigation method")
    mit.add_argument("method", choices=list(get_args(MitigationMethod)))
    mit.add_argument("--data", help="Method data JSON file (extrapolation points, response matrix)")
    mit.add_argument("--circuit", help="Circuit file")
    mit.add_argument("--noise", help="Noise-model JSON file")
    mit.add_argument("--observable", help="Observable text or file")
    mit.add_argument("--samples", type=int)
    mit.add_argument("--factors", type=int_list, help="Odd identity-insertion factors")
    mit.add_argument("--copies", type=int)
    mit.add_argument("--symmetry", help="Pauli word of the symmetry")
    mit.add_argument("--sector", type=int, choices=[1, -1])
    mit.add_argument("--expansion", type=str_list, help="Comma-separated Pauli words")
    mit.add_argument("--training", type=int, help="CDR training circuits")

    comp = commands.add_parser("compile", parents=[common], help="Run compilation passes")
    comp.add_argument("circuit", help="Circuit file")
    comp.add_argument("--graph", help="Coupling description (line:N, grid:HxV, 0-1,1-2) or edge-list file")
    comp.add_argument("--passes", type=str_list, help="Comma-separated passes: fuse, route, cnot-synth")
    comp.add_argument("--lookahead", type=float)
    comp.add_argument("--emit", help="Write the compiled circuit to this file")

    grad = commands.add_parser("gradcheck", parents=[common], help="Cross-check gradient methods")
    grad.add_argument("--cases", type=int)
    grad.add_argument("--max-qubits", dest="max_qubits", type=int)
    grad.add_argument("--max-params", dest="max_params", type=int)

    vqa = commands.add_parser("vqa", parents=[common], help="Run QAOA MaxCut or VQE")
    vqa.add_argument("problem", choices=["qaoa", "vqe"])
    vqa.add_argument("--graph", help="MaxCut edge-list file")
    vqa.add_argument("--p", type=int, help="QAOA depth")
    vqa.add_argument("--hamiltonian", help="Observable text or file")
    vqa.add_argument("--layers", type=int)
    vqa.add_argument("--step-size", dest="step_size", type=float)
    vqa.add_argument("--max-iterations", dest="max_iterations", type=int)
    vqa.add_argument("--method", choices=["fd1", "fd2", "pshift", "adjoint"])

    commands.add_parser("schema", parents=[common], help="Print the report and noise-model JSON schemas")
    return parser


def resolve_options(args: argparse.Namespace) -> Dict[str, Any]:
    """Merge config-file values under explicit flags; Settings names update the settings."""
    options: Dict[str, Any] = {}
    if args.config:
        for key, value in read_json(args.config).items():
            if key in type(settings).model_fields:
                settings.override(**{key: value})
            else:
                options[key] = value
    options.update({k: v for k, v in vars(args).items() if v is not None and k != "config"})
    return options


def _request(model: type, values: Dict[str, Any]) -> BaseModel:
    fields = {k: v for k, v in values.items() if k in model.model_fields}
    try:
        return model(**fields)
    except ValidationError as e:
        raise InputError(f"Error in {values.get('command')} options: {str(e)}") from e


def _noise(options: Dict[str, Any]) -> None:
    if isinstance(options.get("noise"), str):
        options["noise"] = read_json(options["noise"])


def run_command(options: Dict[str, Any], rng: np.random.Generator, threads: int) -> Tuple[Dict[str, Any], Optional[str]]:
    """Dispatch one subcommand; returns (payload, backend)."""
    command = options["command"]
    if command == "simulate":
        _noise(options)
        circuit_text = read_text(options["circuit"])
        options["observable"] = text_or_file(options.get("observable"))
        request = _request(SimulateRequest, {**options, "circuit": circuit_text})
        return SimulationService().run(request, parse_circuit(circuit_text), rng), request.backend
    if command == "benchmark":
        _noise(options)
        if options.get("circuit"):
            options["circuit"] = read_text(options["circuit"])
        request = _request(BenchmarkRequest, options)
        return BenchmarkService().run(request, rng, threads), "density"
    if command == "mitigate":
        _noise(options)
        options["data"] = read_json(options["data"]) if options.get("data") else {}
        if options.get("circuit"):
            options["circuit"] = read_text(options["circuit"])
        options["observable"] = text_or_file(options.get("observable"))
        request = _request(MitigateRequest, options)
        return MitigationService().run(request, rng, threads).model_dump(), None
    if command == "compile":
        circuit_text = read_text(options["circuit"])
        options["graph"] = text_or_file(options.get("graph"))
        request = _request(CompileRequest, {**options, "circuit": circuit_text})
        payload = CompileService().run(request, parse_circuit(circuit_text))
        if options.get("emit"):
            Path(options["emit"]).write_text(payload["circuit"])
        return payload, None
    if command == "gradcheck":
        kwargs = {k: options[k] for k in ("cases", "max_qubits", "max_params") if k in options}
        return VQAService().gradcheck(rng, **kwargs), "sv"
    if command == "vqa":
        options["graph"] = text_or_file(options.get("graph"))
        options["hamiltonian"] = text_or_file(options.get("hamiltonian"))
        optimizer = {k: options[k] for k in ("step_size", "max_iterations", "method") if k in options}
        request = _request(VQARequest, {**options, "optimizer": {**options.get("optimizer", {}), **optimizer}})
        return VQAService().run(request, rng), "sv"
    return {"report": RunReport.model_json_schema(), "noise_model": NoiseModel.model_json_schema()}, None


def flatten(value: Any, prefix: str = "") -> Iterator[Tuple[str, Any]]:
    """(dotted field, scalar) pairs; list items get [i] suffixes."""
    if isinstance(value, dict):
        for key, item in value.items():
            yield from flatten(item, f"{prefix}.{key}" if prefix else str(key))
    elif isinstance(value, (list, tuple)):
        for i, item in enumerate(value):
            yield from flatten(item, f"{prefix}[{i}]")
    else:
        yield prefix, value


def write_report(report: RunReport, fmt: str, out: Optional[str]) -> None:
    stream = open(out, "w", newline="") if out else sys.stdout
    try:
        if fmt == "csv":
            writer = csv.DictWriter(stream, fieldnames=["field", "value"])
            writer.writeheader()
            for field, value in flatten(report.model_dump(mode="json", exclude={"arguments"})):
                writer.writerow({"field": field, "value": value})
        else:
            stream.write(report.model_dump_json(indent=2))
            stream.write("\n")
    finally:
        if out:
            stream.close()


def main(argv: Optional[List[str]] = None) -> int:
    """
    Parse arguments, run the command and write its report.

    Returns:
        int: 0 on success, 1 numerical failure, 2 input error, 3 budget exceeded.
    """
    args = build_parser().parse_args(argv)
    try:
        options = resolve_options(args)
        configure_logging(options.get("log_level"))
        seed = int(options.get("seed", settings.SEED))
        threads = int(options.get("threads", settings.THREADS))
        if threads < 1:
            raise InputError(f"--threads must be at least 1, got {threads}")
        settings.override(THREADS=threads)
        start = time.perf_counter()
        payload, backend = run_command(options, np.random.default_rng(seed), threads)
        report = RunReport(
            command=options["command"],
            arguments={k: v for k, v in options.items() if k in GLOBAL_OPTIONS or not isinstance(v, dict)},
            seed=seed,
            backend=backend,
            wall_clock=time.perf_counter() - start,
            results=payload,
        )
        write_report(report, options.get("format", "json"), options.get("out"))
    except NisqError as e:
        logger.error(f"{type(e).__name__}: {str(e)}")
        print(f"error: {str(e)}", file=sys.stderr)
        return e.exit_code
    except (ValidationError, ValueError) as e:
        logger.error(f"Invalid input: {str(e)}")
        print(f"error: {str(e)}", file=sys.stderr)
        return InputError.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
