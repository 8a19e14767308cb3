"""Command-line frontend emitting deterministic JSON envelopes and CSV tables.

Every command wraps its results in an envelope ``{command, config, version,
payload, wall_time_ms}`` with schema version ``qdf/1``.  Payloads are
serialized canonically (sorted keys, complex numbers as [re, im] pairs,
matrices as row-major nested arrays), so repeated runs with the same config
and seed are byte-identical; only ``wall_time_ms`` varies.  CSV output uses
'.' decimals and 17 significant digits.

Exit codes: 0 success, 2 config error, 3 resource error, 4 precondition or
support error, 5 internal numerical failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from . import bayes_tomo, classical, definetti, exchange, opalg, realhilbert, states_povm
from .errors import NumericalError, QdfError, ResourceError

VERSION = "qdf/1"

_PAYLOAD_KEYS = {
    "povm build": {
        "d",
        "n_elements",
        "elements",
        "identity_sum_residual",
        "gram_rank",
        "gram_min_singular_value",
        "max_outcome_probability",
    },
    "definetti roundtrip": {"n", "ensemble", "roundtrip_residual", "exchangeability_residual", "symmetric"},
    "tomo run": {"k_schedule", "rows", "grid_points", "true_bloch"},
    "counterexample ghz": {"symmetric", "verdict", "iterations", "purity"},
    "counterexample real": {"valid", "trace", "min_eigenvalue", "span_residual", "dimension_gap"},
    "counterexample anticorrelation": {"symmetric", "verdict", "certificate"},
    "classical urn": {"m_trials", "n_trials", "family", "probs", "brute_force_residual"},
    "classical limit": {"n_trials", "family", "rows"},
}


class ConfigError(QdfError, ValueError):
    """Invalid command-line configuration."""


@dataclass
class ResultEnvelope:
    command: str
    config: dict[str, Any]
    payload: dict[str, Any]
    version: str = VERSION
    wall_time_ms: float = 0.0

    def to_dict(self) -> dict[str, Any]:
        return {
            "command": self.command,
            "config": self.config,
            "version": self.version,
            "payload": self.payload,
            "wall_time_ms": self.wall_time_ms,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    def payload_bytes(self) -> bytes:
        """Canonical payload serialization used for determinism checks."""
        return json.dumps(self.payload, sort_keys=True, separators=(",", ":")).encode()


def validate_envelope(env: dict[str, Any]) -> None:
    """Check an envelope dict against the published qdf/1 schema."""
    required = {"command", "config", "version", "payload", "wall_time_ms"}
    missing = required - env.keys()
    if missing:
        raise ConfigError(f"envelope missing keys {sorted(missing)}")
    if env["version"] != VERSION:
        raise ConfigError(f"unsupported envelope version {env['version']!r}")
    keys = _PAYLOAD_KEYS.get(env["command"])
    if keys is None:
        raise ConfigError(f"unknown command {env['command']!r}")
    missing = keys - env["payload"].keys()
    if missing:
        raise ConfigError(f"payload missing keys {sorted(missing)}")


def encode_value(obj):
    """Recursively convert numpy values for JSON: complex becomes [re, im]."""
    if isinstance(obj, dict):
        return {k: encode_value(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [encode_value(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return encode_value(obj.tolist())
    if isinstance(obj, complex):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, (np.complexfloating,)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def matrix_to_json(m: np.ndarray):
    """Row-major nested arrays with complex entries as [re, im] pairs."""
    return [[[float(x.real), float(x.imag)] for x in row] for row in np.asarray(m, dtype=complex)]


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.17g}"


def write_csv(path: str, header: list[str], rows: list[tuple]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(x) for x in row) + "\n")


# ---------------------------------------------------------------------------
# commands


def cmd_povm_build(args) -> ResultEnvelope:
    if args.tetrahedron:
        povm = states_povm.tetrahedron_povm()
    else:
        if not 2 <= args.d <= 5:
            raise ConfigError(f"--d must lie in 2..5, got {args.d}")
        povm = states_povm.build_minimal_ic_povm(args.d)
    total = sum(povm.elements)
    gram = povm.gram_matrix()
    svals = np.linalg.svd(gram, compute_uv=False)
    payload = {
        "d": povm.dim,
        "n_elements": len(povm),
        "elements": [matrix_to_json(e) for e in povm.elements],
        "identity_sum_residual": float(np.max(np.abs(total - np.eye(povm.dim)))),
        "gram_rank": int(np.sum(svals > states_povm.GRAM_SV_TOL)),
        "gram_min_singular_value": float(svals[-1]),
        "max_outcome_probability": float(
            max(np.linalg.eigvalsh(e)[-1] for e in povm.elements)
        ),
    }
    config = {"d": None if args.tetrahedron else args.d, "tetrahedron": bool(args.tetrahedron)}
    return ResultEnvelope("povm build", config, payload)


def _spin_y_ensemble() -> definetti.MixingEnsemble:
    plus = states_povm.DensityOperator(0.5 * (states_povm.ID2 + states_povm.SIGMA_2))
    minus = states_povm.DensityOperator(0.5 * (states_povm.ID2 - states_povm.SIGMA_2))
    return definetti.MixingEnsemble([0.5, 0.5], [plus, minus])


def _random_ensemble(components: int, seed: int) -> definetti.MixingEnsemble:
    rng = np.random.Generator(np.random.PCG64(seed))
    w = rng.random(components)
    states = [states_povm.random_density(rng, 2) for _ in range(components)]
    return definetti.MixingEnsemble(w / w.sum(), states)


def cmd_definetti_roundtrip(args) -> ResultEnvelope:
    if not 1 <= args.n <= 3:
        raise ConfigError(f"--n must lie in 1..3, got {args.n}")
    seed = _resolve_seed(args)
    if args.ensemble == "spin-y":
        ens = _spin_y_ensemble()
    else:
        if args.components < 1:
            raise ConfigError("--components must be positive")
        ens = _random_ensemble(args.components, seed)

    povm = states_povm.tetrahedron_povm()
    frame = states_povm.dual_frame(povm)
    state = definetti.mix_product_states(ens, args.n)
    seq = definetti.induced_sequence_distribution(state, povm)
    recon = definetti.reconstruct_multisystem(seq, frame)

    table = seq.table()
    exch = 0.0
    for axis in range(args.n - 1):
        exch = max(exch, float(np.max(np.abs(np.swapaxes(table, axis, axis + 1) - table))))

    payload = {
        "n": args.n,
        "ensemble": args.ensemble,
        "roundtrip_residual": float(np.max(np.abs(recon.matrix - state.matrix))),
        "exchangeability_residual": exch,
        "symmetric": bool(exchange.is_symmetric(state, 1e-10)),
    }
    if args.inject_nonphysical:
        lam = args.inject_lambda
        if lam <= 0:
            raise ConfigError("--inject-lambda must be positive")
        if not 0 < args.inject_weight < 1:
            raise ConfigError("--inject-weight must lie in (0, 1)")
        bad = np.diag([1.0 + lam, -lam]).astype(complex)
        weights = [args.inject_weight] + [
            (1.0 - args.inject_weight) * w for w in ens.weights
        ]
        components = [bad] + [s.matrix for s in ens.states]
        report = definetti.witness_report(weights, components)
        payload["witness"] = {
            "lambda": report.lam,
            "first_exceeding": report.first_exceeding,
            "growth": [[n, v] for n, v in report.growth],
        }
    config = {
        "n": args.n,
        "components": args.components,
        "seed": seed,
        "ensemble": args.ensemble,
        "inject_nonphysical": bool(args.inject_nonphysical),
        "inject_weight": args.inject_weight,
        "inject_lambda": args.inject_lambda,
    }
    return ResultEnvelope("definetti roundtrip", config, payload)


def cmd_tomo_run(args) -> ResultEnvelope:
    seed = _resolve_seed(args)
    schedule = _parse_int_list(args.k_schedule, "--k-schedule")
    bloch = [float(x) for x in args.true_bloch.split(",")]
    if len(bloch) != 3:
        raise ConfigError("--true-bloch needs three comma-separated components")
    rho_true = states_povm.density_from_bloch(bloch)
    points = bayes_tomo.default_qubit_grid(args.grid_points)
    prior_a = bayes_tomo.PriorGrid.uniform(points)
    prior_b = bayes_tomo.PriorGrid(points, bayes_tomo.mixedness_biased_weights(points))
    povm = states_povm.tetrahedron_povm()
    rows = bayes_tomo.convergence_experiment(prior_a, prior_b, rho_true, povm, schedule, seed)
    payload = {
        "k_schedule": schedule,
        "rows": [[k, a, b, c] for k, a, b, c in rows],
        "grid_points": len(points),
        "true_bloch": bloch,
    }
    config = {
        "k_schedule": schedule,
        "seed": seed,
        "grid_points": args.grid_points,
        "true_bloch": bloch,
    }
    env = ResultEnvelope("tomo run", config, payload)
    if args.csv:
        write_csv(args.csv, ["K", "dist_ab", "dist_a_true", "dist_b_true"], rows)
    return env


def cmd_counterexample(args) -> ResultEnvelope:
    config = {"variant": args.variant}
    if args.variant == "ghz":
        state = exchange.ghz_state()
        report = exchange.extension_feasible(state, 1)
        payload = {
            "symmetric": bool(exchange.is_symmetric(state, 1e-10)),
            "verdict": report.verdict,
            "iterations": report.iterations,
            "purity": state.op.purity(),
        }
    elif args.variant == "real":
        m = realhilbert.spin_y_mixture(2)
        verdict = realhilbert.validate_real_state(m)
        _, residual = realhilbert.real_product_span_residual(m, 2)
        lhs, rhs, positive = realhilbert.dimension_gap(2, 2)
        payload = {
            "valid": verdict.valid,
            "trace": verdict.trace,
            "min_eigenvalue": verdict.min_eigenvalue,
            "span_residual": residual,
            "dimension_gap": {"lhs": lhs, "rhs": rhs, "gap_positive": positive},
        }
    elif args.variant == "anticorrelation":
        table = classical.JointDistribution(2, 2, np.array([0.0, 0.5, 0.5, 0.0]))
        verdict, cert = classical.extension_feasible_classical(table, 1)
        cert_payload = None
        if isinstance(cert, classical.InfeasibilityCertificate):
            cert_payload = {
                "violated_assignment": list(cert.violated_assignment),
                "required_mass": cert.required_mass,
                "forced_types": {
                    "".join(map(str, t)): list(x) for t, x in cert.forced_types.items()
                },
                "description": cert.describe(),
            }
        payload = {
            "symmetric": bool(classical.is_symmetric_dist(table)),
            "verdict": verdict,
            "certificate": cert_payload,
        }
    else:
        raise ConfigError(f"unknown counterexample variant {args.variant!r}")
    return ResultEnvelope(f"counterexample {args.variant}", config, payload)


def _count_family(name: str, z: float):
    if name == "uniform":
        return classical.uniform_count_family
    if name == "point":
        return classical.point_mass_count_family(z)
    raise ConfigError(f"unknown family {name!r}")


def cmd_classical_urn(args) -> ResultEnvelope:
    if not 1 <= args.M <= 512:
        raise ConfigError(f"--M must lie in 1..512, got {args.M}")
    if not 1 <= args.N <= args.M:
        raise ConfigError(f"--N must lie in 1..M, got {args.N}")
    family = _count_family(args.family, args.z)
    count_dist = family(args.M)
    probs = classical.finite_representation(count_dist, args.N)
    residual = None
    if args.M <= 16:
        brute = classical.enumerate_marginal_counts(count_dist, args.N)
        residual = float(np.max(np.abs(probs - brute)))
    payload = {
        "m_trials": args.M,
        "n_trials": args.N,
        "family": args.family,
        "probs": [float(x) for x in probs],
        "brute_force_residual": residual,
    }
    config = {"M": args.M, "N": args.N, "family": args.family, "z": args.z}
    env = ResultEnvelope("classical urn", config, payload)
    if args.csv:
        write_csv(args.csv, ["n", "p"], [(n, p) for n, p in enumerate(probs)])
    return env


def cmd_classical_limit(args) -> ResultEnvelope:
    m_list = _parse_int_list(args.M_list, "--M-list")
    if any(m > 512 for m in m_list):
        raise ConfigError("--M-list entries must be <= 512")
    if any(args.N > m for m in m_list):
        raise ConfigError("--N must not exceed any M in the list")
    family = _count_family(args.family, args.z)
    rows = classical.limit_convergence_demo(family, args.N, m_list)
    payload = {
        "n_trials": args.N,
        "family": args.family,
        "rows": [[m] + [float(x) for x in probs] for m, probs in rows],
    }
    if args.family == "uniform":
        payload["limit_value"] = 1.0 / (args.N + 1)
    config = {"N": args.N, "family": args.family, "z": args.z, "M_list": m_list}
    env = ResultEnvelope("classical limit", config, payload)
    if args.csv:
        header = ["M"] + [f"p{n}" for n in range(args.N + 1)]
        write_csv(args.csv, header, [tuple([m] + list(p)) for m, p in rows])
    return env


# ---------------------------------------------------------------------------
# plumbing


def _parse_int_list(text: str, flag: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x != ""]
    except ValueError as exc:
        raise ConfigError(f"{flag} expects comma-separated integers: {exc}") from exc


def _resolve_seed(args) -> int:
    if args.seed is not None:
        return args.seed
    return int(os.environ.get("QDF_SEED", "0"))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qdf", description=__doc__)
    sub = parser.add_subparsers(dest="group", required=True)

    povm = sub.add_parser("povm", help="informationally complete measurements")
    povm_sub = povm.add_subparsers(dest="verb", required=True)
    build = povm_sub.add_parser("build", help="construct a minimal IC-POVM")
    build.add_argument("--d", type=int, default=2, help="Hilbert-space dimension (2..5)")
    build.add_argument("--tetrahedron", action="store_true", help="use the qubit tetrahedron POVM")
    _common_output(build)
    build.set_defaults(func=cmd_povm_build)

    definetti_p = sub.add_parser("definetti", help="product-mixture statistics pipeline")
    definetti_sub = definetti_p.add_subparsers(dest="verb", required=True)
    rt = definetti_sub.add_parser("roundtrip", help="mix, measure, reconstruct")
    rt.add_argument("--n", type=int, default=2, help="number of systems (1..3)")
    rt.add_argument("--components", type=int, default=3, help="random ensemble size")
    rt.add_argument("--seed", type=int, default=None)
    rt.add_argument("--ensemble", choices=["random", "spin-y"], default="random")
    rt.add_argument("--inject-nonphysical", action="store_true")
    rt.add_argument("--inject-weight", type=float, default=0.1)
    rt.add_argument("--inject-lambda", type=float, default=0.25)
    _common_output(rt)
    rt.set_defaults(func=cmd_definetti_roundtrip)

    tomo = sub.add_parser("tomo", help="Bayesian tomography experiments")
    tomo_sub = tomo.add_subparsers(dest="verb", required=True)
    run = tomo_sub.add_parser("run", help="two-prior convergence experiment")
    run.add_argument("--k-schedule", default="100,1000,10000")
    run.add_argument("--seed", type=int, default=None)
    run.add_argument("--grid-points", type=int, default=200)
    run.add_argument("--true-bloch", default="0,0,0.5")
    run.add_argument("--csv", default=None, help="write the trace as CSV")
    _common_output(run)
    run.set_defaults(func=cmd_tomo_run)

    counter = sub.add_parser("counterexample", help="non-extendible state demonstrations")
    counter.add_argument("variant", choices=["ghz", "real", "anticorrelation"])
    _common_output(counter)
    counter.set_defaults(func=cmd_counterexample)

    cls = sub.add_parser("classical", help="exchangeable binary-variable machinery")
    cls_sub = cls.add_subparsers(dest="verb", required=True)
    urn = cls_sub.add_parser("urn", help="finite mixture representation")
    urn.add_argument("--M", type=int, required=True)
    urn.add_argument("--N", type=int, required=True)
    urn.add_argument("--family", choices=["uniform", "point"], default="uniform")
    urn.add_argument("--z", type=float, default=1.0, help="frequency for the point family")
    urn.add_argument("--csv", default=None)
    _common_output(urn)
    urn.set_defaults(func=cmd_classical_urn)
    limit = cls_sub.add_parser("limit", help="large-urn convergence table")
    limit.add_argument("--N", type=int, required=True)
    limit.add_argument("--M-list", dest="M_list", required=True)
    limit.add_argument("--family", choices=["uniform", "point"], default="uniform")
    limit.add_argument("--z", type=float, default=1.0)
    limit.add_argument("--csv", default=None)
    _common_output(limit)
    limit.set_defaults(func=cmd_classical_limit)

    return parser


def _common_output(p: argparse.ArgumentParser) -> None:
    p.add_argument("--output", default=None, help="write the JSON envelope to this path")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    started = time.perf_counter()
    try:
        env = args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except ResourceError as exc:
        print(f"resource error: {exc}", file=sys.stderr)
        return 3
    except (NumericalError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 5
    except QdfError as exc:
        print(f"precondition error: {exc}", file=sys.stderr)
        return 4
    env.wall_time_ms = 1000.0 * (time.perf_counter() - started)
    env.payload = encode_value(env.payload)
    env.config = encode_value(env.config)
    validate_envelope(env.to_dict())
    text = env.to_json()
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
