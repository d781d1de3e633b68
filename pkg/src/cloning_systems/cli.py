"""Config-driven experiment runner.

Every subcommand builds a RunConfig, dispatches to a runner, and emits a
JSON report; reports are byte-identical for identical (config, seed) apart
from the runtime_ms field.  Exit codes: 0 all checked properties hold,
1 a checked property failed (the report carries the witness), 2 usage or
configuration error.  The default seed comes from the DCS_SEED environment
variable when set.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
import time
from dataclasses import dataclass, field
from typing import Callable, Optional

from . import analysis, cantor, cloning
from .analysis import (
    EVIDENCE_EXHAUSTIVE,
    EVIDENCE_SAMPLED,
    ExperimentReport,
    enumerate_fd_ball,
    enumerate_system_ball,
)
from .cloning import make_system
from .groups import UnsupportedError, base_group_by_name, mono_for, perm_apply
from .thompson import element_text, parse_element, random_element
from .trees import caret, expand_at, leaf_index, leaf_words, parse_tree


class ConfigError(ValueError):
    """Invalid run configuration (reported with exit code 2)."""


@dataclass
class RunConfig:
    system: str
    experiment: str
    params: dict = field(default_factory=dict)
    seed: int = 0
    out: Optional[str] = None

    def validate(self) -> None:
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}")
        if not isinstance(self.seed, int):
            raise ConfigError("seed must be an integer")
        for key in ("n", "radius", "m", "depth", "budget"):
            val = self.params.get(key)
            if val is not None and (not isinstance(val, int) or val < 0):
                raise ConfigError(f"parameter {key} must be a nonnegative integer")


def _get(config: RunConfig, key: str, default):
    val = config.params.get(key)
    return default if val is None else val


def _elements_for(config: RunConfig, system, count: int, rng, require_non_fd=False):
    texts = config.params.get("elements") or []
    if texts:
        return [parse_element(system, t) for t in texts]
    return analysis.sample_nontrivial_elements(
        system, count, rng, require_non_fd=require_non_fd
    )


def run_verify_axioms(config: RunConfig) -> ExperimentReport:
    system = make_system(config.system)
    n_max = _get(config, "n", 4)
    exhaustive = bool(_get(config, "exhaustive", False))
    budget = _get(config, "budget", 1000)
    result = cloning.verify_axioms(
        system, n_max=n_max, exhaustive=exhaustive, budget=budget, seed=config.seed
    )
    report = ExperimentReport(
        experiment="verify-axioms",
        system=system.name,
        params={"n": n_max, "exhaustive": exhaustive, "budget": budget},
        seed=config.seed,
        series={"checked": result["checked"]},
        verdict="pass" if result["ok"] else "fail",
        evidence=EVIDENCE_EXHAUSTIVE if exhaustive else EVIDENCE_SAMPLED,
    )
    if not result["ok"]:
        report.witnesses.append(
            f"{result['axiom']} fails at {result['counterexample']}"
        )
    return report


def run_probe(config: RunConfig) -> ExperimentReport:
    system = make_system(config.system)
    prop = config.params.get("property")
    if prop not in cloning.PROBE_PROPERTIES:
        raise ConfigError(
            f"probe needs a property in {cloning.PROBE_PROPERTIES}, got {prop!r}"
        )
    n_max = _get(config, "n", 4)
    budget = _get(config, "budget", 500)
    result = cloning.probe_property(
        system, prop, n_max=n_max, budget=budget, seed=config.seed
    )
    report = ExperimentReport(
        experiment="probe",
        system=system.name,
        params={"property": prop, "n": n_max, "budget": budget},
        seed=config.seed,
        series={"verdict_detail": result["verdict"]},
        verdict="fail" if result["verdict"] == "fails" else "pass",
        evidence=EVIDENCE_EXHAUSTIVE
        if result["verdict"] == "holds-exhaustive"
        else EVIDENCE_SAMPLED,
    )
    if result["verdict"] == "fails":
        report.witnesses.append(str(result["counterexample"]))
    return report


def run_diversity(config: RunConfig) -> ExperimentReport:
    system = make_system(config.system)
    n = _get(config, "n", 3)
    budget = _get(config, "budget", 500)
    exhaustive = config.params.get("exhaustive")
    result = cloning.diversity_witness(
        system, n, budget=budget, seed=config.seed, exhaustive=exhaustive
    )
    witness = result["witness"]
    report = ExperimentReport(
        experiment="diversity",
        system=system.name,
        params={"n": n, "budget": budget},
        seed=config.seed,
        series={"witness_found": witness is not None},
        verdict="witness" if witness is not None else "no-witness",
        evidence=EVIDENCE_EXHAUSTIVE if result["exhaustive"] else EVIDENCE_SAMPLED,
    )
    if witness is not None:
        report.witnesses.append(
            system.family.to_text(n + system.d - 1, witness)
        )
    return report


def run_conjugates(config: RunConfig) -> ExperimentReport:
    system = make_system(config.system)
    radius = _get(config, "radius", 3)
    rng = random.Random(config.seed)
    elements = _elements_for(config, system, _get(config, "budget", 5), rng)
    balls = [enumerate_fd_ball(system, L) for L in range(1, radius + 1)]
    series: dict = {"radii": list(range(1, radius + 1))}
    ok = True
    for i, x in enumerate(elements):
        counts = [analysis.conjugate_count(x, ball) for ball in balls]
        series[f"element_{i}"] = counts
        if any(a > b for a, b in zip(counts, counts[1:])):
            ok = False  # monotonicity in the radius is an exact invariant
    report = ExperimentReport(
        experiment="conjugates",
        system=system.name,
        params={"radius": radius, "count": len(elements)},
        seed=config.seed,
        series=series,
        witnesses=[element_text(x) for x in elements],
        verdict="pass" if ok else "fail",
        evidence=EVIDENCE_SAMPLED,
    )
    return report


def run_normalizer(config: RunConfig) -> ExperimentReport:
    system = make_system(config.system)
    radius = _get(config, "radius", 3)
    one_sided = bool(_get(config, "one_sided", False))
    rng = random.Random(config.seed)
    elements = _elements_for(config, system, _get(config, "budget", 3), rng)
    ball = enumerate_fd_ball(system, radius)
    series: dict = {"radius": radius, "results": []}
    all_normalize = True
    witnesses = []
    for x in elements:
        ok, failing = analysis.normalizes_up_to(x, ball, one_sided=one_sided)
        series["results"].append(ok)
        witnesses.append(element_text(x))
        if not ok:
            all_normalize = False
            witnesses.append(f"failing conjugator: {element_text(failing)}")
    report = ExperimentReport(
        experiment="normalizer",
        system=system.name,
        params={"radius": radius, "one_sided": one_sided},
        seed=config.seed,
        series=series,
        witnesses=witnesses,
        verdict="pass" if all_normalize else "fail",
        evidence=EVIDENCE_SAMPLED,
    )
    return report


def run_wahp_orbit(config: RunConfig) -> ExperimentReport:
    system = make_system(config.system)
    radius = _get(config, "radius", 3)
    rng = random.Random(config.seed)
    elements = _elements_for(config, system, _get(config, "budget", 3), rng)
    balls = [enumerate_fd_ball(system, L) for L in range(1, radius + 1)]
    series: dict = {"radii": list(range(1, radius + 1))}
    ok = True
    for i, x in enumerate(elements):
        counts = [analysis.coset_orbit_count(x, ball) for ball in balls]
        series[f"element_{i}"] = counts
        if any(a > b for a, b in zip(counts, counts[1:])):
            ok = False
    report = ExperimentReport(
        experiment="wahp-orbit",
        system=system.name,
        params={"radius": radius, "count": len(elements)},
        seed=config.seed,
        series=series,
        witnesses=[element_text(x) for x in elements],
        verdict="pass" if ok else "fail",
        evidence=EVIDENCE_SAMPLED,
    )
    return report


def run_mixing(config: RunConfig) -> ExperimentReport:
    system = make_system(config.system)
    d = system.d
    rng = random.Random(config.seed)
    if config.params.get("tree"):
        R = parse_tree(config.params["tree"], d)
    elif system.pure:
        R = caret(d)
    else:
        # non-pure systems need room for a nontrivial middle fixing the leaf
        R = expand_at(caret(d), d)
    v_text = config.params.get("leaf_word")
    if v_text:
        v = tuple(int(c) for c in v_text)
    elif system.pure:
        v = (1,)
    else:
        # the last leaf: slightly pure middles fix its index automatically
        v = leaf_words(R)[-1]
    if config.params.get("middle"):
        g = system.family.parse(R.leaf_count, config.params["middle"])
    else:
        # prefer a nontrivial middle that acts trivially at the graft leaf:
        # for tuple middles, identity in the grafted slot (the expansions
        # then only ever clone identity entries, so commutation holds even
        # without uniformity); for permutation middles, fixing the leaf
        n = R.leaf_count
        pos = leaf_index(R, v)
        identity = system.family.identity(n)
        g = identity
        for _ in range(200):
            cand = system.family.sample(n, rng)
            if isinstance(system, cloning.ProductSystem):
                cand = cand[: pos - 1] + (system.base.identity,) + cand[pos:]
                if not system.family.contains(n, cand):
                    continue
            if cand != identity and perm_apply(system.rho(n, cand), pos) == pos:
                g = cand
                break
    # default grafts: one caret hung on the first vs the last leaf of a caret
    if config.params.get("graft_a"):
        graft_a = parse_tree(config.params["graft_a"], d)
    else:
        graft_a = expand_at(caret(d), 1)
    if config.params.get("graft_b"):
        graft_b = parse_tree(config.params["graft_b"], d)
    else:
        graft_b = expand_at(caret(d), d)
    result = analysis.mixing_witness(system, R, v, g, graft_a, graft_b)
    report = ExperimentReport(
        experiment="mixing",
        system=system.name,
        params={
            "tree": config.params.get("tree", "caret"),
            "leaf_word": "".join(str(c) for c in v),
        },
        seed=config.seed,
        series={
            "commutes": result["commutes"],
            "f_nontrivial": result["f_nontrivial"],
            "uniform_declared": result["uniform_declared"],
            "middle_fixes_graft_leaf": result["middle_fixes_graft_leaf"],
        },
        witnesses=[element_text(result["x"]), element_text(result["f"])],
        verdict="pass" if result["commutes"] and result["f_nontrivial"] else "fail",
        evidence=EVIDENCE_SAMPLED,
    )
    if not result["commutes"]:
        report.witnesses.append(
            "commutation failed: counterexample to the premises "
            "(uniformity, or a middle acting at the grafted leaf)"
        )
    return report


def run_fpf(config: RunConfig) -> ExperimentReport:
    parts = config.system.split(":")
    if len(parts) != 3 or parts[0] != "prod":
        raise ConfigError("fpf expects a system of the form prod:<group>:id,<phi>")
    base = base_group_by_name(parts[1])
    labels = [x.strip() for x in parts[2].split(",")]
    if len(labels) != 2 or labels[0] != "id":
        raise ConfigError("fpf expects exactly the monomorphisms id,<phi>")
    phi = mono_for(base, labels[1])
    return analysis.fpf_suite(
        base,
        phi,
        n=_get(config, "n", 3),
        m_max=_get(config, "m", 5),
        seed=config.seed,
    )


def _random_point(d: int, depth: int, rng) -> "cantor.CantorWord":
    pre = tuple(rng.randint(1, d) for _ in range(rng.randint(0, depth // 2)))
    per = tuple(rng.randint(1, d) for _ in range(rng.randint(1, max(1, depth // 2))))
    return cantor.CantorWord(pre, per)


def run_cantor_crosscheck(config: RunConfig) -> ExperimentReport:
    system = make_system(config.system)
    if not system.permutation_type:
        raise ConfigError("cantor-crosscheck needs one of the F/T/V/Vhat systems")
    radius = _get(config, "radius", 2)
    budget = _get(config, "budget", 100)
    depth = _get(config, "depth", 12)
    rng = random.Random(config.seed)
    ball = enumerate_system_ball(system, radius)
    pairs = [(x, y) for x in ball for y in ball]
    rng2 = random.Random(config.seed + 1)
    sampled = [
        (random_element(system, rng2), random_element(system, rng2))
        for _ in range(budget)
    ]
    points = [_random_point(system.d, depth, rng) for _ in range(8)]
    checked = 0
    points_checked = 0
    failures = []
    for x, y in pairs + sampled:
        fx = cantor.from_tree_pair(x)
        fy = cantor.from_tree_pair(y)
        composed = fx.compose(fy)
        if not cantor.from_tree_pair(x * y).equals(composed):
            failures.append((element_text(x), element_text(y)))
            break
        checked += 1
        if checked % 50 == 0:
            for p in points:
                if composed.apply(p) != fx.apply(fy.apply(p)):
                    failures.append((element_text(x), element_text(y)))
                    break
                points_checked += 1
    order_ok = all(
        cantor.is_order_preserving(cantor.from_tree_pair(x)) == x.in_fd()
        for x in ball
    )
    inv_ok = all(
        cantor.from_tree_pair(x.inv()).equals(cantor.from_tree_pair(x).invert())
        for x in ball
    )
    ok = not failures and order_ok and inv_ok
    report = ExperimentReport(
        experiment="cantor-crosscheck",
        system=system.name,
        params={"radius": radius, "budget": budget, "depth": depth},
        seed=config.seed,
        series={
            "pairs_checked": checked,
            "points_checked": points_checked,
            "order_preserving_iff_fd": order_ok,
            "inverses_match": inv_ok,
        },
        verdict="pass" if ok else "fail",
        evidence=EVIDENCE_SAMPLED,
    )
    report.witnesses.extend(f"{a} * {b}" for a, b in failures)
    return report


EXPERIMENTS: dict[str, Callable[[RunConfig], ExperimentReport]] = {
    "verify-axioms": run_verify_axioms,
    "probe": run_probe,
    "diversity": run_diversity,
    "conjugates": run_conjugates,
    "normalizer": run_normalizer,
    "wahp-orbit": run_wahp_orbit,
    "mixing": run_mixing,
    "fpf": run_fpf,
    "cantor-crosscheck": run_cantor_crosscheck,
}


def run(config: RunConfig) -> ExperimentReport:
    """Validate, dispatch, and time one experiment."""
    config.validate()
    start = time.monotonic()
    report = EXPERIMENTS[config.experiment](config)
    report.runtime_ms = int((time.monotonic() - start) * 1000)
    return report


def emit_report(report: ExperimentReport, out: Optional[str]) -> None:
    text = report.to_json()
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _default_seed() -> int:
    env = os.environ.get("DCS_SEED")
    return int(env) if env else 0


def _add_common_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--system", help="registry key, e.g. V, Vhat, V:3, psi:Z3:id,id")
    p.add_argument("--n", type=int, help="group level bound")
    p.add_argument("--radius", type=int, help="ball radius: max carets per tree")
    p.add_argument("--m", type=int, help="power / chain length bound")
    p.add_argument("--depth", type=int, help="word depth bound for point checks")
    p.add_argument("--budget", type=int, help="sample budget")
    p.add_argument("--seed", type=int, help="random seed (default $DCS_SEED or 0)")
    p.add_argument("--out", help="write the JSON report to this path")
    p.add_argument(
        "--exhaustive", action="store_true", default=None, help="enumerate, not sample"
    )
    p.add_argument("--config", help="JSON config file; flags override its fields")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dcs",
        description="Finite-scale experiments on cloning-system Thompson-like groups.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in EXPERIMENTS:
        p = sub.add_parser(name, help=f"run the {name} experiment")
        _add_common_flags(p)
        if name == "probe":
            p.add_argument(
                "property",
                nargs="?",
                choices=cloning.PROBE_PROPERTIES,
                help="property to probe",
            )
        if name in ("conjugates", "normalizer", "wahp-orbit"):
            p.add_argument(
                "--element",
                action="append",
                dest="elements",
                metavar="TEXT",
                help="element in text form; repeatable (default: seeded samples)",
            )
        if name == "normalizer":
            p.add_argument("--one-sided", action="store_true", default=None)
        if name == "mixing":
            p.add_argument("--tree", help="base tree in text form (default: caret)")
            p.add_argument("--leaf-word", help="graft leaf address, e.g. 1")
            p.add_argument("--middle", help="middle group element text")
            p.add_argument("--graft-a", help="first grafted tree")
            p.add_argument("--graft-b", help="second grafted tree")
    p = sub.add_parser("report", help="run an experiment described by --config")
    _add_common_flags(p)
    p.add_argument("--experiment", help="experiment name when no config file is given")
    return parser


_PARAM_KEYS = ("n", "radius", "m", "depth", "budget")


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    doc: dict = {}
    if getattr(args, "config", None):
        try:
            with open(args.config) as fh:
                doc = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config file: {exc}") from exc
    params = dict(doc.get("params", {}))
    for key in _PARAM_KEYS:
        val = getattr(args, key, None)
        if val is not None:
            params[key] = val
    if getattr(args, "exhaustive", None) is not None:
        params["exhaustive"] = args.exhaustive
    for attr, key in (
        ("elements", "elements"),
        ("one_sided", "one_sided"),
        ("tree", "tree"),
        ("leaf_word", "leaf_word"),
        ("middle", "middle"),
        ("graft_a", "graft_a"),
        ("graft_b", "graft_b"),
        ("property", "property"),
    ):
        val = getattr(args, attr, None)
        if val is not None:
            params[key] = val
    experiment = args.command
    if experiment == "report":
        experiment = getattr(args, "experiment", None) or doc.get("experiment")
        if not experiment:
            raise ConfigError("report needs --experiment or an experiment in --config")
    system = getattr(args, "system", None) or doc.get("system")
    if not system:
        raise ConfigError("no system given (flag --system or config field)")
    seed = getattr(args, "seed", None)
    if seed is None:
        seed = doc.get("seed", _default_seed())
    out = getattr(args, "out", None) or doc.get("out")
    return RunConfig(
        system=system, experiment=experiment, params=params, seed=seed, out=out
    )


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = _config_from_args(args)
        config.validate()
        make_system(config.system)  # validate the registry key before running
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        report = run(config)
        emit_report(report, config.out)
    except (UnsupportedError, ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0 if report.verdict in ("pass", "no-witness", "witness") else 1


if __name__ == "__main__":
    sys.exit(main())
