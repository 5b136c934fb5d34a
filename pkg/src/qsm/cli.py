"""Command-line driver: ``qsm simulate | check | paths | rotate``.

Exit codes: 0 success, 1 the analysis found the machine cannot be valid,
2 bad input.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

from qsm.basis import (CUMULATIVE, VARIANTS, SiteUnitary, commutation_defect,
                       rotated_joint_amplitude, validity_transport_check)
from qsm.builtins import BUILTINS, builtin
from qsm.evolution import dump_state, evolve
from qsm.machine import MachineError, RuleTable, load_table, validate
from qsm.paths import build_path_tree, path_tree_json_text, tree_leaves, tree_to_dot
from qsm.semantics import GLOBAL, PATH_LOCAL, incompleteness_check, machine_report
from qsm.symbols import EXTENDED, LanguageError, SentenceKind, classify

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_INPUT = 2
JOINT_SEARCH_STEPS = 30


class InputError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    machine: str
    steps: int
    max_sentence_len: int = 6
    semantics: str = PATH_LOCAL
    omega: str = CUMULATIVE
    unitary: str = "rot-0P(0.3)"
    out: str | None = None

    def __post_init__(self):
        if self.steps < 0:
            raise InputError("--steps must be nonnegative")
        if self.max_sentence_len < 5:
            raise InputError("--max-sentence-len must be at least 5")


def load_machine(spec: str) -> RuleTable:
    """A builtin name or a JSON machine file; the table must be isometric."""
    if spec in BUILTINS:
        return builtin(spec)
    path = Path(spec)
    if not path.is_file():
        raise InputError(f"{spec}: neither a builtin ({', '.join(sorted(BUILTINS))}) nor a file")
    try:
        table = load_table(path)
    except OSError as exc:
        raise InputError(f"{spec}: {exc}") from exc
    report = validate(table)
    if not report.is_isometric:
        raise InputError(f"{spec}: rule table is not isometric "
                         f"(column defect {report.max_column_defect:.3g})")
    return table


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _json(doc) -> str:
    return json.dumps(doc, indent=1, sort_keys=True) + "\n"


def cmd_simulate(cfg: RunConfig) -> int:
    table = load_machine(cfg.machine)
    _emit(dump_state(evolve(table, cfg.steps)), cfg.out)
    return EXIT_OK


def cmd_check(cfg: RunConfig, fmt: str = "summary") -> int:
    table = load_machine(cfg.machine)
    state = evolve(table, cfg.steps)
    report = machine_report(table, cfg.steps, cfg.max_sentence_len, cfg.semantics, state=state)
    doc = report.to_dict()
    cannot = report.cannot_be_valid
    extra = ""
    if table.mode == EXTENDED:
        inc = incompleteness_check(table, cfg.steps, state=state)
        doc["incompleteness"] = inc.to_dict()
        cannot = cannot or inc.cannot_be_valid
        extra = (f"liar ~PN(~PN): probability {inc.liar_probability:.6g}, "
                 f"{inc.liar_status.value}; PN(~PN): {inc.truthteller_verdict}\n")
    if cfg.out:
        Path(cfg.out).write_text(_json(doc), encoding="utf-8")
    if fmt == "json":
        sys.stdout.write(_json(doc))
    else:
        sys.stdout.write(report.summary() + extra)
    return EXIT_INVALID if cannot else EXIT_OK


def cmd_paths(cfg: RunConfig) -> int:
    table = load_machine(cfg.machine)
    tree = build_path_tree(evolve(table, cfg.steps))
    dot = tree_to_dot(tree, title=f"{table.name or 'machine'} n={cfg.steps}")
    if cfg.out:
        Path(cfg.out + ".dot").write_text(dot, encoding="utf-8")
        Path(cfg.out + ".json").write_text(path_tree_json_text(tree), encoding="utf-8")
        sys.stdout.write(f"{len(tree_leaves(tree))} leaves; wrote {cfg.out}.dot and {cfg.out}.json\n")
    else:
        sys.stdout.write(dot)
    return EXIT_OK


def _default_joint(table: RuleTable, n: int, word: str | None):
    """Pick ``X`` and ``a`` from the first printed ``~P(X)``."""
    state = evolve(table, n)
    for config, _ in sorted(state.items(), key=lambda ca: (ca[0].tape, ca[0].label)):
        tape = config.tape
        for start in range(1, len(tape)):
            for end in range(start + 1, min(len(tape), config.head - 2) + 1):
                if tape[start - 1] != "0" or tape[end - 1] != "0":
                    continue
                inner = tape[start:end - 1]
                if not inner or "0" in inner:
                    continue
                form = classify(inner, table.mode)
                if form.kind is not SentenceKind.NEGATIVE_P:
                    continue
                if word is not None and str(form.argument) != word:
                    continue
                return str(form.argument), start
    return None


def cmd_rotate(cfg: RunConfig, word: str | None = None, a: int | None = None,
               c: int | None = None) -> int:
    table = load_machine(cfg.machine)
    u = SiteUnitary.load(cfg.unitary, table.mode)
    transport = validity_transport_check(table, u, cfg.steps, cfg.max_sentence_len,
                                         cfg.omega, cfg.semantics)
    defect = commutation_defect(table, u, cfg.omega)
    doc = {"machine": table.name, "unitary": u.name, "omega": cfg.omega, "n": cfg.steps,
           "transport": transport.to_dict(),
           "commutation_defect": defect.max_defect}
    lines = [f"machine {table.name or '?'}, unitary {u.name}, omega {cfg.omega}, n={cfg.steps}"]
    lines.append("standard verdicts: " + ("valid-so-far" if transport.standard.valid_so_far
                                          else "CANNOT BE VALID"))
    if transport.preserved:
        lines.append("verdicts preserved")
    else:
        lines.append(f"verdicts differ on {len(transport.discrepancies)} sentence(s)")
        for dsc in transport.discrepancies:
            lines.append(f"  {dsc['sentence']}: standard {dsc['standard']}, observer {dsc['observer']}")
    lines.append(f"commutation defect {defect.max_defect:.6g}"
                 + (" (V = U)" if defect.commutes else " (V differs from U)"))

    joint = None
    if a is not None and word is not None:
        joint = (word, a)
    else:
        probe = _default_joint(table, max(cfg.steps, JOINT_SEARCH_STEPS), word)
        if probe is not None:
            joint = probe if a is None else (probe[0], a)
    if joint is None:
        doc["joint_amplitude"] = None
        lines.append("joint amplitude: no ~P(X) printed, nothing to measure")
    else:
        x, start = joint
        b = start + len(x) + 5
        cc = c if c is not None else b
        d = cc + len(x) + 1
        n = max(cfg.steps, b)
        m = max(0, d - n)
        amp = rotated_joint_amplitude(table, u, x, start, cc, n, m)
        doc["joint_amplitude"] = amp.to_dict()
        flag = "nonzero" if amp.value > 1e-12 else "zero"
        lines.append(f"joint amplitude for ~P({x}) at [{amp.a},{amp.b}] then {x} at "
                     f"[{amp.c},{amp.d}]: {amp.value:.12g} ({flag})")
    if cfg.out:
        Path(cfg.out).write_text(_json(doc), encoding="utf-8")
    sys.stdout.write("\n".join(lines) + "\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qsm", description="Quantum self-printing machine toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, *, logic=False, rotation=False):
        p.add_argument("--machine", required=True,
                       help=f"builtin ({', '.join(sorted(BUILTINS))}) or JSON rule table")
        p.add_argument("--steps", type=int, default=20, help="horizon n (default 20)")
        p.add_argument("--out", help="output path")
        if logic:
            p.add_argument("--max-sentence-len", type=int, default=6)
            p.add_argument("--semantics", choices=(PATH_LOCAL, GLOBAL), default=PATH_LOCAL)
        if rotation:
            p.add_argument("--omega", choices=VARIANTS, default=CUMULATIVE)
            p.add_argument("--unitary", default="rot-0P(0.3)",
                           help="identity, rot-0P(theta) or a JSON matrix file")

    common(sub.add_parser("simulate", help="write the canonical state dump"))
    p = sub.add_parser("check", help="logic report")
    common(p, logic=True)
    p.add_argument("--format", choices=("summary", "json"), default="summary")
    common(sub.add_parser("paths", help="word-path tree as DOT (and JSON with --out)"))
    p = sub.add_parser("rotate", help="basis-dependence experiments")
    common(p, logic=True, rotation=True)
    p.add_argument("--word", help="argument X of ~P(X) for the joint amplitude")
    p.add_argument("--a", type=int, help="start site of 0~P(X)0")
    p.add_argument("--c", type=int, help="start site of 0X0")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        cfg = RunConfig(
            machine=args.machine, steps=args.steps,
            max_sentence_len=getattr(args, "max_sentence_len", 6),
            semantics=getattr(args, "semantics", PATH_LOCAL),
            omega=getattr(args, "omega", CUMULATIVE),
            unitary=getattr(args, "unitary", "rot-0P(0.3)"),
            out=args.out,
        )
        if args.command == "simulate":
            return cmd_simulate(cfg)
        if args.command == "check":
            return cmd_check(cfg, args.format)
        if args.command == "paths":
            return cmd_paths(cfg)
        return cmd_rotate(cfg, args.word, args.a, args.c)
    except (InputError, MachineError, LanguageError, OSError) as exc:
        sys.stderr.write(f"qsm: error: {exc}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
