"""Backend selection for the hot step kernel.

The compiled extension is used when it was built; set ``QSM_PURE_PYTHON=1``
to force the interpreted fallback.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from qsm import _pykernels
from qsm._pykernels import MissingRuleError
from qsm.machine import RuleTable
from qsm.symbols import SPACER

try:
    if os.environ.get("QSM_PURE_PYTHON"):
        raise ImportError("pure Python requested")
    from qsm import _kernels as _compiled
except ImportError:
    _compiled = None

BACKEND = "cython" if _compiled is not None else "python"

__all__ = ["BACKEND", "CompiledTable", "MissingRuleError", "compile_table",
           "step_terms", "available_backends", "kernel_for"]


@dataclass(frozen=True)
class CompiledTable:
    """Flat-array view of a rule table indexed by (label, cur, prev) codes."""

    d: int
    zero_code: int
    spacer_byte: int
    code: np.ndarray
    offsets: np.ndarray
    present: np.ndarray
    out_label: np.ndarray
    out_amp: np.ndarray
    out_pair_list: list
    label_objs: list

    def __post_init__(self):
        # List mirrors are much faster than numpy scalars in the pure loop.
        object.__setattr__(self, "code_list", self.code.tolist())
        object.__setattr__(self, "offsets_list", self.offsets.tolist())
        object.__setattr__(self, "present_list", self.present.tolist())
        object.__setattr__(self, "out_label_list", self.out_label.tolist())
        object.__setattr__(self, "out_amp_list", [complex(a) for a in self.out_amp])


def compile_table(table: RuleTable) -> CompiledTable:
    cached = table._compiled.get("kernel")
    if cached is not None:
        return cached
    syms = table.symbols
    d = len(syms)
    lidx = table.label_index()
    code = np.zeros(256, dtype=np.int64)
    for k, ch in enumerate(syms):
        code[ord(ch)] = k
    n_in = len(table.head_states) * d * d
    present = np.zeros(n_in, dtype=np.uint8)
    offsets = np.zeros(n_in + 1, dtype=np.int64)
    buckets: list[list] = [[] for _ in range(n_in)]
    for (label, cur, prev), outs in table.rules.items():
        idx = (lidx[label] * d + syms.index(cur)) * d + syms.index(prev)
        present[idx] = 1
        buckets[idx] = list(outs)
    out_label, out_amp, out_pair = [], [], []
    for idx, outs in enumerate(buckets):
        offsets[idx + 1] = offsets[idx] + len(outs)
        for o in outs:
            out_label.append(lidx[o.label])
            out_amp.append(o.amp)
            # Site j-1 then site j, in tape order.
            out_pair.append((o.prev + o.cur).encode("ascii"))
    ct = CompiledTable(
        d=d,
        zero_code=syms.index(SPACER),
        spacer_byte=ord(SPACER),
        code=code,
        offsets=offsets,
        present=present,
        out_label=np.asarray(out_label, dtype=np.int64),
        out_amp=np.asarray(out_amp, dtype=np.complex128),
        out_pair_list=out_pair,
        label_objs=list(range(len(table.head_states))),
    )
    table._compiled["kernel"] = ct
    return ct


def available_backends() -> dict:
    backends = {"python": _pykernels.step_terms}
    if _compiled is not None:
        backends["cython"] = _compiled.step_terms
    return backends


def kernel_for(name: str | None = None):
    if name is None:
        return step_terms
    return available_backends()[name]


step_terms = _compiled.step_terms if _compiled is not None else _pykernels.step_terms
