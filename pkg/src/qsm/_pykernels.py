"""Pure-Python step kernel; the Cython module ``_kernels`` mirrors it."""

from __future__ import annotations


class MissingRuleError(LookupError):
    """Raised with ``(label_index, prev_byte)`` of the absent rule input."""


def step_terms(terms, n, ct, eps, proj_site=-1, proj_mode=0):
    """One application of the step operator to a sparse term map.

    ``terms`` maps ``(label_index, tape)`` to amplitudes, ``tape`` being the
    ``n + 1`` bytes of sites 1..n+1.  The head sits on the implicit spacer
    at site n+2.  With ``proj_mode`` 1 (2) only terms whose byte at
    ``proj_site`` is (is not) the spacer are stepped.  Duplicates are summed
    before magnitudes ``<= eps`` are dropped, so cancellation is exact.
    """
    code = ct.code_list
    offsets = ct.offsets_list
    present = ct.present_list
    out_label = ct.out_label_list
    out_pair = ct.out_pair_list
    out_amp = ct.out_amp_list
    d = ct.d
    zero_row = ct.zero_code * d
    spacer = ct.spacer_byte
    acc = {}
    get = acc.get
    for (label, tape), amp in terms.items():
        if proj_mode:
            is_zero = tape[proj_site] == spacer
            if is_zero != (proj_mode == 1):
                continue
        prev = tape[n]
        idx = (label * d * d) + zero_row + code[prev]
        if not present[idx]:
            raise MissingRuleError(label, prev)
        base = tape[:n]
        for k in range(offsets[idx], offsets[idx + 1]):
            key = (out_label[k], base + out_pair[k])
            acc[key] = get(key, 0j) + amp * out_amp[k]
    return {k: v for k, v in acc.items() if abs(v) > eps}
