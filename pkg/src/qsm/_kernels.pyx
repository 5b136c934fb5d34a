# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled step kernel; behaviour identical to ``qsm._pykernels``."""

from qsm._pykernels import MissingRuleError


def step_terms(dict terms, Py_ssize_t n, ct, double eps,
               Py_ssize_t proj_site=-1, int proj_mode=0):
    cdef const long long[:] code = ct.code
    cdef const long long[:] offsets = ct.offsets
    cdef const unsigned char[:] present = ct.present
    cdef const long long[:] out_label = ct.out_label
    cdef const double complex[:] out_amp = ct.out_amp
    cdef list out_pair = ct.out_pair_list
    cdef list labels = ct.label_objs
    cdef Py_ssize_t d = ct.d
    cdef Py_ssize_t zero_row = ct.zero_code * d
    cdef unsigned char spacer = ct.spacer_byte
    cdef dict acc = {}
    cdef bytes tape, base
    cdef const unsigned char[:] tv
    cdef Py_ssize_t label, idx, k
    cdef unsigned char prev
    cdef double complex amp, contrib
    cdef object key, old, value
    cdef bint is_zero
    for item in terms.items():
        (label_obj, tape), value = item
        label = label_obj
        tv = tape
        if proj_mode:
            is_zero = tv[proj_site] == spacer
            if is_zero != (proj_mode == 1):
                continue
        prev = tv[n]
        idx = label * d * d + zero_row + code[prev]
        if not present[idx]:
            raise MissingRuleError(label, prev)
        amp = value
        base = tape[:n]
        for k in range(offsets[idx], offsets[idx + 1]):
            contrib = amp * out_amp[k]
            key = (labels[out_label[k]], base + <bytes>out_pair[k])
            old = acc.get(key)
            if old is None:
                acc[key] = contrib
            else:
                acc[key] = <double complex>old + contrib
    return {key: value for key, value in acc.items() if abs(<double complex>value) > eps}
