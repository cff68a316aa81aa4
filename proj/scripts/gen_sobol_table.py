#!/usr/bin/env python3
"""Regenerate src/sobol_direction_numbers.inc from the Joe-Kuo
new-joe-kuo-6.21201 direction numbers shipped with SciPy."""
import os
import sys

import numpy as np
import scipy

DIMS = int(sys.argv[1]) if len(sys.argv) > 1 else 256

path = os.path.join(os.path.dirname(scipy.__file__), "stats",
                    "_sobol_direction_numbers.npz")
data = np.load(path)
poly, vinit = data["poly"], data["vinit"]

out = []
out.append("// Generated by scripts/gen_sobol_table.py. Do not edit.")
out.append("// Source: S. Joe and F. Y. Kuo, new-joe-kuo-6.21201 direction numbers")
out.append("// (https://web.maths.unsw.edu.au/~fkuo/sobol/), BSD-style license.")
out.append("// Entry d describes dimension d+2; dimension 1 uses m_k = 1 for all k.")
out.append("// Fields: degree s, coefficient bits a, initial m_1..m_s.")
for d in range(1, DIMS):
    p = int(poly[d])
    s = p.bit_length() - 1
    a = (p >> 1) & ((1 << (s - 1)) - 1) if s > 1 else 0
    m = ", ".join(str(int(v)) for v in vinit[d][:s])
    out.append(f"{{{s}, {a}, {{{m}}}}},")
print("\n".join(out))
