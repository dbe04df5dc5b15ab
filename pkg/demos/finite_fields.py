"""
Arithmetic in F_9
=================

Elements are stored as integers: the element a0 + a1*t of F_3[t]/(t^2 + 1)
is encoded as a0 + 3*a1.
"""
import numpy as np

from polyquery import ff_make
from polyquery.ffield import ff_inv

f = ff_make(3, 2)
print(f.describe())

t = f.element([0, 1])
print("t^2 =", (t * t).coeffs)          # t^2 = -1 = 2
print("t^-1 =", ff_inv(t).coeffs)

# the trace is F_3-valued, and the additive character is a p-th root of unity
for a in f.elements()[:4]:
    print(a.enc, a.coeffs, "tr =", int(f.trace_table[a.enc]), "e(a) =", np.round(f.char_table[a.enc], 4))

# characters of a nontrivial field sum to zero
print("sum of characters:", abs(f.char_table.sum()))

# the table paths are vectorised over arrays of encodings
x = np.arange(f.q)
print("x * x:", f.mul(x, x))
