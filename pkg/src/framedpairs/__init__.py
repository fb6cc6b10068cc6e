"""framedpairs: exact-arithmetic moduli computations on the projective line.

Subpackages by concern:

- exactcore: rationals, degree-bounded polynomials, exact polynomial matrices
- matinv:    trace-word invariants of matrix tuples under conjugation
- sheafp1:   bundles on P^1 as splitting types, sheaf maps, subsheaf machinery
- stability: sigma-(semi)stability, Jordan-Hoelder, S-equivalence, bounds
- oriented:  oriented pairs, walls and chambers, flips, Hitchin maps
- instancedoc, casebook, cli: the JSON/CLI surface and scripted scenarios
"""

__version__ = "0.1.0"
