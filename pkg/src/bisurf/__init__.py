"""bisurf: exact computer algebra for bigraded surface presentations.

Subpackages cover exact arithmetic domains (arith), sparse bigraded
polynomials (poly), Groebner machinery (grobner), the shipped surface
datasets and ring presentations (families), finite-field scans (search,
distrib), Hensel lifting (lift), lattice recognition (recog), the geometric
verification suite (geomverify), and the command line (cli).
"""

__version__ = "0.1.0"
