"""heightlab: canonical heights, stability classification and Green
potentials for one-parameter families of Wehler-type surface
automorphisms.

The exact core (``exactnum``, ``nslattice``, ``wehler``, ``heights``)
computes geometric canonical heights of marked rational sections with
certified lattice data; the floating companion (``greenfield``)
approximates fiberwise Green potentials and checks the mass-equals-
height identity over parameter annuli.
"""

__version__ = "0.1.0"
