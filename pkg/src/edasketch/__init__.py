"""Matrix-free testbed for randomized Nystrom preconditioning of
ensembles of incremental variational assimilations on the Lorenz-96 model.
"""

__version__ = "0.1.0"
