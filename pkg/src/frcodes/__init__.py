"""Linear functional-repair storage codes over small finite fields.

A code is described by a collection of vector spaces: each storage node
keeps inner products of the data vector with a basis of its space, a
failed node is rebuilt from low-dimensional slices of the survivors'
spaces, and the admissible configurations form a set of space
collections that is closed under such repairs.

Modules:

    gf              field arithmetic GF(p^e), q <= 4096
    subspace        canonical subspaces of F_q^m, enumeration, linear algebra
    storage         repair/admissibility model and its verification
    family          a parameter family built from good collections and MDS codes
    groupsearch     linear symmetries, group closures, orbit codes
    partition_code  an explicit 4-node code from a partition of F_2^5
    simulator       event-level simulation of a distributed store
    fsc             text format for fields, subspaces, collections, states
    cli             command-line entry points
"""

__version__ = "0.1.0"

from .gf import GF, Field

__all__ = ["GF", "Field", "__version__"]
