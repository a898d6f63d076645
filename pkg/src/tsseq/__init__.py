"""Symbolic bookkeeping for iterated (transfinite) spectral sequences.

The package computes, at the prime 2 and through the 19-stem:

* completely unadmissible (CU) sequence combinatorics and the ordinal
  index groups that order the filtrations,
* the lower-indexed Dyer-Lashof style algebras with their rewriting
  systems and the induced dual Steenrod action,
* cell bases for the homology of the stable layers ``L(k)_n``,
* a ledger-driven transfinite spectral sequence engine (Atiyah-Hirzebruch,
  Goodwillie and EHP flavours) together with table emission and golden
  file comparison against the shipped reference tables.
"""

from tsseq.cu import (
    INFINITE_EXCESS,
    OrdinalIndex,
    binom_mod2,
    cu_compare,
    cu_concat,
    cu_degree,
    cu_excess,
    cu_is_valid,
    mu_tahss,
    mu_tehpss,
    mu_tgss,
)
from tsseq.dyer_lashof import (
    BarElement,
    adem_rewrite,
    bar_rewrite,
    nishida_action,
    suspension_truncate,
    transfer_length2,
)
from tsseq.layers import basis, e_star, p_star, steenrod_on_cell
from tsseq.stems import StemsDB, load_database

__all__ = [
    "INFINITE_EXCESS",
    "OrdinalIndex",
    "binom_mod2",
    "cu_compare",
    "cu_concat",
    "cu_degree",
    "cu_excess",
    "cu_is_valid",
    "mu_tahss",
    "mu_tgss",
    "mu_tehpss",
    "BarElement",
    "adem_rewrite",
    "bar_rewrite",
    "nishida_action",
    "transfer_length2",
    "suspension_truncate",
    "basis",
    "p_star",
    "e_star",
    "steenrod_on_cell",
    "StemsDB",
    "load_database",
]
