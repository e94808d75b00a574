"""Exact local arithmetic for the metaplectic double cover of SL2(Q_p).

Subpackages cover: exact p-adic numbers, quadratic and Weil indices
(localfield); the double cover with its Kubota cocycle and genuine
characters (metaplectic); finite Schwartz models of the Weil
representation and the idempotent kernels (weilrep); epsilon-equivariant
Hecke algebras with their convolution relations (hecke, pgl2); principal
series vectors and eigenvalue computations (pseries); and the classical
weight k+1/2 plus space on rational q-expansions (plusq).  The cli module
batches every identity check into reproducible reports.
"""

from mp2local.localfield import (
    PadicNumber,
    AdditiveCharacter,
    Mu8,
    PrecisionError,
    hilbert_symbol,
    legendre,
    weil_index,
    weil_index_oracle,
)

__all__ = [
    "PadicNumber",
    "AdditiveCharacter",
    "Mu8",
    "PrecisionError",
    "hilbert_symbol",
    "legendre",
    "weil_index",
    "weil_index_oracle",
]
