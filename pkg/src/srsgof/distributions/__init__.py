"""Discrete models with samplers and, where tractable, pmfs."""

from .base import DiscreteModel, FinitePmf, MixtureModel
from .bitstrings import BitStringFamily, bitstring_alternative, bitstring_family
from .crp import CRP, crp_mixture_p, crp_pair_q, crp_pmf, crp_sample
from .ising import IsingModel, boltzmann_table, ising_sampler
from .poisson import BimodalPoisson

__all__ = [
    "BimodalPoisson",
    "BitStringFamily",
    "CRP",
    "DiscreteModel",
    "FinitePmf",
    "IsingModel",
    "MixtureModel",
    "bitstring_alternative",
    "bitstring_family",
    "boltzmann_table",
    "crp_mixture_p",
    "crp_pair_q",
    "crp_pmf",
    "crp_sample",
    "ising_sampler",
]
