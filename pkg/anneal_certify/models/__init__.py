"""
Models package for anneal-certify.
Contains the immutable domain records shared by the services.
"""

from anneal_certify.models.pauli import PauliTerm, PauliHamiltonian
from anneal_certify.models.state import StateVector, DensityMatrix
from anneal_certify.models.spectrum import Spectrum, PreEstimate, PopulationDecomposition
from anneal_certify.models.anneal import AnnealConfig, AnnealRun
from anneal_certify.models.moments import EnergyMoments
from anneal_certify.models.certification import CertificationReport, Theorem1Report
from anneal_certify.models.sweep import SweepGrid, SweepCell, ThresholdPoint, ErrorBarRow

__all__ = [
    'PauliTerm',
    'PauliHamiltonian',
    'StateVector',
    'DensityMatrix',
    'Spectrum',
    'PreEstimate',
    'PopulationDecomposition',
    'AnnealConfig',
    'AnnealRun',
    'EnergyMoments',
    'CertificationReport',
    'Theorem1Report',
    'SweepGrid',
    'SweepCell',
    'ThresholdPoint',
    'ErrorBarRow'
]
