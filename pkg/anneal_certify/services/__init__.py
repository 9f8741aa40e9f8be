"""
Services package for anneal-certify.
Pauli algebra, spectra, dynamics, measurement, certification and the
experiment harness.
"""
