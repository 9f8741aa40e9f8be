"""
Utilities package for anneal-certify.
Error handling, command decorators, file and table IO.
"""
